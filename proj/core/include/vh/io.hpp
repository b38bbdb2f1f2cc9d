#pragma once
// File formats: binary mask PGM, 16-bit intensity PGM, complex field dumps.

#include "vh/hologram.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace vh::io {

struct MissingArtifact : std::runtime_error {
    explicit MissingArtifact(const std::filesystem::path& p)
        : std::runtime_error("missing artifact: " + p.string()), path(p) {}
    std::filesystem::path path;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 8-bit P5, bytes 0 or 255, one comment line with the generating parameters.
void write_mask_pgm(const std::filesystem::path& path, const HologramMask& mask);

struct PgmImage {
    std::size_t width = 0, height = 0;
    unsigned maxval = 0;
    std::vector<std::string> comments;
    std::vector<unsigned> pixels;
};
PgmImage read_pgm(const std::filesystem::path& path);

// 16-bit big-endian P5 scaled so the largest value maps to 65535.
void write_intensity_pgm(const std::filesystem::path& path, const std::vector<double>& values, std::size_t width,
                         std::size_t height);

// 64-byte text header then little-endian (re, im) doubles, row-major.
void write_complex(const std::filesystem::path& path, const ComplexField& f);
ComplexField read_complex(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace vh::io
