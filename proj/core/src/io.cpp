#include "vh/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vh::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingArtifact(path);
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    return is;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void put_le_double(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_le_double(const unsigned char* b) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

// Next whitespace-delimited header token, collecting '#' comment lines.
std::string token(std::istream& is, std::vector<std::string>& comments) {
    std::string t;
    int ch;
    while ((ch = is.get()) != EOF) {
        if (ch == '#') {
            std::string line;
            std::getline(is, line);
            comments.push_back(line);
            continue;
        }
        if (std::isspace(ch)) {
            if (!t.empty()) return t;
            continue;
        }
        t.push_back(char(ch));
    }
    return t;
}

} // namespace

void write_mask_pgm(const std::filesystem::path& path, const HologramMask& mask) {
    auto os = open_out(path);
    const std::size_t n = mask.grid.n;
    os << "P5\n# mode=" << mask.source_mode.p << ',' << mask.source_mode.l
       << " alpha=" << fmt("%.17g", mask.grating.alpha)
       << " kx0=" << fmt("%.17g", mask.grating.k_x0(mask.rho_max))
       << " rho_max=" << fmt("%.17g", mask.rho_max)
       << " pitch=" << fmt("%.17g", mask.grid.pitch) << "\n"
       << n << ' ' << n << "\n255\n";
    std::vector<char> row(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) row[c] = mask.at(r, c) ? char(255) : char(0);
        os.write(row.data(), std::streamsize(n));
    }
}

PgmImage read_pgm(const std::filesystem::path& path) {
    auto is = open_in(path);
    PgmImage img;
    if (token(is, img.comments) != "P5") throw FormatError(path.string() + ": not a binary PGM");
    try {
        img.width = std::stoul(token(is, img.comments));
        img.height = std::stoul(token(is, img.comments));
        img.maxval = unsigned(std::stoul(token(is, img.comments)));
    } catch (const std::logic_error&) {
        throw FormatError(path.string() + ": malformed PGM header");
    }
    if (img.maxval == 0 || img.maxval > 65535) throw FormatError(path.string() + ": bad maxval");
    const std::size_t bpp = img.maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(img.width * img.height * bpp);
    is.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
    if (std::size_t(is.gcount()) != raw.size()) throw FormatError(path.string() + ": truncated raster");
    img.pixels.resize(img.width * img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = bpp == 1 ? raw[i] : (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
    return img;
}

void write_intensity_pgm(const std::filesystem::path& path, const std::vector<double>& values, std::size_t width,
                         std::size_t height) {
    if (values.size() != width * height) throw std::invalid_argument("write_intensity_pgm: size mismatch");
    const double top = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    auto os = open_out(path);
    os << "P5\n# max_intensity=" << fmt("%.17g", top) << " scale=linear\n"
       << width << ' ' << height << "\n65535\n";
    std::vector<unsigned char> buf(2 * values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const unsigned v = top > 0 ? unsigned(std::lround(std::clamp(values[i] / top, 0.0, 1.0) * 65535.0)) : 0u;
        buf[2 * i] = (unsigned char)(v >> 8);
        buf[2 * i + 1] = (unsigned char)(v & 0xff);
    }
    os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
}

void write_complex(const std::filesystem::path& path, const ComplexField& f) {
    const double pitch = f.plane == Plane::diffraction ? f.angular_pitch : f.grid.pitch;
    char header[64];
    std::memset(header, ' ', sizeof header);
    const int len = std::snprintf(header, sizeof header, "CFLD1 %zu %.17g %s", f.grid.n, pitch, plane_name(f.plane));
    if (len < 0 || len >= 63) throw std::runtime_error("write_complex: header overflow");
    header[len] = ' ';
    header[63] = '\n';
    auto os = open_out(path);
    os.write(header, 64);
    for (const auto& v : f.values) {
        put_le_double(os, v.real());
        put_le_double(os, v.imag());
    }
}

ComplexField read_complex(const std::filesystem::path& path) {
    auto is = open_in(path);
    char header[65] = {};
    is.read(header, 64);
    if (is.gcount() != 64) throw FormatError(path.string() + ": short header");
    std::istringstream hs(std::string(header, 64));
    std::string magic, plane;
    std::size_t n = 0;
    double pitch = 0;
    hs >> magic >> n >> pitch >> plane;
    if (magic != "CFLD1" || !hs || n == 0) throw FormatError(path.string() + ": bad CFLD1 header");
    ComplexField f;
    f.grid.n = n;
    if (plane == "diffraction") {
        f.plane = Plane::diffraction;
        f.angular_pitch = pitch;
    } else if (plane == "aperture") {
        f.plane = Plane::aperture;
        f.grid.pitch = pitch;
    } else {
        throw FormatError(path.string() + ": unknown plane tag " + plane);
    }
    std::vector<unsigned char> raw(n * n * 16);
    is.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
    if (std::size_t(is.gcount()) != raw.size()) throw FormatError(path.string() + ": truncated data");
    f.values.resize(n * n);
    for (std::size_t i = 0; i < n * n; ++i)
        f.values[i] = cplx(get_le_double(&raw[16 * i]), get_le_double(&raw[16 * i + 8]));
    return f;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto os = open_out(path);
    os << text;
}

std::string read_text(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace vh::io
