#include "vh/specfun.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vh::specfun {
namespace {

// Ascending series. Only used where the alternating terms stay small
// relative to the sum, so cancellation costs at most a few digits.
double series_j(int l, double x) {
    const double q = -0.25 * x * x;
    double term = 1.0;
    for (int k = 1; k <= l; ++k) term *= 0.5 * x / k;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (double(k) * double(k + l));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Miller's downward recurrence, normalized with J_0 + 2 sum J_2k = 1.
double miller_j(int l, double x) {
    const double big = 1e250;
    int start = std::max(l, int(x)) + 20 + int(std::sqrt(40.0 * std::max<double>(l, x)));
    start += start & 1;
    double jp1 = 0.0, j = 1.0, result = 0.0, norm = 0.0;
    for (int m = start; m >= 1; --m) {
        double jm1 = 2.0 * m / x * j - jp1;
        jp1 = j;
        j = jm1;
        int idx = m - 1;
        if (idx == l) result = j;
        if (idx > 0 && (idx & 1) == 0) norm += 2.0 * j;
        if (std::abs(j) > big) {
            j /= big; jp1 /= big; result /= big; norm /= big;
        }
    }
    norm += j;
    return result / norm;
}

// Hankel asymptotic expansion, used for large x where it converges fast.
double hankel_j(int l, double x) {
    const double mu = 4.0 * double(l) * double(l);
    double P = 0.0, Q = 0.0, term = 1.0;
    double prev = 1e300;
    for (int k = 0; k < 60; ++k) {
        if (k > 0) term *= (mu - double(2 * k - 1) * double(2 * k - 1)) / (k * 8.0 * x);
        double a = std::abs(term);
        if (a > prev) break;
        prev = a;
        switch (k % 4) {
            case 0: P += term; break;
            case 1: Q += term; break;
            case 2: P -= term; break;
            case 3: Q -= term; break;
        }
        if (a < 1e-17) break;
    }
    const double chi = x - (0.5 * l + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (P * std::cos(chi) - Q * std::sin(chi));
}

double j_nonneg(int l, double x) {
    if (x == 0.0) return l == 0 ? 1.0 : 0.0;
    if (x < 8.0 || x * x < 2.0 * (l + 1)) return series_j(l, x);
    if (x > 200.0 && x > 2.5 * double(l) * double(l)) return hankel_j(l, x);
    return miller_j(l, x);
}

struct ZeroTable {
    std::shared_mutex mu;
    std::map<std::pair<int, int>, double> entries;
};

ZeroTable& table() {
    static ZeroTable t;
    return t;
}

double find_zero(int l, int p) {
    const double step = std::numbers::pi / 4.0;
    double a = std::max(l, 1);
    double fa = j_nonneg(l, a);
    int found = -1;
    for (int guard = 0; guard < 100000; ++guard) {
        double b = a + step;
        double fb = j_nonneg(l, b);
        if (fa == 0.0) {
            if (++found == p) return a;
        } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
            if (++found == p) {
                double lo = a, hi = b, flo = fa;
                int it = 0;
                while (hi - lo > 1e-13 && it++ < 200) {
                    double mid = 0.5 * (lo + hi);
                    double fm = j_nonneg(l, mid);
                    if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; }
                    else hi = mid;
                }
                double x = 0.5 * (lo + hi);
                double d = 0.5 * (j_nonneg(std::abs(l - 1), x) * (l >= 1 ? 1.0 : -1.0) - j_nonneg(l + 1, x));
                if (d != 0.0) {
                    double xn = x - j_nonneg(l, x) / d;
                    if (xn > a && xn < b) x = xn;
                }
                if (std::abs(j_nonneg(l, x)) >= 1e-12)
                    throw std::runtime_error("bessel_zero: no convergence for l=" + std::to_string(l) +
                                             " p=" + std::to_string(p));
                return x;
            }
        }
        a = b;
        fa = fb;
    }
    throw std::runtime_error("bessel_zero: bracketing failed");
}

} // namespace

double bessel_j(int l, double x) {
    if (l >= 0) return j_nonneg(l, x);
    double v = j_nonneg(-l, x);
    return (l & 1) ? -v : v;
}

double bessel_j_prime(int l, double x) {
    return 0.5 * (bessel_j(l - 1, x) - bessel_j(l + 1, x));
}

double bessel_zero(int l, int p) {
    if (l < 0 || p < 0) throw std::invalid_argument("bessel_zero: negative index");
    auto& t = table();
    const auto key = std::make_pair(l, p);
    {
        std::shared_lock lock(t.mu);
        auto it = t.entries.find(key);
        if (it != t.entries.end()) return it->second;
    }
    double z = find_zero(l, p);
    std::unique_lock lock(t.mu);
    t.entries.emplace(key, z);
    return z;
}

std::size_t zero_cache_size() {
    auto& t = table();
    std::shared_lock lock(t.mu);
    return t.entries.size();
}

} // namespace vh::specfun
