#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>

namespace fatou {

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline bool is_finite(const cdouble& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline bool is_finite(const CVec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!is_finite(v[i])) return false;
    return true;
}

// Deterministic generator for all sampling in the library and the test
// suites.  splitmix64 core; identical streams on every platform, unlike the
// <random> distributions.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() {  // [0,1)
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double normal() {
        // Box-Muller; discards the second variate for simplicity.
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    cdouble complex_normal() { return {normal(), normal()}; }

    // Uniform on the real (2n-1)-sphere of radius r in C^n.
    CVec sphere_point(int n, double r) {
        CVec v(n);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            v[i] = complex_normal();
            s += std::norm(v[i]);
        }
        s = std::sqrt(s);
        if (s < 1e-300) { v.setZero(); v[0] = r; return v; }
        return v * (r / s);
    }

    // Uniform in the ball of radius r in C^n.
    CVec ball_point(int n, double r) {
        double u = std::pow(uniform(), 1.0 / (2.0 * n));
        return sphere_point(n, r * u);
    }

private:
    uint64_t state_;
};

// %.17g round-trips doubles exactly through text.
std::string format_double(double x);
std::string format_complex(const cdouble& z);  // "re im"
std::string format_point(const CVec& v);       // "re,im;re,im"
CVec parse_point(const std::string& s);        // inverse of format_point

}  // namespace fatou
