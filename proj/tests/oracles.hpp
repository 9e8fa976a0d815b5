#pragma once

// Test-only reference results, independent of the library's own numerics.

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

using Complex = std::complex<double>;

// Closed-form free evolution of chi(x,t) = int dk exp(-dx^2 (k-k0)^2)
// exp(ik(x+x0)) exp(-i k^2 t/2m), by completing the square:
//   A = dx^2 + i t/2m,  B = 2 dx^2 k0 + i(x+x0),
//   chi = sqrt(pi/A) exp(B^2/4A - dx^2 k0^2).
inline Complex free_packet(double m, double k0, double dx, double x0, double x,
                           double t) {
    const Complex A(dx * dx, t / (2.0 * m));
    const Complex B(2.0 * dx * dx * k0, x + x0);
    return std::sqrt(std::numbers::pi / A) *
           std::exp(B * B / (4.0 * A) - dx * dx * k0 * k0);
}

// Clock-side transform int_0^inf dp exp(-dy^2 (p-p0)^2 + ip(y-t)), treated
// as a full-line Gaussian (valid when p0*dy >> 1).
inline Complex clock_packet(double p0, double dy, double y, double t) {
    const double v = y - t;
    return std::sqrt(std::numbers::pi) / dy *
           std::exp(Complex(-v * v / (4.0 * dy * dy), p0 * v));
}

// Brute-force midpoint double quadrature of N * int dk int dp f g phi for a
// supplied mode; deliberately simple and slow.
template <class Mode>
Complex brute_synthesize(double m, double k0, double dx, double x0, double p0,
                         double dy, Mode&& mode, double x, double y, double t,
                         int nk = 2000, int np = 2000) {
    (void)m;
    const double norm = std::sqrt(dx * dy / (2.0 * std::pow(std::numbers::pi, 3)));
    const double k_lo = k0 - 7.0 / (std::sqrt(2.0) * dx),
                 k_hi = k0 + 7.0 / (std::sqrt(2.0) * dx);
    const double p_lo = std::max(0.0, p0 - 7.0 / (std::sqrt(2.0) * dy)),
                 p_hi = p0 + 7.0 / (std::sqrt(2.0) * dy);
    const double hk = (k_hi - k_lo) / nk, hp = (p_hi - p_lo) / np;
    Complex acc = 0.0;
    for (int i = 0; i < nk; ++i) {
        const double k = k_lo + (i + 0.5) * hk;
        const Complex g = std::exp(Complex(-dx * dx * (k - k0) * (k - k0), k * x0));
        Complex inner = 0.0;
        for (int j = 0; j < np; ++j) {
            const double p = p_lo + (j + 0.5) * hp;
            const double f = std::exp(-dy * dy * (p - p0) * (p - p0));
            inner += f * mode(k, p, x, y, t);
        }
        acc += g * inner;
    }
    return norm * acc * hk * hp;
}

}  // namespace oracle
