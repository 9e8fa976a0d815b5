#include "qtoa/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "qtoa/errors.hpp"

namespace qtoa {

namespace {

std::pair<std::vector<double>, std::vector<double>> compute_gl(int n) {
    // Newton iteration on Legendre polynomials, nodes seeded by the Chebyshev
    // approximation. Standard construction, accurate to ~1e-15 for n <= 1024.
    std::vector<double> x(n), w(n);
    const int mid = (n + 1) / 2;
    for (int i = 0; i < mid; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return {x, w};
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
    return it->second;
}

AxisRule gl_axis(double lo, double hi, int n) {
    return gl_axis_union({{lo, hi}}, n);
}

AxisRule gl_axis_union(std::vector<Interval> parts, int n_total, int max_panel_nodes) {
    if (parts.empty() || n_total < 2) throw DomainError("empty quadrature axis");
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged{parts.front()};
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i].lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, parts[i].hi);
        else
            merged.push_back(parts[i]);
    }
    double total_len = 0.0;
    for (const auto& iv : merged) total_len += iv.length();

    AxisRule rule;
    rule.intervals = merged;
    for (const auto& iv : merged) {
        int n = std::max(4, int(std::lround(n_total * iv.length() / total_len)));
        // Composite panels keep the polynomial order moderate.
        const int panels = (n + max_panel_nodes - 1) / max_panel_nodes;
        const int per = (n + panels - 1) / panels;
        const auto& [xs, ws] = gauss_legendre(per);
        const double h = iv.length() / panels;
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double a = iv.lo + pnl * h;
            for (int j = 0; j < per; ++j) {
                rule.nodes.push_back(a + 0.5 * h * (xs[j] + 1.0));
                rule.weights.push_back(0.5 * h * ws[j]);
            }
        }
    }
    return rule;
}

AxisRule AxisRule::shrunk(double keep_fraction) const {
    AxisRule out;
    out.intervals = intervals;
    for (auto& iv : out.intervals) {
        const double c = 0.5 * (iv.lo + iv.hi), r = 0.5 * iv.length() * keep_fraction;
        iv = {c - r, c + r};
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const auto& iv : out.intervals) {
            if (nodes[i] >= iv.lo && nodes[i] <= iv.hi) {
                out.nodes.push_back(nodes[i]);
                out.weights.push_back(weights[i]);
                break;
            }
        }
    }
    return out;
}

Interval envelope_interval(double center, double sigma, double radius, double clip_lo) {
    Interval iv{center - radius * sigma, center + radius * sigma};
    iv.lo = std::max(iv.lo, clip_lo);
    if (iv.hi <= iv.lo) throw DomainError("envelope interval collapsed by clipping");
    return iv;
}

Complex filon_oscillatory(const std::function<Complex(double)>& f, double lo, double hi,
                          double x, int panels) {
    // Per panel, f is replaced by its quadratic interpolant at the endpoints
    // and midpoint; moments int u^j e^{i theta u} du on [-1,1] are exact.
    const double h = (hi - lo) / panels;
    Complex total = 0.0;
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a = lo + pnl * h;
        const double c = a + 0.5 * h;  // panel center
        const double half = 0.5 * h;
        const double theta = x * half;
        const Complex f0 = f(a), f1 = f(c), f2 = f(a + h);
        // Quadratic through u = -1, 0, +1: A + B u + C u^2.
        const Complex A = f1;
        const Complex B = 0.5 * (f2 - f0);
        const Complex C = 0.5 * (f2 + f0) - f1;
        Complex M0, M1, M2;
        if (std::abs(theta) < 0.3) {
            // Series in theta; enough terms for < 1e-14 at |theta| = 0.3.
            const double t2 = theta * theta;
            const double t4 = t2 * t2;
            const double t6 = t4 * t2;
            M0 = 2.0 * (1.0 - t2 / 6.0 + t4 / 120.0 - t6 / 5040.0);
            M1 = I * 2.0 * theta * (1.0 / 3.0 - t2 / 30.0 + t4 / 840.0 - t6 / 45360.0);
            M2 = 2.0 * (1.0 / 3.0 - t2 / 10.0 + t4 / 168.0 - t6 / 6480.0);
        } else {
            const double s = std::sin(theta), co = std::cos(theta);
            M0 = 2.0 * s / theta;
            M1 = I * 2.0 * (s / (theta * theta) - co / theta);
            M2 = 2.0 * ((2.0 / (theta * theta) - 1.0) * s / theta -
                        2.0 * co / (theta * theta));
        }
        const Complex phase = std::exp(I * x * c);
        total += half * phase * (A * M0 + B * M1 + C * M2);
    }
    return total;
}

}  // namespace qtoa
