#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qtoa/util.hpp"

namespace qtoa {

// Gauss-Legendre nodes/weights on [-1, 1]; results are cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

// Quadrature rule along one axis: Gauss-Legendre nodes distributed over a
// union of disjoint intervals (one per Gaussian envelope component, merged
// when they overlap).
struct AxisRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<Interval> intervals;

    std::size_t size() const { return nodes.size(); }
    double lo() const { return intervals.front().lo; }
    double hi() const { return intervals.back().hi; }

    // Drops nodes outside the central `keep_fraction` of each interval.
    // Used by the truncation-adequacy check.
    AxisRule shrunk(double keep_fraction) const;

    template <class F>
    auto integrate(F&& f) const -> decltype(f(0.0)) {
        using R = decltype(f(0.0));
        R acc{};
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

// Plain Gauss-Legendre rule with n nodes on [lo, hi].
AxisRule gl_axis(double lo, double hi, int n);

// Nodes over the union of the given intervals (merged if overlapping),
// distributing `n_total` nodes proportionally to interval length. Composite
// panels of at most `max_panel_nodes` nodes keep high polynomial accuracy.
AxisRule gl_axis_union(std::vector<Interval> parts, int n_total, int max_panel_nodes = 48);

// Interval center ± radius*sigma, optionally clipped from below (used for
// the positive-momentum half line).
Interval envelope_interval(double center, double sigma, double radius,
                           double clip_lo = -1e300);

// Integrates f(k) * exp(i*k*x) over [lo, hi] with a Filon-type rule: f is
// interpolated by a quadratic on each panel and the oscillatory moments are
// integrated exactly, so accuracy is independent of how fast exp(ikx) spins.
Complex filon_oscillatory(const std::function<Complex(double)>& f, double lo, double hi,
                          double x, int panels);

}  // namespace qtoa
