#include "qtoa/clock_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qtoa {

namespace {
constexpr double kClearanceTol = 1e-3;  // free-flight mass allowed on x<0
constexpr double kPi = std::numbers::pi;
}  // namespace

double ClockChannel::flux_error() const {
    return std::norm(A_R) + (q / k) * std::norm(A_T) - 1.0;
}

ClockChannel channel(double k, double p, double m) {
    if (k == 0.0) throw DomainError("degenerate clock channel at k = 0");
    if (p < 0.0) throw DomainError("clock momentum must be >= 0");
    if (m <= 0.0) throw DomainError("mass must be positive");
    ClockChannel c;
    c.k = k;
    c.p = p;
    c.q = std::sqrt(k * k + 2.0 * m * p);
    c.omega = k * k / (2.0 * m) + p;
    c.A_T = 2.0 * k / (k + c.q);
    c.A_R = (k - c.q) / (k + c.q);
    return c;
}

double detection_probability(double E_k, double p) {
    if (E_k <= 0.0) throw DomainError("detection probability needs E_k > 0");
    if (p < 0.0) throw DomainError("clock momentum must be >= 0");
    const double se = std::sqrt(E_k), sep = std::sqrt(E_k + p);
    const double a = 2.0 * se / (se + sep);
    return (sep / se) * a * a;
}

ModeFn clock_mode(double m) {
    return [m](double k, double p, double x, double y, double t) -> Complex {
        const ClockChannel c = channel(k, p, m);
        const Complex clock_phase = std::exp(I * (p * y - c.omega * t));
        if (x < 0.0) {
            return (std::exp(I * k * x) + c.A_R * std::exp(-I * k * x)) * clock_phase;
        }
        return c.A_T * std::exp(I * c.q * x) * clock_phase;
    };
}

double appendix_gamma(const PacketSpec& s, double y) {
    const double a = s.m * s.dx / s.k0;
    const double b = y / (2.0 * s.k0 * s.dx);
    return s.dy * s.dy + a * a + b * b;
}

namespace {
// Smallest t at which the freely propagated packet has cleared x = 0 with
// margin (3.3 sigma -> < 5e-4 residual mass).
double clearance_time(const PacketSpec& s) {
    double t = s.m * (s.x0 + 3.3 * s.dx) / s.k0;
    for (int it = 0; it < 64; ++it) {
        const double w = std::sqrt(s.dx * s.dx + std::pow(t / (2.0 * s.m * s.dx), 2));
        const double t_next = s.m * (s.x0 + 3.3 * w) / s.k0;
        if (std::abs(t_next - t) < 1e-12 * t) return t_next;
        t = t_next;
    }
    return t;
}
}  // namespace

double late_time(const PacketSpec& s) {
    // Threshold formula, floored by the free-flight clearance check (the
    // formula alone underestimates for slowly moving, fast-spreading packets).
    const double formula = classical_toa(s) + 5.0 * s.m * s.dx / s.k0 + 5.0 * s.dy;
    return std::max(formula, clearance_time(s));
}

double late_time(const BimodalPacketSpec& s) {
    return std::max(late_time(s.component(0)), late_time(s.component(1)));
}

// --- histogram summaries ---------------------------------------------------

double ClockHistogram::mass() const {
    double acc = 0.0;
    for (double d : density) acc += d;
    return acc * bin_width();
}

double ClockHistogram::mean() const {
    double acc = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        acc += density[i] * center(i);
        tot += density[i];
    }
    return acc / tot;
}

double ClockHistogram::stddev() const {
    const double mu = mean();
    double acc = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        const double d = center(i) - mu;
        acc += density[i] * d * d;
        tot += density[i];
    }
    return std::sqrt(acc / tot);
}

double ClockHistogram::peak() const {
    const std::size_t i =
        std::max_element(density.begin(), density.end()) - density.begin();
    if (i == 0 || i + 1 == density.size()) return center(i);
    const double dm = density[i - 1], d0 = density[i], dp = density[i + 1];
    const double denom = dm - 2.0 * d0 + dp;
    if (denom >= 0.0) return center(i);
    return center(i) + 0.5 * bin_width() * (dm - dp) / denom;
}

// --- shared pieces -----------------------------------------------------------

namespace {

struct BinGrid {
    std::vector<double> edges;
    std::vector<double> centers;
    double width;
};

BinGrid make_bins(double lo, double hi, int n) {
    BinGrid b;
    b.width = (hi - lo) / n;
    b.edges.resize(n + 1);
    b.centers.resize(n);
    for (int i = 0; i <= n; ++i) b.edges[i] = lo + i * b.width;
    for (int i = 0; i < n; ++i) b.centers[i] = lo + (i + 0.5) * b.width;
    return b;
}

void clearance_check(const PacketSpec& s, double t) {
    const double center = -s.x0 + s.k0 * t / s.m;
    const double width =
        std::sqrt(s.dx * s.dx + std::pow(t / (2.0 * s.m * s.dx), 2));
    if (center < 0.0 || normal_upper_tail(center / width) > kClearanceTol)
        throw PrematureReadoutError(
            "incident packet has not cleared the detector; increase t");
}

// Span heuristic: classical arrival +- span_sigmas * sqrt(gamma).
std::pair<double, double> default_span(const PacketSpec& s, double sig) {
    const double tc = classical_toa(s);
    const double w = std::sqrt(appendix_gamma(s, tc));
    return {tc - sig * w, tc + sig * w};
}

std::pair<double, double> default_span(const BimodalPacketSpec& s, double sig) {
    const auto a = default_span(s.component(0), sig);
    const auto b = default_span(s.component(1), sig);
    return {std::min(a.first, b.first), std::max(a.second, b.second)};
}

struct ShellParams {
    double m = 1.0;
    double p0 = 1.0;
    double dy = 1.0;
    double norm_sq = 1.0;  // N^2
    int u_nodes = 160;
    int p_nodes = 160;
};

// Clock-side product envelope f(p) f*(p-u) = exp(-2 dy^2 (p-c)^2) *
// exp(-dy^2 u^2 / 2) with c = p0 + u/2.
AxisRule shell_p_axis(const ShellParams& sp, double u) {
    const double c = sp.p0 + 0.5 * u;
    const double sig = 1.0 / (2.0 * sp.dy);
    const double lo = std::max({0.0, u, c - 6.0 * sig});
    const double hi = c + 6.0 * sig;
    if (hi <= lo) return {};
    return gl_axis(lo, hi, sp.p_nodes);
}

// W(u) of the on-shell readout: rho(y) = int du W(u) exp(i u y), with the x
// integral done analytically (2 pi delta(q - q')) and the time phase exactly
// cancelling on the energy shell.
Complex shell_w(const Envelope& g, const AxisRule& k_axis, const ShellParams& sp,
                double u) {
    const double m = sp.m;
    const double k_hi = k_axis.hi();
    const double k_cut2 = k_hi * k_hi - 2.0 * m * u;
    if (k_cut2 <= 0.0) return 0.0;
    const double k_cut = std::sqrt(k_cut2);
    const AxisRule pa = shell_p_axis(sp, u);
    if (pa.size() == 0) return 0.0;

    Complex acc = 0.0;
    for (std::size_t i = 0; i < k_axis.size(); ++i) {
        const double k = k_axis.nodes[i];
        if (k <= 0.0 || k > k_cut) continue;
        const double kt = std::sqrt(k * k + 2.0 * m * u);
        const Complex gg = g(k) * std::conj(g(kt)) * k_axis.weights[i];
        if (gg == 0.0) continue;
        Complex inner = 0.0;
        for (std::size_t j = 0; j < pa.size(); ++j) {
            const double p = pa.nodes[j];
            const double pp = p - u;
            const double q = std::sqrt(k * k + 2.0 * m * p);
            const double at = 2.0 * k / (k + q);
            const double att = 2.0 * kt / (kt + q);  // q(kt, pp) == q on shell
            const double dp1 = p - sp.p0, dp2 = pp - sp.p0;
            const double ff = std::exp(-sp.dy * sp.dy * (dp1 * dp1 + dp2 * dp2));
            inner += pa.weights[j] * ff * at * att * (q / kt);
        }
        acc += gg * inner;
    }
    return 2.0 * kPi * sp.norm_sq * acc;
}

ClockHistogram shell_readout(const Envelope& g, const ShellParams& sp, double y_lo,
                             double y_hi, int bins) {
    // k axis restricted to right-movers; left-mover weight is negligible for
    // valid packets and carries no late-time transmitted flux.
    std::vector<Interval> support;
    for (auto iv : g.support) {
        iv.lo = std::max(iv.lo, 1e-9);
        if (iv.hi > iv.lo) support.push_back(iv);
    }
    if (support.empty()) throw DomainError("envelope has no k > 0 support");
    double total_len = 0.0;
    for (const auto& iv : support) total_len += iv.length();
    const int nk = std::max(128, int(48.0 * total_len / support.front().length()) * 4);
    const AxisRule k_axis = gl_axis_union(support, nk);

    const double k_lo = k_axis.lo(), k_hi = k_axis.hi();
    const double u_max_g = (k_hi * k_hi - k_lo * k_lo) / (2.0 * sp.m);
    const double u_max_f = 6.0 / sp.dy;  // exp(-dy^2 u^2/2) support
    const double u_max = std::min(u_max_g, u_max_f);

    // Node count follows the fastest phase u*y over the span.
    const double rate = std::max(std::abs(y_lo), std::abs(y_hi));
    const int nu = std::clamp(int(0.7 * u_max * rate) + sp.u_nodes, sp.u_nodes, 6000);
    const AxisRule u_axis = gl_axis(0.0, u_max, nu);

    std::vector<Complex> w_u(u_axis.size());
    for (std::size_t j = 0; j < u_axis.size(); ++j)
        w_u[j] = shell_w(g, k_axis, sp, u_axis.nodes[j]);
    const Complex w0 = shell_w(g, k_axis, sp, 0.0);

    BinGrid bg = make_bins(y_lo, y_hi, bins);
    ClockHistogram h;
    h.edges = bg.edges;
    h.density.assign(bins, 0.0);
    for (int i = 0; i < bins; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < u_axis.size(); ++j) {
            const double u = u_axis.nodes[j];
            const Complex ph = std::exp(I * u * bg.centers[i]) * sinc(0.5 * u * bg.width);
            acc += 2.0 * u_axis.weights[j] * std::real(w_u[j] * ph);
        }
        h.density[i] = acc;
    }
    h.detection_weight = 2.0 * kPi * std::real(w0);
    h.t = std::numeric_limits<double>::infinity();
    return h;
}

struct XGridParams {
    double m = 1.0;
    double p0 = 1.0;
    double dy = 1.0;
    double norm_sq = 1.0;
    double x0 = 10.0;  // for span sizing
    double dx = 1.0;
};

// Node counts the finite-time route would need; used both to run it and to
// decide (in Auto mode) whether the energy-shell route is cheaper.
struct XGridSizing {
    int n_p = 0;   // clock nodes resolving exp(ip(y-t))
    int n_k = 0;   // particle nodes resolving the transmitted phase anywhere
                   // on the x grid
    int n_x = 0;   // x nodes resolving channel beats and the envelope
    double x_hi = 0.0;

    bool affordable() const {
        const double cost = double(n_p) * n_p * n_x + double(n_p) * n_x * n_k;
        return n_p <= 1024 && n_k <= 4096 && n_x <= 20000 && cost < 4e8;
    }
};

XGridSizing xgrid_sizing(const QuadratureGrid& grid, const XGridParams& xp, double t,
                         double y_lo, double y_hi) {
    XGridSizing sz;
    const double m = xp.m;
    const double k_lo = std::max(grid.k_axis.lo(), 1e-3), k_hi = grid.k_axis.hi();
    const double p_lo = grid.p_axis.lo(), p_hi = grid.p_axis.hi();

    const double rate_p = std::max(std::abs(y_lo - t), std::abs(y_hi - t));
    sz.n_p = std::max<int>(int(0.8 * (p_hi - p_lo) * rate_p) + 32,
                           int(grid.p_axis.size()));

    const double w_t = std::sqrt(xp.dx * xp.dx + std::pow(t / (2.0 * m * xp.dx), 2));
    double x_hi = 20.0 * w_t;
    for (double k : {k_lo, k_hi})
        for (double p : {p_lo, p_hi}) {
            const double q = std::sqrt(k * k + 2.0 * m * p);
            x_hi = std::max(x_hi, (q / k) * (k * t / m - xp.x0) + 10.0 * w_t * q / k);
        }
    sz.x_hi = x_hi;

    // Worst transmitted-phase rate d theta/dk over the x window and support.
    double rate_k = 0.0;
    for (double k : {k_lo, k_hi})
        for (double p : {p_lo, p_hi}) {
            const double q = std::sqrt(k * k + 2.0 * m * p);
            rate_k = std::max(rate_k, std::abs(xp.x0 - k * t / m));
            rate_k = std::max(rate_k,
                              std::abs((k / q) * x_hi + xp.x0 - k * t / m));
        }
    const double cycles = rate_k * (k_hi - k_lo) / (2.0 * kPi);
    sz.n_k = std::max<int>(int(3.6 * cycles) + 64, int(grid.k_axis.size()));

    const double q_lo = std::sqrt(k_lo * k_lo + 2.0 * m * p_lo);
    const double beat = m * (p_hi - p_lo) / q_lo;
    const double res = std::min(2.0 * kPi / std::max(beat, 1e-30) / 6.0, w_t / 6.0);
    sz.n_x = std::clamp(int(x_hi / res), 256, 20000);
    return sz;
}

// Finite-time readout: build the transmitted field per clock channel on an
// x > 0 quadrature grid, then overlap channels.
ClockHistogram xgrid_readout(const Envelope& g, const QuadratureGrid& grid,
                             const XGridParams& xp, double t, double y_lo, double y_hi,
                             int bins) {
    const double m = xp.m;
    const XGridSizing sz = xgrid_sizing(grid, xp, t, y_lo, y_hi);
    if (!sz.affordable())
        throw ResolutionError("x-grid readout would need an unaffordable grid; "
                              "use the energy-shell route");
    const AxisRule ka = sz.n_k > int(grid.k_axis.size())
                            ? gl_axis_union(grid.k_axis.intervals, sz.n_k)
                            : grid.k_axis;
    const AxisRule pa = sz.n_p > int(grid.p_axis.size())
                            ? gl_axis_union(grid.p_axis.intervals, sz.n_p)
                            : grid.p_axis;
    const AxisRule xa = gl_axis(0.0, sz.x_hi, sz.n_x);

    const std::size_t np = pa.size(), nxs = xa.size();
    std::vector<Complex> phi(np * nxs);
    for (std::size_t j = 0; j < np; ++j) {
        const double p = pa.nodes[j];
        for (std::size_t i = 0; i < ka.size(); ++i) {
            const double k = ka.nodes[i];
            if (k == 0.0) continue;
            const double q = std::sqrt(std::max(0.0, k * k + 2.0 * m * p));
            const Complex amp = ka.weights[i] * g(k) * (2.0 * k / (k + q)) *
                                std::exp(-I * (k * k / (2.0 * m)) * t);
            if (amp == 0.0) continue;
            for (std::size_t ix = 0; ix < nxs; ++ix)
                phi[j * nxs + ix] += amp * std::exp(I * q * xa.nodes[ix]);
        }
    }

    // Channel overlaps on x > 0 (hermitian, upper triangle suffices).
    std::vector<Complex> G(np * np);
    for (std::size_t j = 0; j < np; ++j) {
        for (std::size_t l = j; l < np; ++l) {
            Complex acc = 0.0;
            const Complex* a = &phi[j * nxs];
            const Complex* b = &phi[l * nxs];
            for (std::size_t ix = 0; ix < nxs; ++ix)
                acc += xa.weights[ix] * a[ix] * std::conj(b[ix]);
            G[j * np + l] = acc;
        }
    }

    std::vector<double> wf(np);
    for (std::size_t j = 0; j < np; ++j) {
        const double d = pa.nodes[j] - xp.p0;
        wf[j] = pa.weights[j] * std::exp(-xp.dy * xp.dy * d * d);
    }

    BinGrid bg = make_bins(y_lo, y_hi, bins);
    ClockHistogram h;
    h.edges = bg.edges;
    h.density.assign(bins, 0.0);
    double diag = 0.0;
    for (std::size_t j = 0; j < np; ++j) diag += wf[j] * wf[j] * std::real(G[j * np + j]);
    for (int i = 0; i < bins; ++i) {
        const double yc = bg.centers[i] - t;
        double acc = diag;
        for (std::size_t j = 0; j < np; ++j) {
            for (std::size_t l = j + 1; l < np; ++l) {
                const double dp = pa.nodes[j] - pa.nodes[l];
                const Complex ph = std::exp(I * dp * yc) * sinc(0.5 * dp * bg.width);
                acc += 2.0 * wf[j] * wf[l] * std::real(G[j * np + l] * ph);
            }
        }
        h.density[i] = xp.norm_sq * acc;
    }

    double parseval = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
        const double d = pa.nodes[j] - xp.p0;
        parseval += pa.weights[j] * std::exp(-2.0 * xp.dy * xp.dy * d * d) *
                    std::real(G[j * np + j]);
    }
    h.detection_weight = 2.0 * kPi * xp.norm_sq * parseval;
    h.t = t;
    return h;
}

ReadoutRoute pick_route(const QuadratureGrid& grid, const XGridParams& xp, double t,
                        double y_lo, double y_hi) {
    return xgrid_sizing(grid, xp, t, y_lo, y_hi).affordable()
               ? ReadoutRoute::XGrid
               : ReadoutRoute::EnergyShell;
}

}  // namespace

ClockHistogram readout_distribution(const PacketSpec& s, double t,
                                    const QuadratureGrid& grid, ReadoutOptions opt) {
    s.validate();
    if (!opt.skip_late_time_check) clearance_check(s, t);
    auto [lo, hi] = default_span(s, opt.span_sigmas);
    if (opt.y_lo) lo = *opt.y_lo;
    if (opt.y_hi) hi = *opt.y_hi;

    const XGridParams xp{s.m, s.p0, s.dy, normalization(s) * normalization(s),
                         s.x0, s.dx};
    ReadoutRoute route = opt.route;
    if (route == ReadoutRoute::Auto) route = pick_route(grid, xp, t, lo, hi);

    ClockHistogram h;
    if (route == ReadoutRoute::XGrid) {
        h = xgrid_readout(envelope_of(s), grid, xp, t, lo, hi, opt.bins);
    } else {
        ShellParams sp{s.m, s.p0, s.dy, xp.norm_sq, opt.shell_u_nodes,
                       opt.shell_p_nodes};
        h = shell_readout(envelope_of(s), sp, lo, hi, opt.bins);
    }
    h.clock_tail_mass = s.clock_tail_mass();
    return h;
}

ClockHistogram readout_distribution(const BimodalPacketSpec& s, double t,
                                    const QuadratureGrid& grid, ReadoutOptions opt) {
    s.validate();
    if (!opt.skip_late_time_check) {
        clearance_check(s.component(0), t);
        clearance_check(s.component(1), t);
    }
    auto [lo, hi] = default_span(s, opt.span_sigmas);
    if (opt.y_lo) lo = *opt.y_lo;
    if (opt.y_hi) hi = *opt.y_hi;

    const XGridParams xp{s.m, s.p0, s.dy, normalization(s) * normalization(s),
                         s.x0, s.dx};
    ReadoutRoute route = opt.route;
    if (route == ReadoutRoute::Auto) route = pick_route(grid, xp, t, lo, hi);

    ClockHistogram h;
    if (route == ReadoutRoute::XGrid) {
        h = xgrid_readout(envelope_of(s), grid, xp, t, lo, hi, opt.bins);
    } else {
        ShellParams sp{s.m, s.p0, s.dy, xp.norm_sq, opt.shell_u_nodes,
                       opt.shell_p_nodes};
        h = shell_readout(envelope_of(s), sp, lo, hi, opt.bins);
    }
    h.clock_tail_mass = s.component(0).clock_tail_mass();
    return h;
}

ClockHistogram readout_distribution(const Envelope& g, double m, double p0, double dy,
                                    const QuadratureGrid& grid, ReadoutOptions opt) {
    if (!opt.y_lo || !opt.y_hi)
        throw DomainError("custom-envelope readout needs an explicit y span");
    // Unit-norm prefactor for an arbitrary envelope.
    const double ig = grid.k_axis.integrate([&](double k) { return std::norm(g(k)); });
    const double iff = std::sqrt(kPi / 2.0) / dy;  // full-line |f|^2 norm
    const double n2 = 1.0 / (4.0 * kPi * kPi * ig * iff);
    ShellParams sp{m, p0, dy, n2, opt.shell_u_nodes, opt.shell_p_nodes};
    ClockHistogram h = shell_readout(g, sp, *opt.y_lo, *opt.y_hi, opt.bins);
    h.clock_tail_mass = normal_upper_tail(2.0 * p0 * dy);
    return h;
}

double detection_weight_flux(const Envelope& g, double m, double norm_sq_prefactor,
                             double p0, double dy, const QuadratureGrid& grid) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.k_axis.size(); ++i) {
        const double k = grid.k_axis.nodes[i];
        if (k <= 0.0) continue;
        const double gw = grid.k_axis.weights[i] * std::norm(g(k));
        if (gw == 0.0) continue;
        double inner = 0.0;
        for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
            const double p = grid.p_axis.nodes[j];
            const double q = std::sqrt(k * k + 2.0 * m * p);
            const double at = 2.0 * k / (k + q);
            const double d = p - p0;
            inner += grid.p_axis.weights[j] * std::exp(-2.0 * dy * dy * d * d) *
                     (q / k) * at * at;
        }
        acc += gw * inner;
    }
    return 4.0 * kPi * kPi * norm_sq_prefactor * acc;
}

double detection_weight_flux(const PacketSpec& s, const QuadratureGrid& grid) {
    const double n = normalization(s);
    return detection_weight_flux(envelope_of(s), s.m, n * n, s.p0, s.dy, grid);
}

PhasePeaks phase_peaks(const PacketSpec& s, double t) {
    PhasePeaks r;
    r.q0 = std::sqrt(s.k0 * s.k0 + 2.0 * s.m * s.p0);
    r.x_peak = -(r.q0 / s.k0) * s.x0 + r.q0 * t / s.m;
    r.y_peak = t - s.m * r.x_peak / r.q0;
    r.predicted_arrival = s.m * s.x0 / s.k0;
    return r;
}

std::vector<TwoPeakRow> two_peak_experiment(const BimodalPacketSpec& base,
                                            std::span<const double> dy_sweep,
                                            ReadoutOptions opt) {
    base.validate();
    const double pdy = base.p0 * base.dy;  // kept fixed across the sweep
    std::vector<TwoPeakRow> rows;
    for (double dy : dy_sweep) {
        BimodalPacketSpec s = base;
        s.dy = dy;
        s.p0 = pdy / dy;
        const PacketSpec slow = s.component(0), fast = s.component(1);
        const double t1 = classical_toa(slow), t2 = classical_toa(fast);
        const double w1 = std::sqrt(appendix_gamma(slow, t1));
        const double w2 = std::sqrt(appendix_gamma(fast, t2));
        if (t1 - t2 <= 3.0 * std::max(w1, w2))
            throw UnresolvablePeaksError("arrival peaks closer than 3 widths");

        ReadoutOptions o = opt;
        o.y_lo = t2 - 6.0 * w2;
        o.y_hi = t1 + 6.0 * w1;
        const double t = late_time(s);
        ClockHistogram h = readout_distribution(s, t, make_grid(s), o);

        double lo1 = t1 - 3.0 * w1, hi1 = t1 + 3.0 * w1;
        double lo2 = t2 - 3.0 * w2, hi2 = t2 + 3.0 * w2;
        if (hi2 > lo1) hi2 = lo1 = 0.5 * (t1 + t2);

        TwoPeakRow row;
        row.dy = dy;
        row.p0 = s.p0;
        for (std::size_t i = 0; i < h.bins(); ++i) {
            const double yc = h.center(i);
            if (yc >= lo1 && yc <= hi1) row.mass_slow += h.density[i] * h.bin_width();
            if (yc >= lo2 && yc <= hi2) row.mass_fast += h.density[i] * h.bin_width();
        }
        row.ratio = row.mass_slow / row.mass_fast;

        // f^2-averaged detection probability per component.
        auto avg_T = [&](double E) {
            const AxisRule pa =
                gl_axis(std::max(0.0, s.p0 - 6.0 / (std::sqrt(2.0) * dy)),
                        s.p0 + 6.0 / (std::sqrt(2.0) * dy), 256);
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < pa.size(); ++j) {
                const double p = pa.nodes[j];
                const double d = p - s.p0;
                const double f2 = std::exp(-2.0 * dy * dy * d * d);
                num += pa.weights[j] * f2 * detection_probability(E, p);
                den += pa.weights[j] * f2;
            }
            return num / den;
        };
        const double E1 = s.k1 * s.k1 / (2.0 * s.m), E2 = s.k2 * s.k2 / (2.0 * s.m);
        row.predicted_ratio = (s.w1 * avg_T(E1)) / (s.w2 * avg_T(E2));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qtoa
