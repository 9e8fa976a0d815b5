#include "qtoa/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qtoa {

namespace {

constexpr double kPi = std::numbers::pi;

struct Tridiag {
    std::vector<Complex> lower, diag, upper;  // lower[0], upper[n-1] unused

    std::size_t size() const { return diag.size(); }
};

std::vector<Complex> tri_mul(const Tridiag& A, const std::vector<Complex>& v) {
    const std::size_t n = v.size();
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc = A.diag[i] * v[i];
        if (i > 0) acc += A.lower[i] * v[i - 1];
        if (i + 1 < n) acc += A.upper[i] * v[i + 1];
        out[i] = acc;
    }
    return out;
}

void thomas_solve(const Tridiag& A, std::vector<Complex>& rhs) {
    const std::size_t n = rhs.size();
    std::vector<Complex> c(n);
    Complex beta = A.diag[0];
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        c[i] = A.upper[i - 1] / beta;
        beta = A.diag[i] - A.lower[i] * c[i];
        rhs[i] = (rhs[i] - A.lower[i] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i + 1] * rhs[i + 1];
}

// Numerov mass matrix applied to v (identity when enabled = false).
std::vector<Complex> numerov_apply(const std::vector<Complex>& v, bool enabled) {
    if (!enabled) return v;
    const std::size_t n = v.size();
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc = (5.0 / 6.0) * v[i];
        if (i > 0) acc += v[i - 1] / 12.0;
        if (i + 1 < n) acc += v[i + 1] / 12.0;
        out[i] = acc;
    }
    return out;
}

double metric_mass(const std::vector<Complex>& v, double h, bool numerov, double x_lo,
                   double hx, double split_lo, double split_hi) {
    const std::vector<Complex> mv = numerov_apply(v, numerov);
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = x_lo + i * hx;
        if (x >= split_lo && x < split_hi)
            acc += std::real(std::conj(v[i]) * mv[i]);
    }
    return acc * h;
}

struct Stepper {
    Tridiag A, B;     // A psi^{n+1} = B psi^n
    bool numerov = true;
    double h = 0.0;
    std::vector<double> gamma;  // absorber profile

    void build(const GridConfig& g, const std::vector<Complex>& U, double m, double dt,
               bool use_numerov) {
        numerov = use_numerov;
        h = g.h();
        const std::size_t n = U.size();
        const double koff = -1.0 / (2.0 * m * h * h);
        const double kdiag = 1.0 / (m * h * h);
        Tridiag H;
        H.lower.resize(n);
        H.diag.resize(n);
        H.upper.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (numerov) {
                H.diag[i] = kdiag + (5.0 / 6.0) * U[i];
                if (i > 0) H.lower[i] = koff + (U[i] + U[i - 1]) / 24.0;
                if (i + 1 < n) H.upper[i] = koff + (U[i] + U[i + 1]) / 24.0;
            } else {
                H.diag[i] = kdiag + U[i];
                if (i > 0) H.lower[i] = koff;
                if (i + 1 < n) H.upper[i] = koff;
            }
        }
        const double mdiag = numerov ? 5.0 / 6.0 : 1.0;
        const double moff = numerov ? 1.0 / 12.0 : 0.0;
        const Complex z = I * 0.5 * dt;
        A.lower.resize(n); A.diag.resize(n); A.upper.resize(n);
        B.lower.resize(n); B.diag.resize(n); B.upper.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            A.diag[i] = mdiag + z * H.diag[i];
            B.diag[i] = mdiag - z * H.diag[i];
            if (i > 0) {
                A.lower[i] = moff + z * H.lower[i];
                B.lower[i] = moff - z * H.lower[i];
            }
            if (i + 1 < n) {
                A.upper[i] = moff + z * H.upper[i];
                B.upper[i] = moff - z * H.upper[i];
            }
        }
    }

    void step(std::vector<Complex>& psi) const {
        std::vector<Complex> rhs = tri_mul(B, psi);
        thomas_solve(A, rhs);
        psi.swap(rhs);
    }

    double norm(const std::vector<Complex>& psi) const {
        double acc = 0.0;
        const std::vector<Complex> mp = numerov_apply(psi, numerov);
        for (std::size_t i = 0; i < psi.size(); ++i)
            acc += std::real(std::conj(psi[i]) * mp[i]);
        return acc * h;
    }
};

std::vector<double> absorber_profile(const GridConfig& g) {
    std::vector<double> gamma(g.n_x, 0.0);
    if (g.absorber_strength <= 0.0) return gamma;
    const double w = g.absorber_frac * (g.x_hi - g.x_lo);
    for (int i = 0; i < g.n_x; ++i) {
        const double x = g.x_at(i);
        if (x < g.x_lo + w)
            gamma[i] = g.absorber_strength * std::pow((g.x_lo + w - x) / w, 3);
        else if (x > g.x_hi - w)
            gamma[i] = g.absorber_strength * std::pow((x - (g.x_hi - w)) / w, 3);
    }
    return gamma;
}

double gradual_potential(double x, double x_A) {
    if (x <= -x_A) return -x_A * x_A / (x * x);
    return -1.0;
}

}  // namespace

GridConfig make_grid_config(double x_lo, double x_hi, double q_max, double dt,
                            int pts_per_wavelength) {
    GridConfig g;
    g.x_lo = x_lo;
    g.x_hi = x_hi;
    const double lam = 2.0 * kPi / q_max;
    g.n_x = std::max(256, int((x_hi - x_lo) / (lam / pts_per_wavelength)) + 1);
    g.dt = dt;
    return g;
}

double GridState::norm_sq(const GridConfig& g) const {
    double acc = metric_mass(up, g.h(), numerov_metric, g.x_lo, g.h(), -1e300, 1e300);
    if (!down.empty())
        acc += metric_mass(down, g.h(), numerov_metric, g.x_lo, g.h(), -1e300, 1e300);
    return acc;
}

double GridState::mass_right(const GridConfig& g, double x_split) const {
    double acc = metric_mass(up, g.h(), numerov_metric, g.x_lo, g.h(), x_split, 1e300);
    if (!down.empty())
        acc += metric_mass(down, g.h(), numerov_metric, g.x_lo, g.h(), x_split, 1e300);
    return acc;
}

double GridState::mass_left(const GridConfig& g, double x_split) const {
    double acc = metric_mass(up, g.h(), numerov_metric, g.x_lo, g.h(), -1e300, x_split);
    if (!down.empty())
        acc += metric_mass(down, g.h(), numerov_metric, g.x_lo, g.h(), -1e300, x_split);
    return acc;
}

double GridState::mass_down(const GridConfig& g) const {
    if (down.empty()) return 0.0;
    return metric_mass(down, g.h(), numerov_metric, g.x_lo, g.h(), -1e300, 1e300);
}

double GridState::ledger_error(const GridConfig& g) const {
    return norm_sq(g) + absorbed_left + absorbed_right - norm0;
}

std::vector<Complex> initial_packet(const PacketSpec& packet, const GridConfig& grid) {
    // Amplitude convention sqrt(pi)/dx * exp(ik0(x+x0) - (x+x0)^2/4dx^2),
    // matching int dk g(k) e^{ikx} so channel fields recombine with the same
    // normalization as the quadrature synthesis.
    std::vector<Complex> psi(grid.n_x);
    const double a = std::sqrt(kPi) / packet.dx;
    for (int i = 0; i < grid.n_x; ++i) {
        const double u = grid.x_at(i) + packet.x0;
        psi[i] = a * std::exp(Complex(-u * u / (4.0 * packet.dx * packet.dx),
                                      packet.k0 * u));
    }
    return psi;
}

GridState evolve_channel(PotentialKind kind, const ChannelParams& cp,
                         const PacketSpec& packet, const GridConfig& grid,
                         double t_final) {
    const double m = packet.m;
    const int n = grid.n_x;
    const double h = grid.h();
    const bool two_comp = (kind == PotentialKind::SpinTriggerClock);
    const bool use_numerov = !two_comp;

    const std::vector<double> gamma = absorber_profile(grid);
    auto base_potential = [&](double x) -> double {
        switch (kind) {
            case PotentialKind::StepClock: return x < 0.0 ? cp.p : 0.0;
            case PotentialKind::Gradual: return cp.p * gradual_potential(x, cp.x_A);
            case PotentialKind::SharpStep: return x >= cp.x_step ? -cp.p : 0.0;
            default: return 0.0;
        }
    };

    const double delta_w = cp.delta_width_cells * h;
    auto delta_gauss = [&](double x) {
        return std::exp(-x * x / (2.0 * delta_w * delta_w)) /
               (delta_w * std::sqrt(2.0 * kPi));
    };

    const int steps = std::max(1, int(std::lround(t_final / grid.dt)));
    const double dt = t_final / steps;

    GridState st;
    st.numerov_metric = use_numerov;
    st.up = initial_packet(packet, grid);

    Stepper s_up, s_down;
    std::vector<double> theta;  // Strang kick half-angles
    if (!two_comp) {
        std::vector<Complex> U(n);
        for (int i = 0; i < n; ++i)
            U[i] = Complex(base_potential(grid.x_at(i)) - grid.gauge_energy,
                           -gamma[i]);
        s_up.build(grid, U, m, dt, use_numerov);
    } else {
        st.down.assign(n, 0.0);
        std::vector<Complex> Uu(n), Ud(n);
        theta.resize(n);
        for (int i = 0; i < n; ++i) {
            const double x = grid.x_at(i);
            const double dg = delta_gauss(x);
            Uu[i] = Complex(cp.p + 0.5 * cp.alpha * dg - grid.gauge_energy, -gamma[i]);
            Ud[i] = Complex(0.5 * cp.alpha * dg - grid.gauge_energy, -gamma[i]);
            theta[i] = 0.5 * cp.alpha * dg * 0.5 * dt;
        }
        s_up.build(grid, Uu, m, dt, false);
        s_down.build(grid, Ud, m, dt, false);
    }

    auto total_norm = [&]() {
        double acc = s_up.norm(st.up);
        if (two_comp) acc += s_up.norm(st.down);  // plain metric, same for both
        return acc;
    };
    st.norm0 = total_norm();

    auto kick = [&]() {
        for (int i = 0; i < n; ++i) {
            if (theta[i] < 1e-300) continue;
            const double c = std::cos(theta[i]), s = std::sin(theta[i]);
            const Complex u = st.up[i], d = st.down[i];
            st.up[i] = c * u - I * s * d;
            st.down[i] = c * d - I * s * u;
        }
    };

    double norm_prev = st.norm0;
    for (int step = 0; step < steps; ++step) {
        if (!two_comp) {
            s_up.step(st.up);
        } else {
            kick();
            s_up.step(st.up);
            s_down.step(st.down);
            kick();
        }
        const double norm_now = total_norm();
        const double drop = norm_prev - norm_now;

        // Split the absorbed probability by absorber-side weight.
        double gl = 0.0, gr = 0.0;
        const double mid = 0.5 * (grid.x_lo + grid.x_hi);
        for (int i = 0; i < n; ++i) {
            if (gamma[i] == 0.0) continue;
            double w = gamma[i] * std::norm(st.up[i]);
            if (two_comp) w += gamma[i] * std::norm(st.down[i]);
            (grid.x_at(i) < mid ? gl : gr) += w;
        }
        if (gl + gr > 0.0) {
            st.absorbed_left += drop * gl / (gl + gr);
            st.absorbed_right += drop * gr / (gl + gr);
        } else if (std::abs(drop) > 1e-12 * st.norm0) {
            throw ResolutionError("norm drift per step exceeded 1e-12 with "
                                  "absorbers inactive");
        }
        norm_prev = norm_now;
    }
    st.t = t_final;
    return st;
}

FluxSplit flux_split(const GridState& s, const GridConfig& g, double x_split) {
    FluxSplit f;
    f.transmitted = (s.mass_right(g, x_split) + s.absorbed_right) / s.norm0;
    f.reflected = (s.mass_left(g, x_split) + s.absorbed_left) / s.norm0;
    return f;
}

ClockHistogram reconstruct_readout(std::span<const GridState> channels,
                                   std::span<const double> p_nodes,
                                   std::span<const double> p_weights,
                                   const PacketSpec& spec, const GridConfig& grid,
                                   double y_lo, double y_hi, int bins) {
    const std::size_t np = channels.size();
    if (np == 0 || p_nodes.size() != np || p_weights.size() != np)
        throw DomainError("channel/node bookkeeping mismatch");
    for (const auto& c : channels) {
        if (std::abs(c.t - channels[0].t) > 1e-12)
            throw DomainError("channels evolved to different times");
        if (std::abs(c.absorbed_left) + std::abs(c.absorbed_right) > 1e-8)
            throw DomainError("channels lost probability to the absorbers; "
                              "enlarge the grid for readout reconstruction");
    }

    const double h = grid.h();
    // Overlaps on x > 0 in the scheme metric.
    std::vector<std::vector<Complex>> mchan(np);
    for (std::size_t j = 0; j < np; ++j)
        mchan[j] = numerov_apply(channels[j].up, channels[j].numerov_metric);
    std::vector<Complex> G(np * np);
    for (std::size_t j = 0; j < np; ++j) {
        for (std::size_t l = j; l < np; ++l) {
            Complex acc = 0.0;
            for (int i = 0; i < grid.n_x; ++i) {
                if (grid.x_at(i) <= 0.0) continue;
                acc += std::conj(channels[j].up[i]) * mchan[l][i];
            }
            G[j * np + l] = acc * h;
        }
    }

    const double n2 = normalization(spec) * normalization(spec);
    std::vector<double> wf(np);
    for (std::size_t j = 0; j < np; ++j) {
        const double d = p_nodes[j] - spec.p0;
        wf[j] = p_weights[j] * std::exp(-spec.dy * spec.dy * d * d);
    }

    ClockHistogram out;
    const double width = (y_hi - y_lo) / bins;
    out.edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i) out.edges[i] = y_lo + i * width;
    out.density.assign(bins, 0.0);
    double diag = 0.0;
    for (std::size_t j = 0; j < np; ++j) diag += wf[j] * wf[j] * std::real(G[j * np + j]);
    for (int i = 0; i < bins; ++i) {
        const double yc = y_lo + (i + 0.5) * width;
        double acc = diag;
        for (std::size_t j = 0; j < np; ++j) {
            for (std::size_t l = j + 1; l < np; ++l) {
                const double dp = p_nodes[j] - p_nodes[l];
                const Complex ph = std::exp(I * dp * yc) * sinc(0.5 * dp * width);
                acc += 2.0 * wf[j] * wf[l] * std::real(G[j * np + l] * ph);
            }
        }
        out.density[i] = n2 * acc;
    }
    double parseval = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
        const double d = p_nodes[j] - spec.p0;
        parseval += p_weights[j] * std::exp(-2.0 * spec.dy * spec.dy * d * d) *
                    std::real(G[j * np + j]);
    }
    out.detection_weight = 2.0 * kPi * n2 * parseval;
    out.t = channels[0].t;
    out.clock_tail_mass = spec.clock_tail_mass();
    return out;
}

double reflection_probe(double p_y, double epsilon, const PacketSpec& packet,
                        bool sharp) {
    const double m = packet.m;
    const double x_A = 1.0 / (epsilon * std::sqrt(2.0 * m));
    const double core_lo = -packet.x0 - 10.0 * packet.dx;
    const double core_hi = std::max({4.0 * x_A, 10.0 * packet.dx, 20.0});
    const double pad = 0.22 * (core_hi - core_lo);

    const double k_hi = packet.k0 + 4.0 / packet.dx;
    const double q_max = std::sqrt(k_hi * k_hi + 2.0 * m * p_y);
    GridConfig g = make_grid_config(core_lo - pad, core_hi + pad, q_max, 1e-2, 24);
    g.absorber_frac = pad / (g.x_hi - g.x_lo);
    const double v_in = packet.k0 / m;
    g.absorber_strength = 4.0 * std::max(v_in, q_max / m) / pad;
    const double omega_max = q_max * q_max / (2.0 * m) + g.absorber_strength;
    g.dt = 0.12 / omega_max;
    g.gauge_energy = 0.0;

    ChannelParams cp;
    cp.p = p_y;
    cp.x_A = x_A;
    cp.x_step = 0.0;

    const double t_final = 2.2 * (packet.x0 + core_hi) / v_in;
    const GridState st =
        evolve_channel(sharp ? PotentialKind::SharpStep : PotentialKind::Gradual, cp,
                       packet, g, t_final);
    const double split = sharp ? -2.0 * packet.dx : -3.0 * x_A;
    return flux_split(st, g, split).reflected;
}

}  // namespace qtoa
