#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include "oracles.hpp"
#include "qtoa/clock_model.hpp"

using namespace qtoa;

namespace {
// Inaccurate-regime reference parameters (p0 << E_k).
const PacketSpec kInaccurate{1.0, 5.0, 2.0, 30.0, 0.4, 5.0};

double total_variation(const ClockHistogram& h, const std::vector<double>& other) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        m1 += h.density[i];
        m2 += other[i];
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < h.bins(); ++i)
        tv += 0.5 * std::abs(h.density[i] / m1 - other[i] / m2);
    return tv;
}
}  // namespace

TEST_CASE("channel amplitudes") {
    SUBCASE("transparent at p = 0") {
        const ClockChannel c = channel(1.0, 0.0, 1.0);
        CHECK(c.q == doctest::Approx(1.0));
        CHECK(std::abs(c.A_T - 1.0) < 1e-15);
        CHECK(std::abs(c.A_R) < 1e-15);
    }
    SUBCASE("hand-evaluated closed forms") {
        const ClockChannel c = channel(1.0, 1.5, 1.0);
        CHECK(c.q == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(c.A_T.real() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(c.A_R.real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("degenerate channel") {
        CHECK_THROWS_AS((void)channel(0.0, 1.0, 1.0), DomainError);
    }
    SUBCASE("flux identity over a dense grid") {
        double worst = 0.0;
        for (int i = 1; i <= 60; ++i)
            for (int j = 0; j <= 60; ++j) {
                const ClockChannel c = channel(0.1 * i, 0.2 * j, 1.0);
                worst = std::max(worst, std::abs(c.flux_error()));
            }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("detection probability") {
    CHECK(detection_probability(2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(detection_probability(0.5, 1.5) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    // Deep suppression: approaches 4 sqrt(E/p).
    CHECK(std::abs(detection_probability(0.5, 5000.0) - 0.04) < 0.02 * 0.04);
    // Energy form equals the flux form (q/k)|A_T|^2.
    const ClockChannel c = channel(2.0, 3.0, 1.0);
    CHECK(detection_probability(2.0, 3.0) ==
          doctest::Approx((c.q / c.k) * std::norm(c.A_T)).epsilon(1e-13));

    SUBCASE("monotone in p and in E") {
        double worst_p = 0.0, worst_e = 0.0;
        for (int i = 1; i <= 50; ++i) {
            double prev = 2.0;
            for (int j = 0; j <= 50; ++j) {
                const double det = detection_probability(0.1 * i, 0.4 * j);
                worst_p = std::max(worst_p, det - prev);
                prev = det;
            }
        }
        for (int j = 1; j <= 50; ++j) {
            double prev = 0.0;
            for (int i = 1; i <= 50; ++i) {
                const double det = detection_probability(0.1 * i, 0.4 * j);
                worst_e = std::max(worst_e, prev - det);
                prev = det;
            }
        }
        CHECK(worst_p <= 1e-14);
        CHECK(worst_e <= 1e-14);
    }
}

TEST_CASE("inaccurate-regime readout matches the stationary-width Gaussian") {
    const PacketSpec s = kInaccurate;
    const double t = late_time(s);
    const QuadratureGrid grid = make_grid(s);
    const ClockHistogram h = readout_distribution(s, t, grid);

    const double tc = classical_toa(s);
    CHECK(tc == doctest::Approx(6.0));

    std::vector<double> ref(h.bins());
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double y = h.center(i);
        const double g = appendix_gamma(s, y);
        ref[i] = std::exp(-(y - tc) * (y - tc) / (2.0 * g)) /
                 std::sqrt(2.0 * std::numbers::pi * g);
    }
    CHECK(total_variation(h, ref) < 0.05);
    CHECK(std::abs(h.peak() - tc) < 0.02 * tc);

    // Histogram mass vs detection weight: the p > 0 clipping of the
    // unrenormalized f leaves an edge at p = 0 whose pointer marginal has
    // 1/(y-t)^2 tails outside the span, of order |f(0)|^2 ~ e^{-2(p0 dy)^2}.
    // Here p0*dy = 2, so the identity holds only to ~1e-5; the 1e-6 form is
    // checked below for a clock state clear of p = 0.
    CHECK(std::abs(h.mass() - h.detection_weight) < 2e-5);
    double favg = 0.0, fnorm = 0.0;
    const double E = s.mean_energy();
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
        const double p = grid.p_axis.nodes[j];
        const double d = p - s.p0;
        const double f2 = std::exp(-2.0 * s.dy * s.dy * d * d);
        favg += grid.p_axis.weights[j] * f2 * detection_probability(E, p);
        fnorm += grid.p_axis.weights[j] * f2;
    }
    CHECK(std::abs(h.detection_weight - favg / fnorm) < 1e-3);
}

TEST_CASE("histogram mass equals detection weight once the clock clears p=0") {
    PacketSpec s = kInaccurate;
    s.p0 = 0.6;  // p0*dy = 3: |f(0)|^2 ~ 1.5e-8, edge tails negligible
    const ClockHistogram h = readout_distribution(s, late_time(s), make_grid(s));
    CHECK(std::abs(h.mass() - h.detection_weight) < 1e-6);
}

TEST_CASE("finite-time and energy-shell routes agree at late time") {
    const PacketSpec s = kInaccurate;
    const double t = late_time(s) * 1.3;
    const QuadratureGrid grid = make_grid(s);
    ReadoutOptions a, b;
    a.route = ReadoutRoute::XGrid;
    b.route = ReadoutRoute::EnergyShell;
    const ClockHistogram ha = readout_distribution(s, t, grid, a);
    const ClockHistogram hb = readout_distribution(s, t, grid, b);
    REQUIRE(ha.bins() == hb.bins());
    double l2 = 0.0;
    for (std::size_t i = 0; i < ha.bins(); ++i)
        l2 += std::pow(ha.density[i] - hb.density[i], 2);
    l2 = std::sqrt(l2 * ha.bin_width());
    CHECK(l2 < 1e-3);
    CHECK(std::abs(ha.detection_weight - hb.detection_weight) < 1e-3);
}

TEST_CASE("premature readout is rejected") {
    const PacketSpec s = kInaccurate;
    const QuadratureGrid grid = make_grid(s);
    CHECK_THROWS_AS((void)readout_distribution(s, 0.5 * classical_toa(s), grid),
                    PrematureReadoutError);
}

TEST_CASE("late-time mass balance: detection weight + reflected mass") {
    const PacketSpec s = kInaccurate;
    const QuadratureGrid grid = make_grid(s);
    const double t = late_time(s);

    // At late time the x < 0 content is the reflected packet (the incident
    // residue there is exponentially small by the clearance check), so scan
    // the reflected branch A_R e^{-ikx} over its support window.
    const ModeFn reflected = [&](double k, double p, double x, double, double tt) {
        const ClockChannel c = channel(k, p, s.m);
        return c.A_R * std::exp(I * (-k * x - c.omega * tt));
    };
    const double center = s.x0 - s.k0 * t / s.m;  // mirror of the free motion
    const double w_t = std::sqrt(s.dx * s.dx + std::pow(t / (2.0 * s.m * s.dx), 2));
    const double h = 0.05;
    const AxisRule ka = gl_axis_union(grid.k_axis.intervals, 384);
    const AxisRule pa = gl_axis_union(grid.p_axis.intervals, 48);
    double left_mass = 0.0;
    for (std::size_t j = 0; j < pa.size(); ++j) {
        const double p = pa.nodes[j];
        const double d = p - s.p0;
        const double f2 = std::exp(-2.0 * s.dy * s.dy * d * d);
        double channel_mass = 0.0;
        for (double x = center - 8.0 * w_t; x < std::min(0.0, center + 8.0 * w_t);
             x += h) {
            Complex chi = 0.0;
            for (std::size_t i = 0; i < ka.size(); ++i) {
                const double k = ka.nodes[i];
                const Complex g =
                    std::exp(Complex(-s.dx * s.dx * (k - s.k0) * (k - s.k0), k * s.x0));
                chi += ka.weights[i] * g * reflected(k, p, x, 0.0, t);
            }
            channel_mass += std::norm(chi) * h;
        }
        left_mass += pa.weights[j] * f2 * channel_mass;
    }
    left_mass *= 2.0 * std::numbers::pi * normalization(s) * normalization(s);

    // Inaccurate regime: almost everything is detected.
    CHECK(left_mass < 1e-3);
    const double weight = detection_weight_flux(s, grid);
    CHECK(std::abs(weight + left_mass - 1.0) < 1e-4);
}

TEST_CASE("accurate regime: weight scaling and width saturation") {
    // p0 >> E_k; k0 = m = 1 so both printed width readings coincide.
    auto spec_for = [](double dy) {
        return PacketSpec{1.0, 1.0, 5.0, 20.0, 2.0 / dy, dy};
    };
    SUBCASE("detection weight scales like sqrt(E/p0)") {
        const PacketSpec s1 = spec_for(0.004), s2 = spec_for(0.002);
        const double w1 = detection_weight_flux(s1, make_grid(s1));
        const double w2 = detection_weight_flux(s2, make_grid(s2));
        CHECK(std::abs(w2 / w1 - 1.0 / std::sqrt(2.0)) < 0.05 / std::sqrt(2.0));
    }
    SUBCASE("histogram width independent of dy over a 4x sweep") {
        std::vector<double> widths;
        for (double dy : {0.004, 0.008, 0.016}) {
            const PacketSpec s = spec_for(dy);
            ReadoutOptions opt;
            opt.route = ReadoutRoute::EnergyShell;
            const ClockHistogram h =
                readout_distribution(s, late_time(s), make_grid(s), opt);
            widths.push_back(h.stddev());
        }
        for (double w : widths)
            CHECK(std::abs(w / widths.front() - 1.0) < 0.05);
    }
}

TEST_CASE("two-peak distortion") {
    BimodalPacketSpec b;
    b.m = 1.0;
    b.dx = 1.5;
    b.x0 = 60.0;
    b.k1 = 2.0;
    b.k2 = 6.0;
    b.w1 = 0.5;
    b.w2 = 0.5;
    b.dy = 3.0;
    b.p0 = 2.0 / 3.0;  // p0*dy = 2 held across the sweep

    SUBCASE("equal contribution for an inaccurate clock") {
        const double dys[] = {3.0};
        const auto rows = two_peak_experiment(b, dys);
        CHECK(std::abs(rows[0].ratio / (b.w1 / b.w2) - 1.0) < 0.10);
    }
    SUBCASE("slow peak suppressed inside the window 2m/k1^2 > dy > 2m/k2^2") {
        const double dys[] = {0.15};
        const auto rows = two_peak_experiment(b, dys);
        CHECK(rows[0].ratio < b.w1 / b.w2);
        CHECK(std::abs(rows[0].ratio / rows[0].predicted_ratio - 1.0) < 0.10);
    }
    SUBCASE("single packet gives a vanishing ratio") {
        BimodalPacketSpec solo = b;
        solo.w1 = 0.0;
        solo.w2 = 1.0;
        const double dys[] = {3.0};
        const auto rows = two_peak_experiment(solo, dys);
        CHECK(rows[0].ratio < 0.01);
    }
    SUBCASE("overlapping peaks are rejected") {
        BimodalPacketSpec tight = b;
        tight.k1 = 5.0;  // arrivals 12 and 10, closer than 3 widths
        const double dys[] = {3.0};
        CHECK_THROWS_AS((void)two_peak_experiment(tight, dys), UnresolvablePeaksError);
    }
}

TEST_CASE("stationary-phase peaks") {
    SUBCASE("free limit") {
        const PacketSpec s{1.0, 2.0, 2.5, 10.0, 1e-9, 2e9};
        const PhasePeaks r = phase_peaks(s, 20.0);
        CHECK(r.x_peak == doctest::Approx(-10.0 + 2.0 * 20.0).epsilon(1e-6));
    }
    SUBCASE("composition gives the classical arrival exactly") {
        const PacketSpec s{1.0, 2.0, 2.5, 10.0, 0.02, 250.0};
        const PhasePeaks r = phase_peaks(s, 20.0);
        CHECK(r.y_peak == doctest::Approx(s.m * s.x0 / s.k0).epsilon(1e-13));
    }
    SUBCASE("synthesized density peaks at the stationary point") {
        const PacketSpec s{1.0, 2.0, 2.5, 10.0, 0.02, 250.0};
        const double t = 20.0;
        const PhasePeaks r = phase_peaks(s, t);
        const QuadratureGrid grid = make_grid(s, {64, 6.0});
        const ModeFn mode = clock_mode(s.m);
        const int n = 41;
        const double wx = 9.0, wy = 170.0;
        double best = -1.0;
        int bi = -1, bj = -1;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double x = r.x_peak + wx * (2.0 * i / (n - 1) - 1.0);
                const double y = r.y_peak + wy * (2.0 * j / (n - 1) - 1.0);
                const double v = std::norm(synthesize(s, mode, grid, x, y, t));
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        const double cell_x = 2.0 * wx / (n - 1), cell_y = 2.0 * wy / (n - 1);
        const double got_x = r.x_peak + wx * (2.0 * bi / (n - 1) - 1.0);
        const double got_y = r.y_peak + wy * (2.0 * bj / (n - 1) - 1.0);
        CHECK(std::abs(got_x - r.x_peak) <= cell_x + 1e-12);
        CHECK(std::abs(got_y - r.y_peak) <= cell_y + 1e-12);
    }
}

TEST_CASE("detection weight follows the sqrt(E dt) law at high accuracy") {
    const double dy = 5.0;
    std::vector<double> lx, ly;
    for (double edy : logspace(1e-4, 1e-3, 6)) {
        const double E = edy / dy;
        const double k0 = std::sqrt(2.0 * E);
        const PacketSpec s{1.0, k0, 10.0 / k0, 40.0 / k0, 2.0 / dy, dy};
        lx.push_back(std::log(edy));
        ly.push_back(std::log(detection_weight_flux(s, make_grid(s))));
    }
    const LinearFit fit = linear_fit(lx, ly);
    CHECK(std::abs(fit.slope - 0.5) < 0.05);
}
