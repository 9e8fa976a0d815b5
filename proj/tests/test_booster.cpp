#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qtoa/booster.hpp"

using namespace qtoa;

TEST_CASE("tuning solves the matching constraints") {
    const BoosterParams b = tune(1.0, 1.0, 2.0, 3.0);
    CHECK(b.q == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(b.alpha == doctest::Approx(20.0).epsilon(1e-14));
    CHECK(b.V1 == doctest::Approx(37.0).epsilon(1e-14));
    CHECK(b.W == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(b.V2 == doctest::Approx(3.0).epsilon(1e-14));

    // Energy-matching identities.
    CHECK(b.k * b.k == doctest::Approx(b.V1 - b.q * b.q).epsilon(1e-12));
    CHECK(b.k * b.k == doctest::Approx(b.W - b.lambda * b.lambda).epsilon(1e-12));
    CHECK(b.k * b.k ==
          doctest::Approx(b.k_prime * b.k_prime - b.V2).epsilon(1e-12));
    CHECK(b.alpha == doctest::Approx(b.k_prime * b.k + b.q * b.lambda).epsilon(1e-12));
    CHECK(b.q == doctest::Approx(b.lambda * b.k_prime / b.k).epsilon(1e-12));

    SUBCASE("degenerate no-boost limit") {
        const BoosterParams d = tune(1.0, 1.0, 1.0 + 1e-9, 1e-9);
        CHECK(d.alpha == doctest::Approx(1.0).epsilon(1e-6));  // -> k^2
        CHECK(d.q < 1e-6);
        CHECK(d.V2 < 1e-6);
    }
    SUBCASE("constraint violations") {
        CHECK_THROWS_AS((void)tune(1.0, 2.0, 1.0, 3.0), DomainError);
        CHECK_THROWS_AS((void)tune(1.0, -1.0, 2.0, 3.0), DomainError);
    }
}

TEST_CASE("tuned point transmits with unit flux") {
    const BoosterParams b = tune(1.0, 1.0, 2.0, 3.0);
    const BoosterChannel c = booster_channel(b, b.k);
    CHECK(std::abs(c.J_R_down - 1.0) < 1e-10);
    CHECK(c.J_L_up < 1e-10);
    CHECK(c.solve_residual < 1e-12);

    SUBCASE("twenty random tuned parameter sets") {
        std::mt19937 rng(20260809);
        std::uniform_real_distribution<double> u(0.3, 3.0);
        for (int i = 0; i < 20; ++i) {
            const double k = u(rng);
            const double kp = k * (1.2 + u(rng));
            const double lam = u(rng);
            const BoosterParams p = tune(1.0, k, kp, lam);
            const BoosterChannel t = booster_channel(p, p.k);
            CHECK(std::abs(t.J_R_down - 1.0) < 1e-10);
            CHECK(t.J_L_up < 1e-10);
        }
    }
}

TEST_CASE("decoupled at vanishing flip strength") {
    BoosterParams b = tune(1.0, 1.0, 2.0, 3.0);
    b.alpha = 0.0;
    const BoosterChannel c = booster_channel(b, b.k);
    CHECK(std::abs(c.phi_R_down) < 1e-14);
    CHECK(std::abs(c.J_L_up - 1.0) < 1e-12);
}

TEST_CASE("flux conservation across the propagating window") {
    const BoosterParams b = tune(1.0, 1.0, 2.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double k_in = 0.02 + (b.window_hi() - 0.04) * i / 99.0;
        worst = std::max(worst, std::abs(booster_channel(b, k_in).flux_error()));
    }
    CHECK(worst < 1e-10);

    CHECK_THROWS_AS((void)booster_channel(b, b.window_hi() + 0.1), DomainError);
}

TEST_CASE("tuned point is a transmission maximum with zero linear response") {
    const BoosterParams b = tune(1.0, 1.0, 2.0, 3.0);
    const double J0 = booster_channel(b, b.k).J_R_down;
    for (int i = 0; i <= 40; ++i) {
        const double k_in = b.k * (0.9 + 0.2 * i / 40.0);
        CHECK(booster_channel(b, k_in).J_R_down <= J0 + 1e-12);
    }
    // Centered difference at the maximum: the exact J is flat to first
    // order (flux conservation forbids the printed J = 1 + 2 dk/k).
    const double d = 1e-3 * b.k;
    const double slope =
        (booster_channel(b, b.k + d).J_R_down - booster_channel(b, b.k - d).J_R_down) /
        (2.0 * d);
    CHECK(std::abs(slope) < 1e-3);
}

TEST_CASE("packet distortion") {
    const BoosterParams b = tune(1.0, 1.0, 2.0, 3.0);
    auto gaussian_envelope = [&](double width) {
        Envelope g;
        const double k = b.k;
        g.value = [k, width](double kk) -> Complex {
            return std::exp(-(kk - k) * (kk - k) / (2.0 * width * width));
        };
        const double lo = std::max(0.02, k - 4.0 * width);
        const double hi = std::min(b.window_hi() - 0.02, k + 4.0 * width);
        g.support = {{lo, hi}};
        return g;
    };

    SUBCASE("narrow packet is nearly undistorted") {
        const DistortionResult r = packet_distortion(b, gaussian_envelope(0.01));
        CHECK(r.metric < 0.02);
    }
    SUBCASE("wide packet is visibly distorted") {
        const DistortionResult r = packet_distortion(b, gaussian_envelope(0.5));
        CHECK(r.metric > 0.1);
    }
    SUBCASE("delta-like envelope at the tuned momentum") {
        const DistortionResult r = packet_distortion(b, gaussian_envelope(1e-5));
        CHECK(r.metric < 1e-8);
    }
    SUBCASE("support leaving the window is rejected") {
        Envelope g;
        g.value = [](double) -> Complex { return 1.0; };
        g.support = {{0.5, b.window_hi() + 1.0}};
        CHECK_THROWS_AS((void)packet_distortion(b, g), DomainError);
    }
}
