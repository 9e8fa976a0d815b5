#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qtoa/clock_model.hpp"
#include "qtoa/spin_trigger.hpp"

using namespace qtoa;

TEST_CASE("trigger-only flip probability is one half") {
    // Ideal totally reflective limit: psi_T is the packet transmitted through
    // the free down_x channel, psi_R its mirror with reflection amplitude -1.
    // Disjoint momentum supports make them orthogonal.
    const int n = 64;
    std::vector<Complex> psi_T(2 * n, 0.0), psi_R(2 * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double a = std::exp(-0.5 * std::pow((i - n / 2) / 8.0, 2));
        psi_T[n + i] = a;        // k > 0 half
        psi_R[n - 1 - i] = -a;   // mirrored k < 0 half
    }
    double nn = 0.0;
    for (const auto& v : psi_T) nn += std::norm(v);
    for (auto& v : psi_T) v /= std::sqrt(nn);
    for (auto& v : psi_R) v /= std::sqrt(nn);

    const TriggerFlip r = trigger_only_flip(psi_R, psi_T);
    CHECK(r.flip_probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.off_weight + r.on_weight == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("purely reflected input") {
        std::vector<Complex> zero(2 * n, 0.0);
        const TriggerFlip rr = trigger_only_flip(psi_R, zero);
        CHECK(rr.off_weight == doctest::Approx(0.25).epsilon(1e-12));
        for (std::size_t i = 0; i < rr.off_state.size(); ++i)
            CHECK(std::abs(rr.off_state[i] - 0.5 * psi_R[i]) < 1e-15);
    }
}

TEST_CASE("multi-trigger exact rationals") {
    CHECK(multi_trigger(1).num == 1);
    CHECK(multi_trigger(1).den == 2);
    CHECK(multi_trigger(3).num == 7);
    CHECK(multi_trigger(3).den == 8);
    CHECK(multi_trigger(10).num == 1023);
    CHECK(multi_trigger(10).den == 1024);
    CHECK_THROWS_AS((void)multi_trigger(0), DomainError);
    CHECK_THROWS_AS((void)multi_trigger(-3), DomainError);

    double prev = 0.0;
    for (int n = 1; n <= 20; ++n) {
        const double f = multi_trigger(n).flip_probability;
        CHECK(f > prev);
        prev = f;
    }
}

TEST_CASE("trigger+clock channel amplitudes") {
    SUBCASE("totally reflective limit at p = 0") {
        const double E = 0.5, p = 0.0, m = 1.0;
        const TriggerChannel c =
            trigger_clock_channel(alpha_infinite(E, p, m), E, p, m);
        // Derivation-fixed signs: phi_R_up = +1/2, phi_R_down = -1/2 (the
        // printed limit swaps them; magnitudes agree).
        CHECK(std::abs(c.phi_R_down - Complex(-0.5)) < 1e-4);
        CHECK(std::abs(c.phi_R_up - Complex(0.5)) < 1e-4);
    }
    SUBCASE("totally reflective limit, general p") {
        const double m = 1.0;
        for (double E : {0.3, 1.0, 2.5})
            for (double p : {0.0, 0.7, 3.0, 12.0}) {
                const TriggerChannel c =
                    trigger_clock_channel(alpha_infinite(E, p, m), E, p, m);
                const double want = std::sqrt(E) / (std::sqrt(E) + std::sqrt(E + p));
                CHECK(std::abs(std::abs(c.phi_R_down) - want) < 1e-4);
                CHECK(std::abs(c.phi_R_up + c.phi_R_down) < 1e-4);
            }
    }
    SUBCASE("clock stays on for an accurate clock") {
        const double E = 0.5, p = 5000.0, m = 1.0;
        const TriggerChannel c =
            trigger_clock_channel(alpha_infinite(E, p, m), E, p, m);
        CHECK(std::abs(c.phi_L_down) < 0.02);
        CHECK(std::abs(c.phi_L_up) > 0.95);
    }
    SUBCASE("internal matching relations at finite alpha") {
        for (double a : {0.3, 2.0, 40.0})
            for (double E : {0.4, 1.7})
                for (double p : {0.0, 1.3, 6.0}) {
                    const TriggerChannel c = trigger_clock_channel(a, E, p, 1.0);
                    CHECK(std::abs(c.phi_L_down - c.phi_R_down) < 1e-14);
                    CHECK(std::abs(c.phi_L_up - (c.phi_R_up - 1.0)) < 1e-14);
                    CHECK(std::abs(c.phi_R_down -
                                   (c.k_up / c.k_down) * (c.phi_R_up - 1.0)) < 1e-12);
                }
    }
    SUBCASE("flux conservation on a 20x20x20 grid") {
        double worst = 0.0;
        for (int ia = 1; ia <= 20; ++ia)
            for (int ie = 1; ie <= 20; ++ie)
                for (int ip = 0; ip < 20; ++ip) {
                    const TriggerChannel c = trigger_clock_channel(
                        0.25 * ia * ia, 0.2 * ie, 0.4 * ip, 1.0);
                    worst = std::max(worst, std::abs(c.flux_error()));
                }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("trigger detection probability") {
    const double m = 1.0;
    SUBCASE("half at p = 0 in the reflective limit") {
        const double E = 0.5;
        CHECK(trigger_detection_probability(E, 0.0, m, alpha_infinite(E, 0.0, m)) ==
              doctest::Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("decoupled at alpha = 0") {
        CHECK(trigger_detection_probability(1.0, 2.0, m, 0.0) == 0.0);
    }
    SUBCASE("square-root tail: doubling p scales by 2^{-1/2}") {
        const double E = 0.5;
        const double p1 = 1000.0 * E, p2 = 2000.0 * E;
        const double a = alpha_infinite(E, p2, m);
        const double t1 = trigger_detection_probability(E, p1, m, a);
        const double t2 = trigger_detection_probability(E, p2, m, a);
        CHECK(std::abs(t2 / t1 - 1.0 / std::sqrt(2.0)) < 0.05 / std::sqrt(2.0));
    }
    SUBCASE("reflective-limit detection is exactly half the direct-clock one") {
        for (double E : {0.3, 1.1, 4.0})
            for (double p : {0.0, 0.9, 7.0, 300.0}) {
                const double k_up = std::sqrt(2.0 * m * E);
                const double k_down = std::sqrt(2.0 * m * (E + p));
                const double expected =
                    2.0 * k_up * k_down / std::pow(k_up + k_down, 2);
                CHECK(expected ==
                      doctest::Approx(0.5 * detection_probability(E, p)).epsilon(1e-12));
                const double got = trigger_detection_probability(
                    E, p, m, alpha_infinite(E, p, m) * 10.0);
                CHECK(std::abs(got - expected) < 1e-5);
            }
    }
}
