#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qtoa/util.hpp"

namespace qtoa {

// Two-level trigger gated by a spin-projected delta potential,
//   H = P_x^2/2m + (alpha/2)(1 + sigma_x) delta(x) + (1/2)(1 + sigma_z) P_y.
// In the sigma_z basis the clock-running (up) channel has k_up = sqrt(2mE_k)
// and the clock-stopped (down) channel k_down = sqrt(2m(E_k + p)).

struct TriggerChannel {
    double alpha = 0.0;
    double E_k = 0.0;     // kinetic energy in the up channel
    double p = 0.0;       // clock momentum
    double k_up = 0.0;
    double k_down = 0.0;
    Complex phi_L_up, phi_L_down, phi_R_up, phi_R_down;

    // |phi_Lup|^2 + |phi_Rup|^2 + (k_down/k_up)(|phi_Ldown|^2+|phi_Rdown|^2) - 1
    double flux_error() const;
};

// Matching conditions re-derived from continuity of both spin components and
// the derivative jump 2m*(alpha/2)(1+sigma_x) psi(0):
//   phi_Rdown = m alpha k_up / (2i k_down k_up - m alpha (k_up + k_down))
//   phi_Rup   = 1 + (k_down/k_up) phi_Rdown,
//   phi_Lup   = phi_Rup - 1,  phi_Ldown = phi_Rdown.
// As alpha -> inf, |phi_Rdown| -> sqrt(E_k)/(sqrt(E_k)+sqrt(E_k+p)) with
// phi_Rup = -phi_Rdown.
TriggerChannel trigger_clock_channel(double alpha, double E_k, double p, double m);

// Operational "alpha -> infinity".
double alpha_infinite(double E_k, double p, double m);

// Total clock-stopped flux fraction (k_down/k_up)(|phi_Rdown|^2+|phi_Ldown|^2).
double trigger_detection_probability(double E_k, double p, double m, double alpha);

struct MultiTrigger {
    int n = 1;
    std::uint64_t num = 1, den = 2;  // flip probability, exact rational
    double flip_probability = 0.5;
};

// Probability that at least one of n spins has flipped, 1 - 2^-n exactly.
MultiTrigger multi_trigger(int n);

struct TriggerFlip {
    double flip_probability = 0.0;           // weight of the trigger-off state
    double off_weight = 0.0, on_weight = 0.0;
    std::vector<Complex> off_state, on_state;
};

// Trigger without a clock, totally reflective limit: the incoming state
// |psi>|up_z> evolves to (|psi_R>|up_x> + |psi_T>|down_x>)/sqrt(2); in the
// z basis the off (down_z) component is (psi_R - psi_T)/2.
TriggerFlip trigger_only_flip(std::span<const Complex> psi_R,
                              std::span<const Complex> psi_T);

}  // namespace qtoa
