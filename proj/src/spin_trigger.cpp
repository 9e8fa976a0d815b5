#include "qtoa/spin_trigger.hpp"

#include <cmath>

#include "qtoa/errors.hpp"

namespace qtoa {

double TriggerChannel::flux_error() const {
    const double r = k_down / k_up;
    return std::norm(phi_L_up) + std::norm(phi_R_up) +
           r * (std::norm(phi_L_down) + std::norm(phi_R_down)) - 1.0;
}

TriggerChannel trigger_clock_channel(double alpha, double E_k, double p, double m) {
    if (alpha < 0.0) throw DomainError("trigger strength must be >= 0");
    if (E_k <= 0.0) throw DomainError("trigger channel needs E_k > 0");
    if (p < 0.0) throw DomainError("clock momentum must be >= 0");
    if (m <= 0.0) throw DomainError("mass must be positive");
    TriggerChannel c;
    c.alpha = alpha;
    c.E_k = E_k;
    c.p = p;
    c.k_up = std::sqrt(2.0 * m * E_k);
    c.k_down = std::sqrt(2.0 * m * (E_k + p));
    const double A = m * alpha;  // derivative jump per unit spin projection
    const Complex denom = 2.0 * I * c.k_down * c.k_up - A * (c.k_up + c.k_down);
    c.phi_R_down = A * c.k_up / denom;
    c.phi_R_up = 1.0 + (c.k_down / c.k_up) * c.phi_R_down;
    c.phi_L_up = c.phi_R_up - 1.0;
    c.phi_L_down = c.phi_R_down;
    return c;
}

double alpha_infinite(double E_k, double p, double m) {
    return 1e6 * std::max(std::sqrt(2.0 * m * E_k), std::sqrt(2.0 * m * (E_k + p))) / m;
}

double trigger_detection_probability(double E_k, double p, double m, double alpha) {
    const TriggerChannel c = trigger_clock_channel(alpha, E_k, p, m);
    return (c.k_down / c.k_up) * (std::norm(c.phi_R_down) + std::norm(c.phi_L_down));
}

MultiTrigger multi_trigger(int n) {
    if (n < 1) throw DomainError("need at least one trigger spin");
    if (n > 62) throw DomainError("multi_trigger exact arithmetic limited to n <= 62");
    MultiTrigger t;
    t.n = n;
    t.den = std::uint64_t(1) << n;
    t.num = t.den - 1;
    t.flip_probability = double(t.num) / double(t.den);
    return t;
}

TriggerFlip trigger_only_flip(std::span<const Complex> psi_R,
                              std::span<const Complex> psi_T) {
    if (psi_R.size() != psi_T.size())
        throw DomainError("reflected and transmitted samples must align");
    TriggerFlip r;
    r.off_state.resize(psi_R.size());
    r.on_state.resize(psi_R.size());
    for (std::size_t i = 0; i < psi_R.size(); ++i) {
        r.off_state[i] = 0.5 * (psi_R[i] - psi_T[i]);
        r.on_state[i] = 0.5 * (psi_R[i] + psi_T[i]);
        r.off_weight += std::norm(r.off_state[i]);
        r.on_weight += std::norm(r.on_state[i]);
    }
    r.flip_probability = r.off_weight;
    return r;
}

}  // namespace qtoa
