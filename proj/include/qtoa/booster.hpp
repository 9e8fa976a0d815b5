#pragma once

#include <vector>

#include "qtoa/packet.hpp"
#include "qtoa/util.hpp"

namespace qtoa {

// Spin-flip energy booster,
//   H = P_x^2/2m + a sigma_x delta(x) + (W/2) theta(x)(1+sigma_z)
//       + (1/2)[V1 theta(-x) - V2 theta(x)](1-sigma_z),
// with an incoming up wave e^{ikx}, an evanescent up channel e^{-lambda x}
// on the right, an evanescent down channel e^{qx} on the left and a boosted
// propagating down channel e^{ik'x} on the right.
//
// Potentials are stored in wavenumber-squared units (2m * energy), so
//   k^2 = V1 - q^2 = W - lambda^2 = k'^2 - V2.
// `alpha` stores the squared derivative-jump strength A^2 with A = 2m*a;
// the tuned point alpha = k'k + q*lambda, q = lambda k'/k then transmits
// with unit flux.
struct BoosterParams {
    double m = 1.0;
    double k = 1.0;        // design wavenumber
    double k_prime = 2.0;  // boosted wavenumber at the design point
    double lambda = 1.0;   // up-channel evanescent decay
    double q = 0.0;        // down-channel evanescent decay
    double alpha = 0.0;    // squared delta-flip strength
    double V1 = 0.0, V2 = 0.0, W = 0.0;

    // Propagating window for incident wavenumbers, (0, min(sqrt(W), sqrt(V1))).
    double window_hi() const;
};

// Solves the two tuning conditions; throws DomainError unless
// k > 0, k_prime > k, lambda > 0.
BoosterParams tune(double m, double k, double k_prime, double lambda);

struct BoosterChannel {
    double k_in = 0.0;
    double q = 0.0, lambda = 0.0, k_prime = 0.0;  // recomputed at k_in
    Complex phi_L_up, phi_L_down, phi_R_up, phi_R_down;
    double J_L_up = 0.0;    // reflected flux
    double J_R_down = 0.0;  // boosted transmitted flux
    double solve_residual = 0.0;

    double flux_error() const { return J_L_up + J_R_down - 1.0; }
};

// Re-solves the 4x4 matching system at incident wavenumber k_in with the
// potentials fixed. Throws DomainError outside the propagating window.
BoosterChannel booster_channel(const BoosterParams& params, double k_in);

struct DistortionResult {
    std::vector<double> k;
    std::vector<double> transmission;  // J_Rdown(k)
    double metric = 0.0;               // L1 distance of normalized spectra
};

// Per-momentum transmission across an envelope plus the L1 distance between
// the normalized incident |g|^2 and transmitted J(k)|g|^2 spectra. The
// envelope support must lie inside the propagating window.
DistortionResult packet_distortion(const BoosterParams& params, const Envelope& g,
                                   int n_points = 512);

}  // namespace qtoa
