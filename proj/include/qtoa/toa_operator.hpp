#pragma once

#include <span>
#include <vector>

#include "qtoa/packet.hpp"
#include "qtoa/util.hpp"

namespace qtoa {

// Free-particle time-of-arrival operator, symmetrized as
//   T_A = -m p^{-1/2} x p^{-1/2}
// (classical limit -m x / p, [T_A, H] = -i away from p = 0). Its momentum
// eigenfunctions are
//   <k|T,+-> = theta(+-k) sqrt(|k|/2 pi m) exp(i T k^2 / 2m),
// not orthogonal: summed over both sign branches,
//   <T|T'> = delta(T-T') - i / (pi (T-T')).

// Branch value of <k|T,+>.
Complex toa_eigenfunction(double T, double m, double k);

struct OverlapResult {
    double T = 0.0, T_prime = 0.0;
    Complex overlap;            // eta -> 0 extrapolation, both branches
    Complex predicted_offdiag;  // -i / (pi (T - T'))
    std::vector<double> dampings;
    double richardson_spread = 0.0;  // relative spread of the extrapolants
};

// Numeric overlap with Gaussian damping exp(-eta k^2), Richardson
// extrapolated over a decreasing damping sequence. Throws
// RegularizationError if the extrapolation has not settled to 2%.
OverlapResult overlap(double T, double T_prime, double m,
                      std::span<const double> dampings);

struct TailFit {
    std::vector<double> x;
    std::vector<double> amplitude;  // |<x|T(t=T)>|
    double exponent = 0.0;          // log-log slope, expect -3/2
    double r_squared = 0.0;
};

// Fourier synthesis of the position amplitude at the arrival instant over
// x in [x_lo, x_hi] (>= 2 decades) and a log-log power-law fit. Throws
// ResolutionError if the fit has R^2 < 0.99.
TailFit position_tail(double T, double m, double x_lo, double x_hi, int n_points);

// |<x=0|T(t)>| for t != T stays finite; the integral diverges at t = T.
// Evaluated with damping eta for qualitative comparison.
double arrival_amplitude_at_origin(double T, double m, double t, double eta);

// Uniform momentum grid, k > 0 only, with a state sampled on it.
struct MomentumState {
    double k_lo = 0.0, k_hi = 0.0;
    std::vector<Complex> psi;

    double h() const { return (k_hi - k_lo) / double(psi.size()); }
    double k_at(std::size_t i) const { return k_lo + (i + 0.5) * h(); }
    double norm_sq() const;
};

MomentumState gaussian_state(double k0, double dx, double k_lo, double k_hi, int n);

struct CommutatorPoint {
    double eps = 0.0;
    Complex lhs;  // <psi| [T_A, P0^eps] |psi>, discretized operators
    Complex rhs;  // i (m/sqrt(2 pi)) Re{ psi_eps(0) int dk psi*(k)/k^2 }
};

// Matrix elements of the commutator with the width-eps window projector
// around x = 0, one row per eps. Throws DomainError if psi has visible
// weight at the infrared edge of the grid.
std::vector<CommutatorPoint> projector_commutator(const MomentumState& psi,
                                                  std::span<const double> eps_seq);

struct ConjugacyResult {
    double residual_minus = 0.0;  // || ([T,H] + i) psi || / || psi ||
    double residual_plus = 0.0;   // || ([T,H] - i) psi || / || psi ||
    double best = 0.0;
    char best_sign = '-';  // which of [T,H] = -i / +i fits
};

// Discretized conjugacy check; away from k = 0 the projector O is the
// identity on the grid.
ConjugacyResult conjugacy_residual(const MomentumState& psi);

// Normalized restriction of <k|T,+> to [k_min, k_max], usable as a particle
// envelope for the clock model. Throws DomainError on an empty band.
Envelope truncated_eigenstate(double T, double m, double k_min, double k_max);

// Flux mean energy of the truncated band, int |psi|^2 E dk.
double band_mean_energy(double m, double k_min, double k_max);

}  // namespace qtoa
