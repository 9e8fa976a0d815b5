#pragma once

#include <span>
#include <vector>

#include "qtoa/errors.hpp"

namespace qtoa {

// Classical dynamics of a particle driving a clock through the smooth
// profile  H = p_x^2/2m + p_y V(x),
//   V(x) = -x_A^2/x^2   for x <= -x_A,
//   V(x) = -1           for x >  -x_A,
// with the particle approaching from x -> -inf and the arrival point at
// x = -x_A (the trajectory never reaches the x = 0 singularity).
struct GradualConfig {
    double m = 1.0;
    double E = 1.0;     // conserved energy p_x^2/2m + p_y V(x)
    double p_y = 0.1;   // clock momentum, conserved
    double x_A = 1.0;   // potential scale, x_A^-2 = 2 m eps^2
    double x_i = -10.0; // initial position, |x_i| >= 10 x_A
    double t_i = 0.0;
    double t_f = 10.0;

    void validate() const;
};

// Sign conventions: travel times are positive. The clock displacement
// decomposes as
//   y(t_f) - y(t_i) = A + B + C,
//   A = t_0 - t_i        arrival time at x = -x_A (positive travel time;
//                        the paper's closed form is -A),
//   B = -(t_f - t_i)     the flat region runs the pointer back at unit rate,
//   C = int_{t_i}^{t_0} V dt   pre-arrival drift from the potential tail.
struct ClosedFormTerms {
    double a_travel = 0.0;
    double b_minus_elapsed = 0.0;
    double c_drift = 0.0;

    double sum() const { return a_travel + b_minus_elapsed + c_drift; }
};

// Closed forms with the mass factors restored,
//   A = sqrt(m/2E) [ sqrt(x_i^2 + p_y x_A^2/E) - sqrt(x_A^2 + p_y x_A^2/E) ]
//   C = -x_A sqrt(m/2p_y) [ atanh(1/sqrt(1+E/p_y))
//                           - atanh(1/sqrt(1+E x_i^2/(p_y x_A^2))) ]
// (C has an analytic p_y -> 0 limit). Throws DomainError if any square-root
// argument would go negative.
ClosedFormTerms closed_form_terms(const GradualConfig& cfg);

struct TrajectoryResult {
    double y_displacement = 0.0;  // numeric y(t_f) - y(t_i)
    ClosedFormTerms terms;        // closed forms above
    double residual = 0.0;        // y_displacement - terms.sum()
    double arrival_time = 0.0;    // numeric crossing of x = -x_A (from t_i)
    double drift_numeric = 0.0;   // numeric y(t_0) - y(t_i)
    double energy_drift = 0.0;    // max relative drift of E along the run
};

// Adaptive dense-output integration of (x, p_x, y); the arrival event is
// located by bisection on the dense output. Relative tolerance 1e-12.
TrajectoryResult integrate_trajectory(const GradualConfig& cfg);

struct TradeoffRow {
    double E = 0.0;
    double dt = 0.0;       // clock accuracy, p_y = 1/dt
    double p_y = 0.0;
    double e_dt = 0.0;     // E * dt
    double measured = 0.0; // protocol reading Delta y + (t_f - t_i) = A + C
    double free_toa = 0.0; // (|x_i| - x_A) sqrt(m/2E)
    double rel_error = 0.0;
    ClosedFormTerms terms;
    double y_displacement = 0.0;
    double residual = 0.0;
};

// Raw-protocol accuracy study over all (E, dt) pairs; geometry fixed by
// x_A and the ratio |x_i|/x_A.
std::vector<TradeoffRow> accuracy_tradeoff_curve(std::span<const double> E_sweep,
                                                 std::span<const double> dt_sweep,
                                                 double x_A = 1.0,
                                                 double xi_over_xA = 10.0);

}  // namespace qtoa
