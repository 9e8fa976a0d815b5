#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qtoa/errors.hpp"
#include "qtoa/quadrature.hpp"
#include "qtoa/util.hpp"

namespace qtoa {

// Natural units, hbar = 1 throughout; time and inverse energy share units.

// Gaussian wavepacket for the particle and momentum distribution for the
// clock:
//   g(k) = exp(-dx^2 (k-k0)^2 + i k x0)     particle, centered at x = -x0
//   f(p) = exp(-dy^2 (p-p0)^2)              clock, restricted to p > 0
// dy is the initial pointer spread and is read as the clock accuracy dt_A.
struct PacketSpec {
    double m = 1.0;   // particle mass
    double k0 = 1.0;  // mean wavenumber
    double dx = 1.0;  // spatial width
    double x0 = 10.0; // initial offset, packet centered at -x0
    double p0 = 1.0;  // mean clock momentum (energy units)
    double dy = 1.0;  // clock accuracy dt_A (time units)

    // Throws DomainError unless m,dx,dy,x0 > 0, p0*dy >= 1 and the packet
    // is initially localized on the left (mass on x>0 below 1e-3).
    void validate() const;

    double mean_energy() const { return k0 * k0 / (2.0 * m); }
    // |f|^2 mass discarded by the p>0 restriction.
    double clock_tail_mass() const { return normal_upper_tail(2.0 * p0 * dy); }
    // |g|^2 position mass initially on x > 0.
    double right_tail_mass() const { return normal_upper_tail(x0 / dx); }
};

// Superposition sqrt(w1) g_{k1} + sqrt(w2) g_{k2} of two packets sharing
// (m, dx, x0, p0, dy); probability weights w1 + w2 = 1.
struct BimodalPacketSpec {
    double m = 1.0;
    double dx = 1.0;
    double x0 = 10.0;
    double p0 = 1.0;
    double dy = 1.0;
    double k1 = 1.0;
    double k2 = 2.0;
    double w1 = 0.5;
    double w2 = 0.5;

    void validate() const;
    PacketSpec component(int i) const;
};

// Tabulation-free momentum envelope: a callable plus the intervals that
// carry its support, so quadrature grids know where to put nodes.
struct Envelope {
    std::function<Complex(double)> value;
    std::vector<Interval> support;

    Complex operator()(double k) const { return value(k); }
};

Envelope envelope_of(const PacketSpec& s);
Envelope envelope_of(const BimodalPacketSpec& s);

// N with N^2 = dx*dy / (2 pi^3); the synthesized t=0 state then has unit
// norm (up to the discarded p<0 tail).
double normalization(const PacketSpec& s);
double normalization(const BimodalPacketSpec& s);

// t_c = m x0 / k0. Throws DomainError for k0 <= 0 (no arrival from the left).
double classical_toa(const PacketSpec& s);

struct GridOptions {
    int nodes_per_axis = 128;
    double truncation_radius = 6.0;  // in amplitude standard deviations
};

// Nodes and weights for the double integral dk dp: k over the envelope
// support on the full line, p over the positive half line.
struct QuadratureGrid {
    AxisRule k_axis;
    AxisRule p_axis;
    double truncation_radius = 6.0;

    QuadratureGrid shrunk(double keep_fraction) const {
        return {k_axis.shrunk(keep_fraction), p_axis.shrunk(keep_fraction),
                truncation_radius * keep_fraction};
    }
};

QuadratureGrid make_grid(const PacketSpec& s, GridOptions opt = {});
QuadratureGrid make_grid(const BimodalPacketSpec& s, GridOptions opt = {});
QuadratureGrid make_grid(const Envelope& g, double p0, double dy, GridOptions opt = {});

// Checks the grid against the analytic |g|^2 and |f|^2 norms (1e-8) and the
// outermost-node truncation criterion (1e-6); throws QuadratureError naming
// the offending axis.
void validate_grid(const QuadratureGrid& grid, const Envelope& g, double p0, double dy);

// Stationary eigenmode of one model, evaluated at clock channel (k, p).
using ModeFn = std::function<Complex(double k, double p, double x, double y, double t)>;

// psi(x,y,t) = N * sum_k w_k g(k) sum_p w_p f(p) phi_kp(x,y,t).
// Reduction order is fixed (k outer, p inner) so results are bit-stable.
Complex synthesize(const Envelope& g, double p0, double dy, double prefactor,
                   const ModeFn& mode, const QuadratureGrid& grid, double x, double y,
                   double t);
Complex synthesize(const PacketSpec& s, const ModeFn& mode, const QuadratureGrid& grid,
                   double x, double y, double t);

}  // namespace qtoa
