#pragma once

#include <optional>
#include <vector>

#include "qtoa/packet.hpp"

namespace qtoa {

// Particle coupled directly to a clock, H = P_x^2/2m + theta(-x) P_y.
// For fixed clock momentum p the particle sees a step of height p on x<0:
//   x < 0 :  (e^{ikx} + A_R e^{-ikx}) e^{i p y - i w t}
//   x >= 0:  A_T e^{iqx} e^{i p y - i w t},   q = sqrt(k^2 + 2 m p),
// w = k^2/2m + p,  A_T = 2k/(k+q),  A_R = (k-q)/(k+q).

struct ClockChannel {
    double k = 0.0;   // incident wavenumber
    double p = 0.0;   // clock momentum (>= 0)
    double q = 0.0;   // transmitted wavenumber
    double omega = 0.0;
    Complex A_T;
    Complex A_R;

    // |A_R|^2 + (q/k)|A_T|^2 - 1
    double flux_error() const;
};

// Throws DomainError for k = 0 (degenerate channel). k < 0 is the analytic
// continuation of the same formulas; its envelope weight is negligible for
// valid packets.
ClockChannel channel(double k, double p, double m);

// Probability that the clock stops, (q/k)|A_T|^2 in energy form:
//   sqrt((E+p)/E) * [2 sqrt(E) / (sqrt(E) + sqrt(E+p))]^2
// Monotone decreasing in p; 1 at p = 0; ~ 4 sqrt(E/p) as p -> infinity.
double detection_probability(double E_k, double p);

// Eigenmode callable for synthesize().
ModeFn clock_mode(double m);

struct ClockHistogram {
    std::vector<double> edges;    // bin edges, size bins+1
    std::vector<double> density;  // rho(y) restricted to x>0, bin-averaged
    double detection_weight = 0.0;
    double t = 0.0;               // evaluation time (infinity for the
                                  // energy-shell route)
    double clock_tail_mass = 0.0; // |f|^2 mass discarded at p<0

    std::size_t bins() const { return density.size(); }
    double bin_width() const { return edges[1] - edges[0]; }
    double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
    double mass() const;   // sum density * width
    double mean() const;   // of the normalized density
    double stddev() const;
    double peak() const;   // parabolic refinement through the maximum bin
};

enum class ReadoutRoute {
    Auto,         // XGrid when affordable, EnergyShell otherwise
    XGrid,        // synthesize on an x>0 grid at finite t, integrate over x
    EnergyShell,  // x integrated analytically on the energy shell (t -> inf)
};

struct ReadoutOptions {
    ReadoutRoute route = ReadoutRoute::Auto;
    int bins = 400;
    double span_sigmas = 6.0;           // histogram half-width in sqrt(gamma)
    std::optional<double> y_lo, y_hi;   // explicit span override
    int shell_u_nodes = 160;
    int shell_p_nodes = 160;
    bool skip_late_time_check = false;  // for deliberate error-path tests
};

// Appendix width gamma(y) = dy^2 + (m dx/k0)^2 + (y/(2 k0 dx))^2.
double appendix_gamma(const PacketSpec& s, double y);

// Clock readout density rho(y)_{x>0} for a packet evaluated at late time t.
// detection_weight integrates the density over the full line.
// Throws PrematureReadoutError if the freely propagated incident packet
// still has more than 1e-3 of its mass on x < 0 at time t.
ClockHistogram readout_distribution(const PacketSpec& s, double t,
                                    const QuadratureGrid& grid, ReadoutOptions opt = {});
ClockHistogram readout_distribution(const BimodalPacketSpec& s, double t,
                                    const QuadratureGrid& grid, ReadoutOptions opt = {});
// Custom envelope (e.g. a truncated time-of-arrival eigenstate); energy-shell
// route only. The span must be given explicitly.
ClockHistogram readout_distribution(const Envelope& g, double m, double p0, double dy,
                                    const QuadratureGrid& grid, ReadoutOptions opt);

// Default late-time threshold t_c + 5 m dx/k0 + 5 dy, validated by the
// free-flight clearance check rather than trusted blindly.
double late_time(const PacketSpec& s);
double late_time(const BimodalPacketSpec& s);

// Flux-exact detection weight: the (|g|^2,|f|^2)-weighted average of
// (q/k)|A_T|^2 over the grid. Equals the t->infinity histogram mass.
double detection_weight_flux(const PacketSpec& s, const QuadratureGrid& grid);
double detection_weight_flux(const Envelope& g, double m, double norm_sq_prefactor,
                             double p0, double dy, const QuadratureGrid& grid);

struct PhasePeaks {
    double q0 = 0.0;       // sqrt(k0^2 + 2 m p0)
    double x_peak = 0.0;   // -(q0/k0) x0 + q0 t / m
    double y_peak = 0.0;   // t - m x_peak / q0, evaluated at x_peak
    double predicted_arrival = 0.0;  // m x0 / k0, exactly y_peak at x_peak

    double y_peak_at(double x, double t, double m) const { return t - m * x / q0; }
};

// Stationary-phase peak locations of the transmitted wave at time t.
PhasePeaks phase_peaks(const PacketSpec& s, double t);

struct TwoPeakRow {
    double dy = 0.0;
    double p0 = 0.0;
    double mass_slow = 0.0;       // window around t1 = m x0 / k1
    double mass_fast = 0.0;       // window around t2 = m x0 / k2
    double ratio = 0.0;           // mass_slow / mass_fast
    double predicted_ratio = 0.0; // w1 T(E1,<p>) / (w2 T(E2,<p>))
};

// Sweeps the clock accuracy for a bimodal packet, keeping p0*dy fixed at the
// base spec's product. Integration windows are +-3 local widths around each
// predicted arrival, split at the midpoint if they touch; throws
// UnresolvablePeaksError if |t1 - t2| < 3 * max width.
std::vector<TwoPeakRow> two_peak_experiment(const BimodalPacketSpec& s,
                                            std::span<const double> dy_sweep,
                                            ReadoutOptions opt = {});

}  // namespace qtoa
