#include "qtoa/booster.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "qtoa/errors.hpp"
#include "qtoa/quadrature.hpp"

namespace qtoa {

double BoosterParams::window_hi() const {
    return std::sqrt(std::min(W, V1));
}

BoosterParams tune(double m, double k, double k_prime, double lambda) {
    if (m <= 0.0) throw DomainError("mass must be positive");
    if (k <= 0.0 || lambda <= 0.0) throw DomainError("k and lambda must be positive");
    if (k_prime <= k) throw DomainError("booster needs k_prime > k");
    BoosterParams b;
    b.m = m;
    b.k = k;
    b.k_prime = k_prime;
    b.lambda = lambda;
    b.q = lambda * k_prime / k;
    b.alpha = k_prime * k + b.q * lambda;
    b.V1 = k * k + b.q * b.q;
    b.W = k * k + lambda * lambda;
    b.V2 = k_prime * k_prime - k * k;
    return b;
}

BoosterChannel booster_channel(const BoosterParams& params, double k_in) {
    if (k_in <= 0.0) throw DomainError("incident wavenumber must be positive");
    if (k_in >= params.window_hi()) {
        std::ostringstream os;
        os << "k_in = " << k_in << " outside the propagating window (0, "
           << params.window_hi() << "): an evanescent channel would open";
        throw DomainError(os.str());
    }
    BoosterChannel c;
    c.k_in = k_in;
    c.q = std::sqrt(params.V1 - k_in * k_in);
    c.lambda = std::sqrt(params.W - k_in * k_in);
    c.k_prime = std::sqrt(k_in * k_in + params.V2);
    const double A = std::sqrt(params.alpha);

    // Unknowns (phi_Lup, phi_Ldown, phi_Rup, phi_Rdown):
    //   continuity:  phi_Rup - phi_Lup = 1,  phi_Ldown = phi_Rdown
    //   jump up:    -lambda phi_Rup - ik(1 - phi_Lup) = A phi_Rdown
    //   jump down:   ik' phi_Rdown - q phi_Ldown = A phi_Rup
    Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
    Eigen::Vector4cd rhs = Eigen::Vector4cd::Zero();
    M(0, 0) = -1.0; M(0, 2) = 1.0;                 rhs(0) = 1.0;
    M(1, 1) = 1.0;  M(1, 3) = -1.0;                rhs(1) = 0.0;
    M(2, 0) = I * k_in; M(2, 2) = -c.lambda; M(2, 3) = -A; rhs(2) = I * k_in;
    M(3, 1) = -c.q; M(3, 2) = -A; M(3, 3) = I * c.k_prime; rhs(3) = 0.0;

    Eigen::Vector4cd v = M.partialPivLu().solve(rhs);
    c.solve_residual = (M * v - rhs).norm();
    if (c.solve_residual > 1e-12)
        throw ResolutionError("booster matching system solve residual too large");
    c.phi_L_up = v(0);
    c.phi_L_down = v(1);
    c.phi_R_up = v(2);
    c.phi_R_down = v(3);
    c.J_L_up = std::norm(c.phi_L_up);
    c.J_R_down = (c.k_prime / k_in) * std::norm(c.phi_R_down);
    return c;
}

DistortionResult packet_distortion(const BoosterParams& params, const Envelope& g,
                                   int n_points) {
    const double hi = params.window_hi();
    for (const auto& iv : g.support) {
        if (iv.lo <= 0.0 || iv.hi >= hi) {
            std::ostringstream os;
            os << "envelope support [" << iv.lo << ", " << iv.hi
               << "] leaves the propagating window (0, " << hi << ")";
            throw DomainError(os.str());
        }
    }
    AxisRule ax = gl_axis_union(g.support, n_points);
    DistortionResult r;
    r.k.resize(ax.size());
    r.transmission.resize(ax.size());
    double norm_in = 0.0, norm_out = 0.0;
    std::vector<double> w2(ax.size());
    for (std::size_t i = 0; i < ax.size(); ++i) {
        r.k[i] = ax.nodes[i];
        r.transmission[i] = booster_channel(params, ax.nodes[i]).J_R_down;
        w2[i] = std::norm(g(ax.nodes[i]));
        norm_in += ax.weights[i] * w2[i];
        norm_out += ax.weights[i] * w2[i] * r.transmission[i];
    }
    for (std::size_t i = 0; i < ax.size(); ++i)
        r.metric += ax.weights[i] *
                    std::abs(w2[i] / norm_in - w2[i] * r.transmission[i] / norm_out);
    return r;
}

}  // namespace qtoa
