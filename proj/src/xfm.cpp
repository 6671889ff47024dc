#include "lcdual/xfm.hpp"

#include <cmath>

namespace lcdual {

KernelWeights make_weights(const DerivedParams& d) {
    KernelWeights w;
    w.n1 = d.n1;
    w.n2 = d.n2;
    w.scale = 2.0 / (d.theta * d.theta * (d.n1 - d.n2));
    return w;
}

double xi(const Integrand& g, double y, const KernelWeights& w,
          const QuadratureConfig& cfg, std::span<const double> bps) {
    const double lo = kernel_tail_lower(g, -w.n2 - 1.0, y, w.n2, bps, cfg);
    const double hi = kernel_tail_upper(g, -w.n1 - 1.0, y, w.n1, bps, cfg);
    return w.scale * (lo + hi);
}

double xi_prime(const Integrand& g, double y, const KernelWeights& w,
                const QuadratureConfig& cfg, std::span<const double> bps) {
    const double lo = kernel_tail_lower(g, -w.n2 - 1.0, y, w.n2 - 1.0, bps, cfg);
    const double hi = kernel_tail_upper(g, -w.n1 - 1.0, y, w.n1 - 1.0, bps, cfg);
    return w.scale * (w.n2 * lo + w.n1 * hi);
}

double xi_ode_residual(const Integrand& g, double y, const KernelWeights& w,
                       const QuadratureConfig& cfg, double fd_step,
                       std::span<const double> bps) {
    // Operator coefficients recovered from the roots:
    //   theta^2/2 = 1/(scale (n1-n2)),  delta - r = (theta^2/2)(1 - n1 - n2),
    //   delta = -(theta^2/2) n1 n2.
    const double half_theta_sq = 1.0 / (w.scale * (w.n1 - w.n2));
    const double drift = half_theta_sq * (1.0 - w.n1 - w.n2);
    const double discount = -half_theta_sq * w.n1 * w.n2;

    const double h = fd_step;
    const double d2 = (xi_prime(g, y + h, w, cfg, bps) - xi_prime(g, y - h, w, cfg, bps)) / (2.0 * h);
    const double d1 = xi_prime(g, y, w, cfg, bps);
    const double v = xi(g, y, w, cfg, bps);
    return half_theta_sq * y * y * d2 + drift * y * d1 - discount * v + g(y);
}

} // namespace lcdual
