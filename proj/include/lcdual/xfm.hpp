// xfm.hpp -- resolvent transform of the discounted dual state:
//   Xi_g(y) = scale * [ y^{n2} int_0^y eta^{-n2-1} g deta
//                     + y^{n1} int_y^inf eta^{-n1-1} g deta ],
// scale = 2 / (theta^2 (n1 - n2)), together with its analytic derivative and
// a finite-difference residual against the generating ODE
//   (theta^2/2) y^2 Xi'' + (delta - r) y Xi' - delta Xi + g = 0.
#pragma once

#include "lcdual/params.hpp"
#include "lcdual/quadrature.hpp"

namespace lcdual {

struct KernelWeights {
    double n1;
    double n2;
    double scale; // 2 / (theta^2 (n1 - n2))
};

KernelWeights make_weights(const DerivedParams& derived);

double xi(const Integrand& g, double y, const KernelWeights& w,
          const QuadratureConfig& cfg, std::span<const double> breakpoints = {});

// d/dy Xi_g(y); the boundary terms of the two limbs cancel exactly.
double xi_prime(const Integrand& g, double y, const KernelWeights& w,
                const QuadratureConfig& cfg, std::span<const double> breakpoints = {});

// ODE residual with Xi'' from central differences of xi_prime (step fd_step).
double xi_ode_residual(const Integrand& g, double y, const KernelWeights& w,
                       const QuadratureConfig& cfg, double fd_step,
                       std::span<const double> breakpoints = {});

} // namespace lcdual
