// quadrature.hpp -- log-substituted power-kernel integrals with adaptive panels.
//
// Every integral in the solver is one of three shapes:
//   kernel_tail_lower:  y^q * int_0^y   eta^p g(eta) deta
//   kernel_tail_upper:  y^q * int_y^inf eta^p g(eta) deta
//   kernel_span:              int_a^b   eta^p g(eta) deta,  0 < a <= b
// The substitution eta = y e^{+-s} turns power-law kernels into exponentials,
// so convergent tails decay geometrically in s and panels stay smooth.
#pragma once

#include "lcdual/errors.hpp"

#include <functional>
#include <span>

namespace lcdual {

struct QuadratureConfig {
    double rel_tol = 1e-9;   // per-panel relative target
    double abs_tol = 1e-12;  // absolute floor for near-zero results
    int max_refine = 60;     // adaptive bisection depth per panel
    double tail_cut = 1e-12; // relative threshold for truncating semi-infinite limbs

    void validate() const; // throws ValidationError
};

using Integrand = std::function<double(double)>;

// y^q * int_0^y eta^p g(eta) deta. Needs the integrand to be o(eta^{-p-1})
// as eta -> 0; a non-decaying transformed tail raises QuadratureError.
// breakpoints: abscissae in eta where g kinks or jumps; panels split there.
double kernel_tail_lower(const Integrand& g, double p, double y, double q,
                         std::span<const double> breakpoints,
                         const QuadratureConfig& cfg);

// y^q * int_y^inf eta^p g(eta) deta with the analogous contract at infinity.
double kernel_tail_upper(const Integrand& g, double p, double y, double q,
                         std::span<const double> breakpoints,
                         const QuadratureConfig& cfg);

// int_a^b eta^p g(eta) deta over a finite positive span.
double kernel_span(const Integrand& g, double p, double a, double b,
                   std::span<const double> breakpoints,
                   const QuadratureConfig& cfg);

} // namespace lcdual
