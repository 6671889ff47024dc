// boundaries.hpp -- scalar thresholds of the dual problem and the coupled
// free-boundary system for the retirement and borrowing barriers.
#pragma once

#include "lcdual/params.hpp"
#include "lcdual/quadrature.hpp"
#include "lcdual/utility.hpp"
#include "lcdual/xfm.hpp"

namespace lcdual {

// Branch convention everywhere: the high-income job applies strictly above the
// switch threshold z_S, the high-satisfaction job at or below it.
struct SwitchFunctions {
    const UtilityModel* util = nullptr;
    AgentParams agent{};
    double z_S = 0.0;

    // Scaled utility gap between the two jobs; strictly increasing with root z_S.
    double f(double y) const;
    // Gap between post- and pre-retirement flow value; h/z strictly increasing.
    double h(double z) const;
    double c_hat(double z) const;   // candidate consumption
    double eps_hat(double z) const; // active wage
    double flow_payoff(double z) const; // conjugate(z/kappa) + eps z on the active branch
};

struct BoundaryDiagnostics {
    double f_residual = 0.0;
    double h_residual = 0.0;
    double zbar_residual = 0.0;
    int outer_iterations = 0;
    long phi_evaluations = 0;
};

struct Thresholds {
    double z_S = 0.0;   // job switch
    double z_hat = 0.0; // root of h
    double z_bar = 0.0; // root of eps_hat - c_hat
    double z_R = 0.0;   // retirement boundary, in (0, z_hat)
    double z_B = 0.0;   // reflection barrier, above z_bar
    double E1 = 0.0, E2 = 0.0;         // homogeneous coefficients, h-kernel route
    double E1_alt = 0.0, E2_alt = 0.0; // same coefficients, wage-gap kernel route
    double phi1_residual = 0.0;
    double phi2_residual = 0.0;
    bool z_bar_at_kink = false; // wage gap crosses zero exactly at z_S
    BoundaryDiagnostics diag{};
};

struct BoundaryContext {
    MarketParams market{};
    AgentParams agent{};
    UtilityPtr util;
    DerivedParams derived{};
    KernelWeights w{};
    QuadratureConfig quad{};
    int root_max_iter = 200;
    SwitchFunctions sw{};
};

BoundaryContext make_context(const MarketParams& market, const AgentParams& agent,
                             UtilityPtr util, const QuadratureConfig& quad,
                             int root_max_iter = 200);

double solve_z_S(const AgentParams& agent, const UtilityModel& util,
                 int max_iter = 200);
double solve_z_hat(const BoundaryContext& ctx);
// Returns the sign-change point of eps_hat - c_hat; sets *at_kink when the
// crossing happens through the jump at z_S rather than a zero.
double solve_z_bar(const BoundaryContext& ctx, bool* at_kink = nullptr);

// Coupled residual functions; both vanish at (z_R, z_B).
double phi1(double z1, double z2, const BoundaryContext& ctx);
double phi2(double z1, double z2, const BoundaryContext& ctx);

// Nested-bisection constructive solve: the inner map returns the unique root
// of phi2(z1, .) beyond max(z1, z_bar); the outer function z1 -> phi1(z1, .)
// falls strictly from +inf on (0, z_hat) and crosses zero once.
Thresholds solve_free_boundaries(const BoundaryContext& ctx);

} // namespace lcdual
