// dualvalue.hpp -- the piecewise dual value function Q of the controller/
// stopper game, its variational-inequality verifier, and the primal inversion
// V(x) = min_y (Q(y) + y x) with the associated policy maps.
#pragma once

#include "lcdual/boundaries.hpp"
#include "lcdual/retired.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lcdual {

enum class GridRegion { RR, WR, AR };           // stopped / working / reflecting
enum class Job { B1, B2 };                      // high-income / high-satisfaction
enum class PolicyRegion { WORK_B1, WORK_B2, RETIRE_BOUNDARY, CONSTRAINED };
enum class RegimeFlag { SWITCHING, ALWAYS_B1, ALWAYS_B2 };

// Q(z) = J_R(z) on (0, z_R]; on [z_R, z_B] the particular solution anchored at
// z_R; constant beyond z_B. Q' uses the wage-gap kernel anchored at z_B, which
// builds the smooth-pasting and super-contact conditions in exactly.
class DualSolution {
public:
    double Q(double z) const;
    double Qp(double z) const;
    double Qpp(double z) const;
    double Q_const() const { return Q_zB_; } // level on [z_B, inf)

    // Equivalent representation E1 z^n1 + E2 z^n2 + psi_h(z) + J_R(z); kept as
    // an independent algebraic route for cross-checks.
    double Q_homog_form(double z) const;
    double psi_h_value(double z) const;

    const Thresholds& thresholds() const { return th_; }
    const RetiredSolution& retired() const { return ret_; }
    const BoundaryContext& context() const { return ctx_; }

private:
    friend DualSolution build_dual(const Thresholds&, const RetiredSolution&,
                                   const BoundaryContext&);
    // wage-gap spans from z to z_B with the two kernel powers
    void gap_spans(double z, double* s1, double* s2) const;

    Thresholds th_{};
    RetiredSolution ret_;
    BoundaryContext ctx_;
    double Q_zB_ = 0.0;
};

// Transform of the retirement gap h (splits panels at z_S and z_hat).
double psi_h(double z, const BoundaryContext& ctx, double z_hat);

// Verifies derivative pasting at z_R and evaluator consistency; throws
// SolverError when the residuals indicate a failed threshold solve.
DualSolution build_dual(const Thresholds& th, const RetiredSolution& retired,
                        const BoundaryContext& ctx);

struct HjbqvPoint {
    double z = 0.0;
    double lq = 0.0;  // (theta^2/2) z^2 Q'' + (delta-r) z Q' - delta Q + conj + h
    double tol = 0.0; // scale-aware classification tolerance
    GridRegion region = GridRegion::WR;
    bool pass = false;
    std::string detail; // set when the sign pattern is violated
};

// Sign pattern: lq <= tol and Q = J_R below z_R; |lq| <= tol, Q' < 0, Q >= J_R
// between the boundaries; lq >= -tol and Q' = 0 above z_B. Q'' jumps at z_R,
// so callers should exclude a small collar there.
HjbqvPoint hjbqv_residual(const DualSolution& sol, double z, double tol_scale = 1e-5);

struct PolicyPoint {
    double x = 0.0;
    double y_star = 0.0;
    double V = 0.0;
    double c_star = 0.0;
    Job job = Job::B2;
    PolicyRegion region = PolicyRegion::WORK_B2;
    double pi_candidate = 0.0; // heuristic dual-hedge amount; not a certified output
};

// Solves x = -Q'(y*) on (z_R, z_B]; wealth above the retirement level
// X_R(z_R) returns the post-retirement policy instead.
PolicyPoint invert_primal(const DualSolution& sol, double x);

struct PolicyTable {
    std::vector<PolicyPoint> rows;
    double x_ret = 0.0;                  // retirement wealth threshold X_R(z_R)
    RegimeFlag regime = RegimeFlag::SWITCHING;
    std::optional<double> x_S;           // job-switch wealth level when switching
};

PolicyTable policy_table(const DualSolution& sol, std::span<const double> x_grid);

std::string to_string(GridRegion r);
std::string to_string(Job j);
std::string to_string(PolicyRegion r);
std::string to_string(RegimeFlag r);

} // namespace lcdual
