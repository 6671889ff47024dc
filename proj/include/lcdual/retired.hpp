// retired.hpp -- post-retirement dual objects: the dual value J_R, the wealth
// map X_R = -J_R', and the duality inversion V_R(x) = min_y (J_R(y) + y x).
#pragma once

#include "lcdual/params.hpp"
#include "lcdual/utility.hpp"
#include "lcdual/xfm.hpp"

namespace lcdual {

// Immutable after build; evaluators are reentrant. When the utility family has
// closed forms (power/log) they are the primary route and the kernel-quadrature
// route stays available for cross-checks; otherwise quadrature is primary.
class RetiredSolution {
public:
    double value(double y) const;   // J_R(y), strictly convex
    double dvalue(double y) const;  // J_R'(y) = -wealth(y) < 0
    double d2value(double y) const; // J_R''(y) > 0
    double wealth(double y) const;  // X_R(y), strictly decreasing, (0,inf) onto (0,inf)

    double value_quad(double y) const;
    double dvalue_quad(double y) const;
    double d2value_quad(double y) const;
    double wealth_quad(double y) const;

    bool closed_form() const { return closed_form_; }
    double merton_constant() const { return merton_K_; } // NaN unless power family
    const UtilityModel& utility() const { return *util_; }

private:
    friend RetiredSolution build_retired(const MarketParams&, const DerivedParams&,
                                         UtilityPtr, const QuadratureConfig&);
    UtilityPtr util_;
    KernelWeights w_{};
    QuadratureConfig quad_{};
    UtilityFamily family_ = UtilityFamily::Custom;
    bool closed_form_ = false;
    double merton_K_ = 0.0;
    double gamma_ = 0.0;
    double log_level_ = 0.0; // additive constant of the log-family value
    double delta_ = 0.0;
};

// Gate: the power family needs a positive Merton constant
//   K = r + (delta - r)/gamma + (gamma - 1) theta^2 / (2 gamma^2)
// for a finite post-retirement value.
RetiredSolution build_retired(const MarketParams& market, const DerivedParams& derived,
                              UtilityPtr utility, const QuadratureConfig& quad);

struct RetiredPolicy {
    double y_R; // dual state solving wealth(y_R) = x
    double V_R; // primal value value(y_R) + y_R x
    double c0;  // initial consumption inv_marginal(y_R)
};

RetiredPolicy retired_value(const RetiredSolution& sol, double x);

} // namespace lcdual
