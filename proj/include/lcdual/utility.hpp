// utility.hpp -- felicity models: evaluations u, u', inverse marginal, convex conjugate.
#pragma once

#include "lcdual/errors.hpp"

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lcdual {

enum class UtilityFamily { Crra, Log, Custom };

// A felicity model: u strictly increasing, strictly concave, C^1, with
// u'(c) -> 0 as c -> infinity. The inverse marginal is extended by
// inv_marginal(y) = 0 for y >= marginal_at_zero(), and the conjugate equals
// u(0) there. Implementations must be pure and reentrant.
class UtilityModel {
public:
    virtual ~UtilityModel() = default;

    virtual double u(double c) const = 0;
    virtual double marginal(double c) const = 0;      // u'(c), c > 0
    virtual double inv_marginal(double y) const = 0;  // (u')^{-1}, clamped past u'(0)
    virtual double conjugate(double y) const = 0;     // sup_{c>=0} (u(c) - y c)
    virtual double marginal_at_zero() const { return std::numeric_limits<double>::infinity(); }

    virtual UtilityFamily family() const { return UtilityFamily::Custom; }
    virtual double crra_gamma() const { return std::numeric_limits<double>::quiet_NaN(); }
};

using UtilityPtr = std::shared_ptr<const UtilityModel>;

// Power family u(c) = c^{1-gamma}/(1-gamma); gamma > 0, gamma != 1.
UtilityPtr make_crra(double gamma);

// u(c) = ln c.
UtilityPtr make_log();

struct ConsistencyReport {
    bool pass = true;
    double worst_inverse_residual = 0.0;    // |inv_marginal(u'(c)) - c| / (1+|c|)
    double worst_conjugate_residual = 0.0;  // |conj(y) - (u(I(y)) - y I(y))| / (1+|conj|)
    double worst_conjugate_deriv_residual = 0.0; // central-diff conj' vs -I
    bool marginal_decreasing = true;
    bool inv_marginal_decreasing = true;
    std::vector<double> failing_points;
    std::string summary() const;
};

// Asserts the defining identities of a model on a strictly positive grid.
ConsistencyReport check_consistency(const UtilityModel& model,
                                    std::span<const double> grid, double tol);

} // namespace lcdual
