// params.hpp -- market/agent constants and quantities derived from them.
#pragma once

#include "lcdual/errors.hpp"

namespace lcdual {

// All rates are annualized. Immutable after construction; safe to share.
struct MarketParams {
    double r;     // risk-free rate (1/year), > 0
    double mu;    // risky drift (1/year), > r
    double sigma; // volatility (1/sqrt(year)), > 0
    double delta; // subjective discount rate (1/year), > 0

    void validate() const; // throws ValidationError naming the offending field
};

struct AgentParams {
    double eps1;   // wage rate, high-income job ($/year)
    double eps2;   // wage rate, high-satisfaction job ($/year), 0 < eps2 < eps1
    double kappa1; // satisfaction factor, high-income job
    double kappa2; // satisfaction factor, high-satisfaction job, 0 < kappa1 < kappa2 < 1

    void validate() const;
};

// theta: Sharpe ratio; n1 > 1 and n2 < 0 are the roots of
//   (theta^2/2) n^2 + (delta - r - theta^2/2) n - delta = 0.
struct DerivedParams {
    double theta;
    double n1;
    double n2;
};

// Validates the market constants and solves the characteristic quadratic with
// the cancellation-free formula (larger-magnitude root first, other via Vieta).
DerivedParams derive(const MarketParams& market);

// Relative residual of the characteristic quadratic at n (diagnostic).
double quadratic_residual(const MarketParams& market, double n);

} // namespace lcdual
