#include "lcdual/params.hpp"

#include <cmath>

namespace lcdual {

void MarketParams::validate() const {
    if (!(r > 0.0)) throw ValidationError("r must be positive");
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
    if (!(mu > r)) throw ValidationError("mu must exceed r");
}

void AgentParams::validate() const {
    if (!(eps2 > 0.0)) throw ValidationError("eps2 must be positive");
    if (!(eps1 > eps2)) throw ValidationError("eps1 must exceed eps2");
    if (!(kappa1 > 0.0)) throw ValidationError("kappa1 must be positive");
    if (!(kappa2 > kappa1)) throw ValidationError("kappa2 must exceed kappa1");
    if (!(kappa2 < 1.0)) throw ValidationError("kappa2 must be below 1");
}

DerivedParams derive(const MarketParams& market) {
    market.validate();
    const double theta = (market.mu - market.r) / market.sigma;
    const double a = 0.5 * theta * theta;
    const double b = market.delta - market.r - a;
    const double c = -market.delta;

    // Discriminant is b^2 + 2 theta^2 delta > 0, so both roots are real.
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    const double q = -0.5 * (b + std::copysign(disc, b));
    const double root1 = q / a;
    const double root2 = c / q;

    DerivedParams d;
    d.theta = theta;
    d.n1 = std::max(root1, root2);
    d.n2 = std::min(root1, root2);
    return d;
}

double quadratic_residual(const MarketParams& market, double n) {
    const double theta = (market.mu - market.r) / market.sigma;
    const double a = 0.5 * theta * theta;
    const double b = market.delta - market.r - a;
    const double c = -market.delta;
    const double value = (a * n + b) * n + c;
    const double scale = std::abs(a * n * n) + std::abs(b * n) + std::abs(c);
    return std::abs(value) / scale;
}

} // namespace lcdual
