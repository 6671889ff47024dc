#include "lcdual/retired.hpp"

#include "rootfind.hpp"

#include <cmath>
#include <sstream>

namespace lcdual {

namespace {

// Slope of ln inv_marginal against ln y near zero; Assumption-style gate for
// custom families: int_0^y eta^{-n2} I(eta) deta needs slope < 1 - n2.
double inv_marginal_tail_exponent(const UtilityModel& u) {
    const double y1 = 1e-8, y2 = 1e-6;
    return -(std::log(u.inv_marginal(y1)) - std::log(u.inv_marginal(y2))) /
           (std::log(y1) - std::log(y2));
}

} // namespace

RetiredSolution build_retired(const MarketParams& market, const DerivedParams& derived,
                              UtilityPtr utility, const QuadratureConfig& quad) {
    quad.validate();
    RetiredSolution s;
    s.util_ = std::move(utility);
    s.w_ = make_weights(derived);
    s.quad_ = quad;
    s.family_ = s.util_->family();
    s.delta_ = market.delta;
    s.merton_K_ = std::numeric_limits<double>::quiet_NaN();

    if (s.family_ == UtilityFamily::Crra) {
        const double g = s.util_->crra_gamma();
        const double K = market.r + (market.delta - market.r) / g +
                         (g - 1.0) * derived.theta * derived.theta / (2.0 * g * g);
        if (!(K > 0.0)) {
            std::ostringstream os;
            os << "infinite post-retirement value: Merton constant " << K
               << " is not positive for gamma = " << g;
            throw SolverError(os.str());
        }
        s.merton_K_ = K;
        s.gamma_ = g;
        s.closed_form_ = true;
    } else if (s.family_ == UtilityFamily::Log) {
        const double th2 = derived.theta * derived.theta;
        s.log_level_ = (0.5 * th2 - market.delta + market.r) / (market.delta * market.delta) -
                       1.0 / market.delta;
        s.closed_form_ = true;
    } else {
        const double m = inv_marginal_tail_exponent(*s.util_);
        if (!(m < 1.0 - derived.n2)) {
            std::ostringstream os;
            os << "inverse marginal grows like y^-" << m
               << " near zero, too fast for the kernel integrals (limit "
               << 1.0 - derived.n2 << ")";
            throw SolverError(os.str());
        }
    }
    return s;
}

double RetiredSolution::value(double y) const {
    if (!closed_form_) return value_quad(y);
    if (family_ == UtilityFamily::Crra)
        return gamma_ / (1.0 - gamma_) * std::pow(y, (gamma_ - 1.0) / gamma_) / merton_K_;
    return -std::log(y) / delta_ + log_level_;
}

double RetiredSolution::dvalue(double y) const { return -wealth(y); }

double RetiredSolution::d2value(double y) const {
    if (!closed_form_) return d2value_quad(y);
    if (family_ == UtilityFamily::Crra)
        return std::pow(y, -1.0 / gamma_ - 1.0) / (gamma_ * merton_K_);
    return 1.0 / (delta_ * y * y);
}

double RetiredSolution::wealth(double y) const {
    if (!closed_form_) return wealth_quad(y);
    if (family_ == UtilityFamily::Crra) return std::pow(y, -1.0 / gamma_) / merton_K_;
    return 1.0 / (delta_ * y);
}

double RetiredSolution::value_quad(double y) const {
    Integrand g = [this](double e) { return util_->conjugate(e); };
    return xi(g, y, w_, quad_);
}

double RetiredSolution::dvalue_quad(double y) const {
    Integrand g = [this](double e) { return util_->conjugate(e); };
    return xi_prime(g, y, w_, quad_);
}

double RetiredSolution::wealth_quad(double y) const {
    Integrand g = [this](double e) { return util_->inv_marginal(e); };
    const double lo = kernel_tail_lower(g, -w_.n2, y, w_.n2 - 1.0, {}, quad_);
    const double hi = kernel_tail_upper(g, -w_.n1, y, w_.n1 - 1.0, {}, quad_);
    return w_.scale * (lo + hi);
}

double RetiredSolution::d2value_quad(double y) const {
    // J_R'' = -X_R'; the kernel boundary terms cancel in X_R'.
    Integrand g = [this](double e) { return util_->inv_marginal(e); };
    const double lo = kernel_tail_lower(g, -w_.n2, y, w_.n2 - 2.0, {}, quad_);
    const double hi = kernel_tail_upper(g, -w_.n1, y, w_.n1 - 2.0, {}, quad_);
    return -w_.scale * ((w_.n2 - 1.0) * lo + (w_.n1 - 1.0) * hi);
}

RetiredPolicy retired_value(const RetiredSolution& sol, double x) {
    if (!(x > 0.0)) throw ValidationError("retired_value requires wealth x > 0");
    // wealth(y) is strictly decreasing, so x - wealth(y) increases through 0.
    auto f = [&](double y) { return x - sol.wealth(y); };
    detail::RootResult root;
    try {
        root = detail::expand_and_bisect(f, 1.0, 4.0, 0.0, 200, "retired_value");
    } catch (const SolverError& e) {
        std::ostringstream os;
        os << "wealth level " << x << " outside the reachable range: " << e.what();
        throw SolverError(os.str());
    }
    RetiredPolicy p;
    p.y_R = root.x;
    p.V_R = sol.value(p.y_R) + p.y_R * x;
    p.c0 = sol.utility().inv_marginal(p.y_R);
    return p;
}

} // namespace lcdual
