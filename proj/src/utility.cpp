#include "lcdual/utility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lcdual {

namespace {

class CrraUtility final : public UtilityModel {
public:
    explicit CrraUtility(double gamma) : gamma_(gamma), p_(1.0 - 1.0 / gamma) {}

    double u(double c) const override {
        if (c == 0.0)
            return gamma_ > 1.0 ? -std::numeric_limits<double>::infinity() : 0.0;
        return std::pow(c, 1.0 - gamma_) / (1.0 - gamma_);
    }
    double marginal(double c) const override { return std::pow(c, -gamma_); }
    double inv_marginal(double y) const override { return std::pow(y, -1.0 / gamma_); }
    double conjugate(double y) const override {
        return gamma_ / (1.0 - gamma_) * std::pow(y, p_);
    }
    UtilityFamily family() const override { return UtilityFamily::Crra; }
    double crra_gamma() const override { return gamma_; }

private:
    double gamma_;
    double p_; // (gamma-1)/gamma, the conjugate exponent
};

class LogUtility final : public UtilityModel {
public:
    double u(double c) const override {
        return c == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(c);
    }
    double marginal(double c) const override { return 1.0 / c; }
    double inv_marginal(double y) const override { return 1.0 / y; }
    double conjugate(double y) const override { return -std::log(y) - 1.0; }
    UtilityFamily family() const override { return UtilityFamily::Log; }
};

} // namespace

UtilityPtr make_crra(double gamma) {
    if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
    if (gamma == 1.0) throw ValidationError("gamma must not equal 1 (use the log family)");
    return std::make_shared<CrraUtility>(gamma);
}

UtilityPtr make_log() { return std::make_shared<LogUtility>(); }

ConsistencyReport check_consistency(const UtilityModel& model,
                                    std::span<const double> grid, double tol) {
    ConsistencyReport rep;
    auto note_failure = [&](double pt) {
        rep.pass = false;
        rep.failing_points.push_back(pt);
    };

    double prev_marginal = std::numeric_limits<double>::infinity();
    double prev_inv = std::numeric_limits<double>::infinity();
    for (double c : grid) {
        const double y = model.marginal(c);
        const double inv_res =
            std::abs(model.inv_marginal(y) - c) / (1.0 + std::abs(c));
        rep.worst_inverse_residual = std::max(rep.worst_inverse_residual, inv_res);
        if (inv_res > tol) note_failure(c);

        if (y >= prev_marginal) {
            rep.marginal_decreasing = false;
            note_failure(c);
        }
        prev_marginal = y;

        if (c < model.marginal_at_zero()) {
            const double iv = model.inv_marginal(c); // reuse grid points as y-abscissae
            if (iv >= prev_inv) {
                rep.inv_marginal_decreasing = false;
                note_failure(c);
            }
            prev_inv = iv;

            const double conj = model.conjugate(c);
            const double direct = model.u(model.inv_marginal(c)) - c * iv;
            const double conj_res = std::abs(conj - direct) / (1.0 + std::abs(conj));
            rep.worst_conjugate_residual = std::max(rep.worst_conjugate_residual, conj_res);
            if (conj_res > tol) note_failure(c);

            const double step = 1e-5 * c;
            const double fd = (model.conjugate(c + step) - model.conjugate(c - step)) / (2.0 * step);
            const double deriv_res = std::abs(fd + iv) / (1.0 + std::abs(iv));
            rep.worst_conjugate_deriv_residual =
                std::max(rep.worst_conjugate_deriv_residual, deriv_res);
            // central differences carry O(step^2) truncation error of their own
            if (deriv_res > std::max(tol, 1e-7)) note_failure(c);
        }
    }
    return rep;
}

std::string ConsistencyReport::summary() const {
    std::ostringstream os;
    os << (pass ? "pass" : "FAIL")
       << " inverse=" << worst_inverse_residual
       << " conjugate=" << worst_conjugate_residual
       << " conjugate_deriv=" << worst_conjugate_deriv_residual;
    if (!failing_points.empty()) os << " failing_points=" << failing_points.size();
    return os.str();
}

} // namespace lcdual
