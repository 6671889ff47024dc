#include "lcdual/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace lcdual {

namespace {

constexpr double kMaxLogArg = 690.0; // keeps e^{+-s} inside double range

// Neumaier compensated accumulator; panel sums cancel heavily in the
// free-boundary equations, so plain summation is not accurate enough.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// One 15-point Gauss-Kronrod application with its embedded error estimate and
// the L1 norm of the integrand (the roundoff scale of the panel).
double gk15(const std::function<double(double)>& f, double s0, double s1,
            double* err, double* l1) {
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 15>::integrate(f, s0, s1, 0, 0.0, err, l1);
}

struct PanelBudget {
    int remaining;
};

// Panels are accepted well below the user-facing tolerance: downstream kernel
// forms multiply span integrals by large powers of the abscissa, so the
// per-panel target carries a safety factor.
constexpr double kPanelSafety = 1e-3;

// Bisects the panel until the local estimate meets the scaled
// rel_tol*|value| + abs_tol target. Two further stops: the estimate has
// reached the roundoff scale of the panel (integrand cancellation noise), or
// splitting stopped improving the estimate, so refinement cannot help.
double panel_adaptive(const std::function<double(double)>& f, double s0, double s1,
                      const QuadratureConfig& cfg, int depth, double parent_err,
                      PanelBudget& budget) {
    double err = 0.0, l1 = 0.0;
    const double v = gk15(f, s0, s1, &err, &l1);
    if (std::isnan(v)) {
        std::ostringstream os;
        os << "non-finite panel integral on s in [" << s0 << ", " << s1 << "]";
        throw QuadratureError(os.str());
    }
    if (err <= kPanelSafety * (cfg.rel_tol * std::abs(v) + cfg.abs_tol) ||
        err <= 4e-15 * l1 || (depth > 0 && err >= 0.4 * parent_err) ||
        depth >= cfg.max_refine || (s1 - s0) < 1e-13 * (1.0 + std::abs(s0)))
        return v;
    if (--budget.remaining <= 0)
        throw QuadratureError("panel refinement budget exhausted; tolerance unreachable");
    const double mid = 0.5 * (s0 + s1);
    return panel_adaptive(f, s0, mid, cfg, depth + 1, 0.5 * err, budget) +
           panel_adaptive(f, mid, s1, cfg, depth + 1, 0.5 * err, budget);
}

double panel(const std::function<double(double)>& f, double s0, double s1,
             const QuadratureConfig& cfg) {
    if (!(s1 > s0)) return 0.0;
    PanelBudget budget{100000};
    return panel_adaptive(f, s0, s1, cfg, 0, 0.0, budget);
}

// Wraps g so a NaN/Inf evaluation reports the offending abscissa.
std::function<double(double)> guarded(const Integrand& g) {
    return [&g](double eta) {
        const double v = g(eta);
        if (std::isnan(v)) {
            std::ostringstream os;
            os << "integrand returned NaN at eta = " << eta;
            throw QuadratureError(os.str());
        }
        return v;
    };
}

// Edges 0,1,2,4,... capped at kMaxLogArg, with breakpoint images inserted.
std::vector<double> window_edges(std::span<const double> bp_s, double s_cap) {
    std::vector<double> edges{0.0};
    double w = 1.0;
    double s = 0.0;
    while (s < s_cap) {
        s = std::min(s + w, s_cap);
        edges.push_back(s);
        w = std::min(2.0 * w, 128.0);
    }
    for (double sb : bp_s)
        if (sb > 0.0 && sb < s_cap) edges.push_back(sb);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                edges.end());
    return edges;
}

// Integrates int_0^inf f(s) ds where f decays (eventually) geometrically.
// Stops once two consecutive windows fall below the tail threshold; a tail
// still alive at the s-cap is reported as divergent.
double semi_infinite(const std::function<double(double)>& f,
                     std::span<const double> bp_s, const QuadratureConfig& cfg,
                     double s_cap) {
    const auto edges = window_edges(bp_s, s_cap);
    Kahan acc;
    int quiet = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double v = panel(f, edges[i], edges[i + 1], cfg);
        acc.add(v);
        const double thresh = cfg.tail_cut * (std::abs(acc.value()) + cfg.abs_tol);
        if (std::abs(v) <= thresh && edges[i] >= 4.0) {
            if (++quiet >= 2) return acc.value();
        } else {
            quiet = 0;
        }
    }
    std::ostringstream os;
    os << "tail not below cutoff by s = " << edges.back()
       << " (integral so far " << acc.value() << "); integrand may not satisfy "
          "the decay needed for convergence";
    throw QuadratureError(os.str());
}

} // namespace

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0) || rel_tol > 1e-3)
        throw ValidationError("rel_tol must lie in (0, 1e-3]");
    if (!(abs_tol > 0.0)) throw ValidationError("abs_tol must be positive");
    if (max_refine < 10) throw ValidationError("max_refine must be at least 10");
    if (!(tail_cut > 0.0)) throw ValidationError("tail_cut must be positive");
}

double kernel_tail_lower(const Integrand& g, double p, double y, double q,
                         std::span<const double> breakpoints,
                         const QuadratureConfig& cfg) {
    if (!(y > 0.0)) throw ValidationError("kernel_tail_lower requires y > 0");
    const auto gg = guarded(g);
    const double lny = std::log(y);
    const double c = p + 1.0; // eta = y e^{-s}: integrand e^{-c s} g(y e^{-s})
    auto f = [&](double s) { return std::exp(-c * s) * gg(std::exp(lny - s)); };

    std::vector<double> bp_s;
    for (double b : breakpoints)
        if (b > 0.0 && b < y) bp_s.push_back(lny - std::log(b));
    const double s_cap = std::min(kMaxLogArg, kMaxLogArg + lny); // keep eta representable
    const double raw = semi_infinite(f, bp_s, cfg, s_cap);
    return std::exp((q + c) * lny) * raw;
}

double kernel_tail_upper(const Integrand& g, double p, double y, double q,
                         std::span<const double> breakpoints,
                         const QuadratureConfig& cfg) {
    if (!(y > 0.0)) throw ValidationError("kernel_tail_upper requires y > 0");
    const auto gg = guarded(g);
    const double lny = std::log(y);
    const double c = p + 1.0; // eta = y e^{+s}: integrand e^{+c s} g(y e^{s})
    auto f = [&](double s) { return std::exp(c * s) * gg(std::exp(lny + s)); };

    std::vector<double> bp_s;
    for (double b : breakpoints)
        if (b > y) bp_s.push_back(std::log(b) - lny);
    const double s_cap = std::min(kMaxLogArg, kMaxLogArg - lny);
    const double raw = semi_infinite(f, bp_s, cfg, s_cap);
    return std::exp((q + c) * lny) * raw;
}

double kernel_span(const Integrand& g, double p, double a, double b,
                   std::span<const double> breakpoints,
                   const QuadratureConfig& cfg) {
    if (!(a > 0.0)) throw ValidationError("kernel_span requires a > 0");
    if (!(b >= a)) throw ValidationError("kernel_span requires b >= a");
    if (a == b) return 0.0;
    const auto gg = guarded(g);
    const double lna = std::log(a);
    const double c = p + 1.0; // eta = a e^{s}, s in [0, ln(b/a)]
    auto f = [&](double s) { return std::exp(c * s) * gg(std::exp(lna + s)); };

    const double s_end = std::log(b) - lna;
    std::vector<double> edges{0.0, s_end};
    for (double bp : breakpoints)
        if (bp > a && bp < b) edges.push_back(std::log(bp) - lna);
    // cap panel length; adaptive refinement handles the rest
    for (double s = 2.0; s < s_end; s += 2.0) edges.push_back(s);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double x, double z) { return std::abs(x - z) < 1e-15; }),
                edges.end());

    Kahan acc;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        acc.add(panel(f, edges[i], edges[i + 1], cfg));
    return std::exp(c * lna) * acc.value();
}

} // namespace lcdual
