#include "lcdual/boundaries.hpp"

#include "rootfind.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace lcdual {

double SwitchFunctions::f(double y) const {
    const double gap = util->conjugate(y / agent.kappa1) - util->conjugate(y / agent.kappa2);
    return gap / y + (agent.eps1 - agent.eps2);
}

double SwitchFunctions::h(double z) const {
    if (z > z_S)
        return util->conjugate(z / agent.kappa1) - util->conjugate(z) + agent.eps1 * z;
    return util->conjugate(z / agent.kappa2) - util->conjugate(z) + agent.eps2 * z;
}

double SwitchFunctions::c_hat(double z) const {
    if (z > z_S) return util->inv_marginal(z / agent.kappa1) / agent.kappa1;
    return util->inv_marginal(z / agent.kappa2) / agent.kappa2;
}

double SwitchFunctions::eps_hat(double z) const {
    return z > z_S ? agent.eps1 : agent.eps2;
}

double SwitchFunctions::flow_payoff(double z) const {
    if (z > z_S) return util->conjugate(z / agent.kappa1) + agent.eps1 * z;
    return util->conjugate(z / agent.kappa2) + agent.eps2 * z;
}

double solve_z_S(const AgentParams& agent, const UtilityModel& util, int max_iter) {
    SwitchFunctions sw{&util, agent, 0.0};
    auto f = [&](double y) { return sw.f(y); };
    const auto root = detail::expand_and_bisect(f, 1.0, 4.0, 0.0, max_iter, "solve_z_S");
    return root.x;
}

BoundaryContext make_context(const MarketParams& market, const AgentParams& agent,
                             UtilityPtr util, const QuadratureConfig& quad,
                             int root_max_iter) {
    market.validate();
    agent.validate();
    quad.validate();
    BoundaryContext ctx;
    ctx.market = market;
    ctx.agent = agent;
    ctx.util = std::move(util);
    ctx.derived = derive(market);
    ctx.w = make_weights(ctx.derived);
    ctx.quad = quad;
    ctx.root_max_iter = root_max_iter;
    ctx.sw = SwitchFunctions{ctx.util.get(), agent,
                             solve_z_S(agent, *ctx.util, root_max_iter)};
    return ctx;
}

double solve_z_hat(const BoundaryContext& ctx) {
    auto f = [&](double z) { return ctx.sw.h(z); };
    return detail::expand_and_bisect(f, 1.0, 4.0, 0.0, ctx.root_max_iter, "solve_z_hat").x;
}

double solve_z_bar(const BoundaryContext& ctx, bool* at_kink) {
    auto f = [&](double z) { return ctx.sw.eps_hat(z) - ctx.sw.c_hat(z); };
    const auto root =
        detail::expand_and_bisect(f, 1.0, 4.0, 0.0, ctx.root_max_iter, "solve_z_bar");
    // The wage gap jumps at z_S; when the sign change happens through the jump
    // the bisection pinches onto z_S and no zero of the function exists there.
    const bool kink = std::abs(root.fx) > 1e-8 * (1.0 + std::abs(ctx.agent.eps1)) &&
                      std::abs(root.x - ctx.sw.z_S) <= 1e-9 * ctx.sw.z_S;
    if (at_kink) *at_kink = kink;
    return kink ? ctx.sw.z_S : root.x;
}

namespace {

// The four kernel integrals of the coupled system. Fresh (unanchored) route.
struct PhiParts {
    const BoundaryContext& ctx;
    std::array<double, 1> bps{};
    Integrand ec, hh;

    explicit PhiParts(const BoundaryContext& c)
        : ctx(c), bps{c.sw.z_S},
          ec([&sw = c.sw](double e) { return sw.eps_hat(e) - sw.c_hat(e); }),
          hh([&sw = c.sw](double e) { return sw.h(e); }) {}

    double A1(double z2) const { // int_z2^inf eta^{-n1} (eps-c)
        return kernel_tail_upper(ec, -ctx.w.n1, z2, 0.0, bps, ctx.quad);
    }
    double A2(double z2) const { // int_0^z2 eta^{-n2} (eps-c)
        return kernel_tail_lower(ec, -ctx.w.n2, z2, 0.0, bps, ctx.quad);
    }
    double B1(double z1) const { // int_z1^inf eta^{-n1-1} h
        return kernel_tail_upper(hh, -ctx.w.n1 - 1.0, z1, 0.0, bps, ctx.quad);
    }
    double B2(double z1) const { // int_0^z1 eta^{-n2-1} h
        return kernel_tail_lower(hh, -ctx.w.n2 - 1.0, z1, 0.0, bps, ctx.quad);
    }
    double spanEC(double p, double a, double b) const {
        return kernel_span(ec, p, a, b, bps, ctx.quad);
    }
    double spanH(double p, double a, double b) const {
        return kernel_span(hh, p, a, b, bps, ctx.quad);
    }
};

} // namespace

double phi1(double z1, double z2, const BoundaryContext& ctx) {
    PhiParts parts(ctx);
    return parts.A1(z2) - ctx.w.n1 * parts.B1(z1);
}

double phi2(double z1, double z2, const BoundaryContext& ctx) {
    PhiParts parts(ctx);
    return parts.A2(z2) - ctx.w.n2 * parts.B2(z1);
}

Thresholds solve_free_boundaries(const BoundaryContext& ctx) {
    Thresholds th;
    th.z_S = ctx.sw.z_S;
    th.z_hat = solve_z_hat(ctx);
    th.z_bar = solve_z_bar(ctx, &th.z_bar_at_kink);
    th.diag.f_residual = std::abs(ctx.sw.f(th.z_S));
    th.diag.h_residual = std::abs(ctx.sw.h(th.z_hat));
    th.diag.zbar_residual =
        th.z_bar_at_kink ? 0.0 : std::abs(ctx.sw.eps_hat(th.z_bar) - ctx.sw.c_hat(th.z_bar));

    PhiParts parts(ctx);
    long evals = 0;

    // Anchored evaluation: semi-infinite limbs are integrated once at fixed
    // anchors, every candidate point then costs only a finite span.
    const double anchorEC = th.z_bar;
    const double anchorH = th.z_hat;
    const double A1a = parts.A1(anchorEC);
    const double A2a = parts.A2(anchorEC);
    const double B1a = parts.B1(anchorH);
    const double B2a = parts.B2(anchorH);

    auto A1_at = [&](double z2) { return A1a - parts.spanEC(-ctx.w.n1, anchorEC, z2); };
    auto A2_at = [&](double z2) { return A2a + parts.spanEC(-ctx.w.n2, anchorEC, z2); };
    auto B1_at = [&](double z1) { return B1a + parts.spanH(-ctx.w.n1 - 1.0, z1, anchorH); };
    auto B2_at = [&](double z1) { return B2a - parts.spanH(-ctx.w.n2 - 1.0, z1, anchorH); };

    // Inner map: unique root of phi2(z1, .) beyond max(z1, z_bar).
    auto inner_root = [&](double z1) {
        const double target = ctx.w.n2 * B2_at(z1);
        auto g = [&](double z2) {
            ++evals;
            return A2_at(z2) - target;
        };
        double lo = std::max(z1, th.z_bar) * (1.0 + 1e-12);
        double hi = 2.0 * std::max(z1, th.z_bar);
        double glo = g(lo);
        if (glo > 0.0) {
            std::ostringstream os;
            os << "inner bracket start not negative at z2 = " << lo << " (phi2 = " << glo
               << "); quadrature tolerance too loose";
            throw SolverError(os.str());
        }
        double ghi = g(hi);
        int guard = 0;
        while (ghi < 0.0) {
            hi *= 2.0;
            ghi = g(hi);
            if (++guard > 120 || hi > 1e15)
                throw SolverError("inner bracket: phi2 never turns positive");
        }
        return detail::bisect(g, lo, hi, glo, ghi, 0.0, ctx.root_max_iter).x;
    };

    // Outer function F(z1) = phi1(z1, inner_root(z1)) is strictly decreasing on
    // (0, z_hat) with F(0+) = +inf and F(z_hat) < 0; bisect on -F.
    auto outerG = [&](double z1) {
        const double z2 = inner_root(z1);
        ++evals;
        return -(A1_at(z2) - ctx.w.n1 * B1_at(z1));
    };
    const double lo = 1e-8 * th.z_hat;
    const double hi = th.z_hat * (1.0 - 1e-10);
    const double glo = outerG(lo);
    const double ghi = outerG(hi);
    if (!(glo < 0.0) || !(ghi > 0.0)) {
        std::ostringstream os;
        os << "outer bracket violation on (0, z_hat): F(" << lo << ") = " << -glo
           << ", F(" << hi << ") = " << -ghi
           << "; quadrature tolerance too loose for the free-boundary solve";
        throw SolverError(os.str());
    }
    const auto outer = detail::bisect(outerG, lo, hi, glo, ghi, 0.0, ctx.root_max_iter);
    th.z_R = outer.x;
    th.z_B = inner_root(th.z_R);
    th.diag.outer_iterations = outer.iterations;
    th.diag.phi_evaluations = evals;

    // Residuals and both coefficient routes, evaluated fresh.
    const double A1f = parts.A1(th.z_B);
    const double A2f = parts.A2(th.z_B);
    const double B1f = parts.B1(th.z_R);
    const double B2f = parts.B2(th.z_R);
    th.phi1_residual = A1f - ctx.w.n1 * B1f;
    th.phi2_residual = A2f - ctx.w.n2 * B2f;
    th.E1 = -ctx.w.scale * B1f;
    th.E2 = -ctx.w.scale * B2f;
    th.E1_alt = -ctx.w.scale / ctx.w.n1 * A1f;
    th.E2_alt = -ctx.w.scale / ctx.w.n2 * A2f;

    if (!(th.z_R > 0.0) || !(th.z_R < th.z_hat) || !(th.z_B > th.z_bar) ||
        !(th.z_B > th.z_R)) {
        std::ostringstream os;
        os << "free-boundary ordering violated: z_R = " << th.z_R << ", z_hat = "
           << th.z_hat << ", z_bar = " << th.z_bar << ", z_B = " << th.z_B;
        throw SolverError(os.str());
    }
    return th;
}

} // namespace lcdual
