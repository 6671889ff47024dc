#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcdual/dualvalue.hpp"

#include <cmath>
#include <vector>

using namespace lcdual;

namespace {

const MarketParams kRef{0.02, 0.07, 0.25, 0.10};
const AgentParams kAgent{1.0, 0.5, 0.25, 0.64};

struct Model {
    BoundaryContext ctx;
    RetiredSolution retired;
    Thresholds th;
    DualSolution dual;
};

const Model& ref_model() {
    static const Model m = [] {
        BoundaryContext ctx = make_context(kRef, kAgent, make_crra(2.0), QuadratureConfig{});
        RetiredSolution retired = build_retired(kRef, ctx.derived, ctx.util, ctx.quad);
        Thresholds th = solve_free_boundaries(ctx);
        DualSolution dual = build_dual(th, retired, ctx);
        return Model{ctx, retired, th, dual};
    }();
    return m;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i)
        g.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return g;
}

} // namespace

TEST_CASE("pasting and flattening at the boundaries") {
    const Model& m = ref_model();
    const double zR = m.th.z_R, zB = m.th.z_B;
    CHECK(std::abs(m.dual.Q(zR) - m.retired.value(zR)) <= 1e-8);
    CHECK(std::abs(m.dual.Qp(zR * (1 + 1e-12)) - m.retired.dvalue(zR)) <= 1e-8);
    CHECK(std::abs(m.dual.Qp(zB * (1 - 1e-12))) <= 1e-8);
    CHECK(std::abs(m.dual.Qpp(zB * (1 - 1e-12))) <= 1e-6);
}

TEST_CASE("the two representations of the value agree") {
    const Model& m = ref_model();
    const double mid = 0.5 * (m.th.z_R + m.th.z_B);
    CHECK(m.dual.Q_homog_form(mid) == doctest::Approx(m.dual.Q(mid)).epsilon(1e-7));
    // psi_h is the plain transform of the retirement gap
    Integrand hh = [&](double e) { return m.ctx.sw.h(e); };
    const std::vector<double> bps{m.th.z_S, m.th.z_hat};
    CHECK(m.dual.psi_h_value(mid) ==
          doctest::Approx(xi(hh, mid, m.ctx.w, m.ctx.quad, bps)).epsilon(1e-9));
}

TEST_CASE("transform of the retirement gap satisfies its ODE") {
    const Model& m = ref_model();
    const double z = 2.0, h = 1e-4 * z;
    auto psi = [&](double y) { return psi_h(y, m.ctx, m.th.z_hat); };
    const double d2 = (psi(z + h) - 2.0 * psi(z) + psi(z - h)) / (h * h);
    const double d1 = (psi(z + h) - psi(z - h)) / (2.0 * h);
    const double res = 0.5 * m.ctx.derived.theta * m.ctx.derived.theta * z * z * d2 +
                       (kRef.delta - kRef.r) * z * d1 - kRef.delta * psi(z) +
                       m.ctx.sw.h(z);
    CHECK(std::abs(res) <= 1e-5 * (1.0 + std::abs(m.ctx.sw.h(z))));
    // discounted average of a gap that is negative near zero stays negative
    CHECK(psi(0.01) < 0.0);
}

TEST_CASE("variational sign pattern by region") {
    const Model& m = ref_model();
    const double zR = m.th.z_R, zB = m.th.z_B;

    const HjbqvPoint below = hjbqv_residual(m.dual, 0.5 * zR);
    CHECK(below.region == GridRegion::RR);
    CHECK(below.pass);
    CHECK(below.lq == doctest::Approx(m.ctx.sw.h(0.5 * zR)).epsilon(1e-6));
    CHECK(below.lq < 0.0);

    const HjbqvPoint mid = hjbqv_residual(m.dual, 0.5 * (zR + zB));
    CHECK(mid.region == GridRegion::WR);
    CHECK(mid.pass);
    CHECK(std::abs(mid.lq) <= mid.tol);

    const HjbqvPoint above = hjbqv_residual(m.dual, 2.0 * zB);
    CHECK(above.region == GridRegion::AR);
    CHECK(above.pass);
    CHECK(above.lq > 0.0);
    // identity: the residual above the barrier equals the accumulated wage gap
    Integrand ec = [&](double e) { return m.ctx.sw.eps_hat(e) - m.ctx.sw.c_hat(e); };
    const std::vector<double> bps{m.th.z_S};
    const double direct = kernel_span(ec, 0.0, zB, 2.0 * zB, bps, m.ctx.quad);
    CHECK(above.lq == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("full-grid classification") {
    const Model& m = ref_model();
    const double collar = 1e-6 * m.th.z_R;
    for (double z : log_grid(m.th.z_R / 10.0, 10.0 * m.th.z_B, 500)) {
        if (std::abs(z - m.th.z_R) <= collar) continue;
        const HjbqvPoint pt = hjbqv_residual(m.dual, z);
        INFO("z = ", z, " detail: ", pt.detail);
        CHECK(pt.pass);
    }
}

TEST_CASE("shape of the dual value") {
    const Model& m = ref_model();
    const double zR = m.th.z_R, zB = m.th.z_B;
    for (double z : log_grid(zR * (1 + 1e-6), zB * (1 - 1e-6), 500))
        CHECK(m.dual.Qpp(z) > 0.0);
    for (double z : log_grid(zR / 20.0, zB * (1 - 1e-6), 100)) CHECK(m.dual.Qp(z) < 0.0);
    for (double z : {zB, 1.5 * zB, 10.0 * zB}) {
        CHECK(m.dual.Qp(z) == 0.0);
        CHECK(m.dual.Q(z) == m.dual.Q_const());
    }
    for (double z : log_grid(zR / 20.0, 10.0 * zB, 120)) {
        const double gap = m.dual.Q(z) - m.retired.value(z);
        CHECK(gap >= -1e-10 * (1.0 + std::abs(m.dual.Q(z))));
        if (z <= zR) CHECK(std::abs(gap) <= 1e-10 * (1.0 + std::abs(m.dual.Q(z))));
    }
}

TEST_CASE("derivative evaluator matches differences of the value") {
    const Model& m = ref_model();
    for (double z : {0.3, 1.0, 3.0, 6.0}) {
        auto fd_err = [&](double h) {
            return std::abs((m.dual.Q(z + h) - m.dual.Q(z - h)) / (2.0 * h) - m.dual.Qp(z));
        };
        const double e1 = fd_err(1e-3 * z);
        const double e2 = fd_err(5e-4 * z);
        CHECK(e1 <= 1e-5 * (1.0 + std::abs(m.dual.Qp(z))));
        CHECK(e2 < e1); // second-order shrink
    }
}

TEST_CASE("primal inversion and duality") {
    const Model& m = ref_model();
    const double x_ret = m.retired.wealth(m.th.z_R);

    // vanishing wealth pushes the state to the reflecting barrier; the contact
    // there is third order, so the approach rate is a cube root
    const PolicyPoint near_zero = invert_primal(m.dual, 1e-9 * x_ret);
    CHECK(near_zero.y_star == doctest::Approx(m.th.z_B).epsilon(1e-3));
    CHECK(near_zero.region == PolicyRegion::CONSTRAINED);

    const auto ys = log_grid(m.th.z_R * 0.5, m.th.z_B, 10001);
    std::vector<double> qs;
    qs.reserve(ys.size());
    for (double y : ys) qs.push_back(m.dual.Q(y));
    for (double x : log_grid(x_ret / 50.0, 0.9 * x_ret, 10)) {
        const PolicyPoint p = invert_primal(m.dual, x);
        CHECK(std::abs(x + m.dual.Qp(p.y_star)) <= 1e-10 * (1.0 + x));
        // brute-force Legendre minimum over the grid
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const double v = qs[i] + ys[i] * x;
            if (v < best) {
                best = v;
                bi = i;
            }
        }
        CHECK(best >= p.V - 1e-9 * (1.0 + std::abs(p.V)));
        const double nb = std::max(qs[bi - 1] + ys[bi - 1] * x, qs[bi + 1] + ys[bi + 1] * x);
        CHECK(best - p.V <= (nb - best) + 1e-9 * (1.0 + std::abs(best)));

        // envelope: dV/dx = y*
        const double h = 1e-5 * x;
        const double fd = (invert_primal(m.dual, x + h).V - invert_primal(m.dual, x - h).V) /
                          (2.0 * h);
        CHECK(fd == doctest::Approx(p.y_star).epsilon(1e-6));
    }

    // beyond the retirement threshold the retired policy applies
    const PolicyPoint rich = invert_primal(m.dual, 2.0 * x_ret);
    CHECK(rich.region == PolicyRegion::RETIRE_BOUNDARY);
    CHECK(rich.y_star < m.th.z_R);
    CHECK(rich.c_star ==
          doctest::Approx(m.retired.utility().inv_marginal(rich.y_star)).epsilon(1e-12));
}

TEST_CASE("policy table regime flag and monotone columns") {
    const Model& m = ref_model();
    const double x_ret = m.retired.wealth(m.th.z_R);
    const auto xs = log_grid(x_ret / 200.0, 0.95 * x_ret, 25);
    const PolicyTable table = policy_table(m.dual, xs);

    CHECK(table.x_ret == doctest::Approx(std::pow(m.th.z_R, -0.5) / 0.065).epsilon(1e-10));
    // the switch threshold lies above the reflecting barrier for this set, so
    // the high-satisfaction job is active everywhere
    CHECK(m.th.z_S >= m.th.z_B);
    CHECK(table.regime == RegimeFlag::ALWAYS_B2);
    CHECK_FALSE(table.x_S.has_value());

    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        CHECK(table.rows[i].y_star < table.rows[i - 1].y_star);
        CHECK(table.rows[i].c_star > table.rows[i - 1].c_star);
        CHECK(table.rows[i].job == Job::B2);
    }
}

TEST_CASE("switching regime exposes a job-switch wealth level") {
    // gamma = 0.5 places the switch threshold between the boundaries
    BoundaryContext ctx = make_context(kRef, kAgent, make_crra(0.5), QuadratureConfig{});
    RetiredSolution retired = build_retired(kRef, ctx.derived, ctx.util, ctx.quad);
    Thresholds th = solve_free_boundaries(ctx);
    DualSolution dual = build_dual(th, retired, ctx);
    CHECK(th.z_R < th.z_S);
    CHECK(th.z_S < th.z_B);
    const PolicyTable table = policy_table(dual, {});
    CHECK(table.regime == RegimeFlag::SWITCHING);
    REQUIRE(table.x_S.has_value());
    // wealth below the switch level means the state is above z_S: high-income job
    const PolicyPoint poor = invert_primal(dual, 0.5 * *table.x_S);
    const PolicyPoint rich =
        invert_primal(dual, std::min(1.5 * *table.x_S, 0.99 * table.x_ret));
    CHECK(poor.job == Job::B1);
    CHECK(rich.job == Job::B2);
}
