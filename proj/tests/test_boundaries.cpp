#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcdual/boundaries.hpp"

#include <cmath>
#include <vector>

using namespace lcdual;

namespace {

const MarketParams kRef{0.02, 0.07, 0.25, 0.10};
const AgentParams kAgent{1.0, 0.5, 0.25, 0.64};

BoundaryContext ref_ctx(double gamma = 2.0) {
    return make_context(kRef, kAgent, make_crra(gamma), QuadratureConfig{});
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i)
        g.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return g;
}

// inner map through the public residuals, for tests that probe the outer shape
double inner_root(const BoundaryContext& ctx, double z1, double z_bar) {
    double lo = std::max(z1, z_bar) * (1.0 + 1e-12);
    double hi = 2.0 * std::max(z1, z_bar);
    while (phi2(z1, hi, ctx) < 0.0) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        if (mid <= lo || mid >= hi) break;
        (phi2(z1, mid, ctx) <= 0.0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

} // namespace

TEST_CASE("switch threshold closed form") {
    const auto ctx = ref_ctx();
    // f(y) = 0.5 - 1.5 / sqrt(y) for this parameter set, so z_S = 9
    CHECK(ctx.sw.z_S == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(ctx.sw.f(4.0) == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(ctx.sw.f(16.0) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(std::abs(ctx.sw.f(ctx.sw.z_S)) <= 1e-10);
}

TEST_CASE("retirement-gap and wage-gap roots") {
    const auto ctx = ref_ctx();
    const double z_hat = solve_z_hat(ctx);
    // low branch: h(z) = 0.5 sqrt(z) (sqrt(z) - 1), root at 1
    CHECK(z_hat == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ctx.sw.h(0.25) == doctest::Approx(-0.125).epsilon(1e-12));
    CHECK(ctx.sw.h(4.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(ctx.sw.h(z_hat)) <= 1e-10);

    bool kink = false;
    const double z_bar = solve_z_bar(ctx, &kink);
    // low branch: 0.5 - 1.25 / sqrt(z), root at 6.25
    CHECK(z_bar == doctest::Approx(6.25).epsilon(1e-10));
    CHECK_FALSE(kink);
    CHECK(ctx.sw.eps_hat(16.0) - ctx.sw.c_hat(16.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ctx.sw.eps_hat(1.0) - ctx.sw.c_hat(1.0) == doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("monotone structure") {
    const auto ctx = ref_ctx();
    double prev_f = -1e300, prev_hz = -1e300, prev_ec = -1e300;
    for (double z : log_grid(1e-3, 1e3, 200)) {
        const double fv = ctx.sw.f(z);
        const double hz = ctx.sw.h(z) / z;
        const double ec = ctx.sw.eps_hat(z) - ctx.sw.c_hat(z);
        CHECK(fv > prev_f);
        CHECK(hz > prev_hz);
        CHECK(ec > prev_ec);
        prev_f = fv;
        prev_hz = hz;
        prev_ec = ec;
    }
}

TEST_CASE("coupled residual structure") {
    const auto ctx = ref_ctx();
    // diagonal is negative up to the retirement-gap root
    for (double z1 : {0.2, 0.5, 1.0}) CHECK(phi2(z1, z1, ctx) < 0.0);

    // partial in the second argument matches the integrand (finite differences)
    const double z1 = 0.5, z2 = 7.0, h = 1e-5 * z2;
    const double fd = (phi2(z1, z2 + h, ctx) - phi2(z1, z2 - h, ctx)) / (2.0 * h);
    const double expected = std::pow(z2, -ctx.w.n2) * (ctx.sw.eps_hat(z2) - ctx.sw.c_hat(z2));
    CHECK(fd == doctest::Approx(expected).epsilon(1e-6));
    CHECK(expected > 0.0);

    // growth beyond the wage-gap root
    double prev = phi2(0.5, 8.0, ctx);
    for (double z2d : {16.0, 32.0, 64.0}) {
        const double cur = phi2(0.5, z2d, ctx);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("free boundaries for the reference set") {
    const auto ctx = ref_ctx();
    const Thresholds th = solve_free_boundaries(ctx);
    CHECK(th.z_hat == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(th.z_R > 0.0);
    CHECK(th.z_R < th.z_hat);
    CHECK(th.z_B > th.z_bar);
    CHECK(std::abs(th.phi1_residual) <= 1e-8);
    CHECK(std::abs(th.phi2_residual) <= 1e-8);

    // cross-check against an independent prototype of the same equations
    CHECK(th.z_R == doctest::Approx(0.15634696405684956).epsilon(1e-6));
    CHECK(th.z_B == doctest::Approx(7.652846589445029).epsilon(1e-6));

    // the two algebraic routes to the homogeneous coefficients agree
    CHECK(std::abs(th.E1 - th.E1_alt) <= 1e-7 * std::abs(th.E1));
    CHECK(std::abs(th.E2 - th.E2_alt) <= 1e-7 * std::abs(th.E2));
}

TEST_CASE("outer function is decreasing and the inner map hits its limit") {
    const auto ctx = ref_ctx();
    const double z_hat = solve_z_hat(ctx);
    const double z_bar = solve_z_bar(ctx);

    double prev = std::numeric_limits<double>::infinity();
    for (double z1 : log_grid(1e-4 * z_hat, z_hat * (1 - 1e-6), 20)) {
        const double F = phi1(z1, inner_root(ctx, z1, z_bar), ctx);
        CHECK(F < prev);
        prev = F;
    }

    // as z1 -> 0 the inner root approaches the zero of the lower wage-gap integral
    const Integrand ec = [&](double e) { return ctx.sw.eps_hat(e) - ctx.sw.c_hat(e); };
    const std::vector<double> bps{ctx.sw.z_S};
    double lo = z_bar * (1.0 + 1e-12), hi = 4.0 * z_bar;
    while (kernel_tail_lower(ec, -ctx.w.n2, hi, 0.0, bps, ctx.quad) < 0.0) hi *= 2.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = std::sqrt(lo * hi);
        (kernel_tail_lower(ec, -ctx.w.n2, mid, 0.0, bps, ctx.quad) <= 0.0 ? lo : hi) = mid;
    }
    const double z_underline = std::sqrt(lo * hi);
    CHECK(inner_root(ctx, 1e-6, z_bar) == doctest::Approx(z_underline).epsilon(1e-4));
}

TEST_CASE("solution is stable under tighter quadrature") {
    auto ctx = ref_ctx();
    const Thresholds th = solve_free_boundaries(ctx);
    ctx.quad.rel_tol = 1e-10;
    const Thresholds tight = solve_free_boundaries(ctx);
    CHECK(std::abs(th.z_R - tight.z_R) <= 1e-6 * th.z_R);
    CHECK(std::abs(th.z_B - tight.z_B) <= 1e-6 * th.z_B);
}

TEST_CASE("wage gap crossing through the switch kink is detected") {
    // gamma = 0.5: the wage gap jumps across zero exactly at z_S
    const auto ctx = ref_ctx(0.5);
    CHECK(ctx.sw.z_S == doctest::Approx(std::sqrt(0.78)).epsilon(1e-10));
    bool kink = false;
    const double z_bar = solve_z_bar(ctx, &kink);
    CHECK(kink);
    CHECK(z_bar == doctest::Approx(ctx.sw.z_S).epsilon(1e-9));
    CHECK(solve_z_hat(ctx) == doctest::Approx(std::sqrt(0.72)).epsilon(1e-10));

    const Thresholds th = solve_free_boundaries(ctx);
    CHECK(th.z_R < th.z_hat);
    CHECK(th.z_B > th.z_bar);
    CHECK(std::abs(th.phi1_residual) <= 1e-8);
    CHECK(std::abs(th.phi2_residual) <= 1e-8);
    // prototype cross-check
    CHECK(th.z_R == doctest::Approx(0.38759414).epsilon(1e-5));
    CHECK(th.z_B == doctest::Approx(1.0458155).epsilon(1e-5));
}

TEST_CASE("log utility thresholds") {
    const auto ctx = make_context(kRef, kAgent, make_log(), QuadratureConfig{});
    // f(y) = ln(kappa1/kappa2)/y + (eps1 - eps2)
    CHECK(ctx.sw.z_S == doctest::Approx(-std::log(0.25 / 0.64) / 0.5).epsilon(1e-10));
    CHECK(solve_z_hat(ctx) == doctest::Approx(-2.0 * std::log(0.64)).epsilon(1e-10));
    bool kink = false;
    const double z_bar = solve_z_bar(ctx, &kink);
    CHECK(kink);
    CHECK(z_bar == doctest::Approx(ctx.sw.z_S).epsilon(1e-9));
}
