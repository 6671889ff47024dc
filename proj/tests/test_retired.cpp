#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcdual/retired.hpp"

#include <cmath>
#include <vector>

using namespace lcdual;

namespace {

const MarketParams kRef{0.02, 0.07, 0.25, 0.10};

struct Fix {
    DerivedParams d = derive(kRef);
    QuadratureConfig q{};
    RetiredSolution sol = build_retired(kRef, d, make_crra(2.0), q);
};

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i)
        g.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return g;
}

} // namespace

TEST_CASE("reference closed forms") {
    Fix f;
    CHECK(f.sol.closed_form());
    CHECK(f.sol.merton_constant() == doctest::Approx(0.065).epsilon(1e-12));
    CHECK(f.sol.wealth(1.0) == doctest::Approx(1.0 / 0.065).epsilon(1e-12));
    CHECK(f.sol.value(1.0) == doctest::Approx(-2.0 / 0.065).epsilon(1e-12));
}

TEST_CASE("derivative identities") {
    Fix f;
    for (double y : {0.1, 1.0, 10.0}) {
        CHECK(std::abs(f.sol.dvalue(y) + f.sol.wealth(y)) <= 1e-8 * (1.0 + f.sol.wealth(y)));
        CHECK(std::abs(f.sol.dvalue_quad(y) + f.sol.wealth_quad(y)) <=
              1e-8 * (1.0 + f.sol.wealth_quad(y)));
    }
    // resolvent ODE at y = 4, via the quadrature route and finite differences
    const double y = 4.0, h = 1e-4 * y;
    const double d2 = (f.sol.dvalue_quad(y + h) - f.sol.dvalue_quad(y - h)) / (2.0 * h);
    const double conj = f.sol.utility().conjugate(y);
    const double res = 0.5 * f.d.theta * f.d.theta * y * y * d2 +
                       (kRef.delta - kRef.r) * y * f.sol.dvalue_quad(y) -
                       kRef.delta * f.sol.value_quad(y) + conj;
    CHECK(std::abs(res) <= 1e-5 * (1.0 + std::abs(conj)));
}

TEST_CASE("quadrature route matches closed forms") {
    Fix f;
    for (double y : log_grid(1e-3, 1e3, 25)) {
        CHECK(f.sol.value_quad(y) == doctest::Approx(f.sol.value(y)).epsilon(1e-6));
        CHECK(f.sol.wealth_quad(y) == doctest::Approx(f.sol.wealth(y)).epsilon(1e-6));
    }
}

TEST_CASE("convexity and monotonicity") {
    Fix f;
    for (double y : log_grid(1e-2, 1e2, 50)) {
        CHECK(f.sol.d2value(y) > 0.0);
        CHECK(f.sol.d2value_quad(y) > 0.0); // equivalently X_R' < 0
    }
}

TEST_CASE("duality inversion at the reference point") {
    Fix f;
    const double x = 1.0 / 0.065;
    const RetiredPolicy p = retired_value(f.sol, x);
    CHECK(p.y_R == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.V_R == doctest::Approx(-2.0 / 0.065 + x).epsilon(1e-8));
    CHECK(p.c0 == doctest::Approx(1.0).epsilon(1e-8));

    const RetiredPolicy p2 = retired_value(f.sol, 2.0 * x);
    CHECK(p2.y_R < p.y_R);
}

TEST_CASE("inversion equals brute-force minimization") {
    Fix f;
    const auto ys = log_grid(1e-4, 1e4, 20001);
    for (double x : {2.0, 15.0, 120.0}) {
        const RetiredPolicy p = retired_value(f.sol, x);
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const double v = f.sol.value(ys[i]) + ys[i] * x;
            if (v < best) {
                best = v;
                bi = i;
            }
        }
        // the grid minimum cannot beat the true one, and must sit within the
        // resolution implied by its neighbors
        CHECK(best >= p.V_R - 1e-9 * (1.0 + std::abs(p.V_R)));
        const double neighbor = std::max(f.sol.value(ys[bi - 1]) + ys[bi - 1] * x,
                                         f.sol.value(ys[bi + 1]) + ys[bi + 1] * x);
        CHECK(best - p.V_R <= neighbor - best + 1e-9 * (1.0 + std::abs(best)));
    }
}

TEST_CASE("envelope slope") {
    Fix f;
    const double x = 9.0, h = 1e-4;
    auto vr = [&](double xx) { return retired_value(f.sol, xx).V_R; };
    const double fd = (vr(x + h) - vr(x - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(retired_value(f.sol, x).y_R).epsilon(1e-6));
}

TEST_CASE("log family") {
    const DerivedParams d = derive(kRef);
    const RetiredSolution sol = build_retired(kRef, d, make_log(), QuadratureConfig{});
    CHECK(sol.closed_form());
    for (double y : {0.2, 1.0, 8.0}) {
        CHECK(sol.wealth(y) == doctest::Approx(1.0 / (kRef.delta * y)).epsilon(1e-12));
        CHECK(sol.value_quad(y) == doctest::Approx(sol.value(y)).epsilon(1e-7));
        CHECK(sol.wealth_quad(y) == doctest::Approx(sol.wealth(y)).epsilon(1e-7));
    }
}

TEST_CASE("non-positive resolvent constant is rejected") {
    // gamma = 0.5 with a huge risk premium drives the constant negative
    const MarketParams m{0.02, 0.52, 0.25, 0.03};
    const DerivedParams d = derive(m);
    CHECK_THROWS_WITH_AS(build_retired(m, d, make_crra(0.5), QuadratureConfig{}),
                         doctest::Contains("infinite post-retirement value"),
                         SolverError);
}
