#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcdual/params.hpp"

#include <cmath>
#include <random>

using namespace lcdual;

namespace {
const MarketParams kRef{0.02, 0.07, 0.25, 0.10};
}

TEST_CASE("reference market constants") {
    const DerivedParams d = derive(kRef);
    CHECK(d.theta == doctest::Approx(0.2).epsilon(1e-14));
    // characteristic quadratic 0.02 n^2 + 0.06 n - 0.10 = 0 has roots (-3 +- sqrt(29))/2
    const double s = std::sqrt(29.0);
    CHECK(d.n1 == doctest::Approx((-3.0 + s) / 2.0).epsilon(1e-13));
    CHECK(d.n2 == doctest::Approx((-3.0 - s) / 2.0).epsilon(1e-13));
    CHECK(d.n1 > 1.0);
    CHECK(d.n2 < 0.0);
}

TEST_CASE("validation names the offending field") {
    MarketParams bad = kRef;
    bad.mu = 0.01;
    CHECK_THROWS_WITH_AS(derive(bad), "mu must exceed r", ValidationError);

    bad = kRef;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(derive(bad), ValidationError);
    bad = kRef;
    bad.delta = -0.1;
    CHECK_THROWS_AS(derive(bad), ValidationError);

    AgentParams agent{1.0, 0.5, 0.25, 0.64};
    CHECK_NOTHROW(agent.validate());
    agent.kappa2 = 1.2;
    CHECK_THROWS_AS(agent.validate(), ValidationError);
    agent = {0.4, 0.5, 0.25, 0.64}; // eps1 < eps2
    CHECK_THROWS_AS(agent.validate(), ValidationError);
}

TEST_CASE("root properties over random parameter sets") {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> ur(0.001, 0.15);
    std::uniform_real_distribution<double> uprem(0.005, 0.30);
    std::uniform_real_distribution<double> usig(0.05, 0.80);
    for (int i = 0; i < 1000; ++i) {
        MarketParams m;
        m.r = ur(gen);
        m.mu = m.r + uprem(gen);
        m.sigma = usig(gen);
        m.delta = ur(gen);
        const DerivedParams d = derive(m);

        CHECK(d.n1 > 1.0);
        CHECK(d.n2 < 0.0);
        CHECK(quadratic_residual(m, d.n1) <= 1e-12);
        CHECK(quadratic_residual(m, d.n2) <= 1e-12);

        // Vieta: n1 n2 = -delta/(theta^2/2), n1 + n2 = -(delta-r-theta^2/2)/(theta^2/2)
        const double a = 0.5 * d.theta * d.theta;
        const double prod = -m.delta / a;
        const double sum = -(m.delta - m.r - a) / a;
        CHECK(d.n1 * d.n2 == doctest::Approx(prod).epsilon(1e-12));
        CHECK(d.n1 + d.n2 == doctest::Approx(sum).epsilon(1e-12));
    }
}
