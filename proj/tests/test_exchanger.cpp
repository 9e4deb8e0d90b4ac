#include <doctest.h>

#include <cmath>

#include "geofield/errors.hpp"
#include "geofield/exchanger.hpp"
#include "support.hpp"

using namespace geofield;

namespace {

std::vector<double> pipe_nodes(int cells, double HE) {
    std::vector<double> z(cells + 1);
    for (int k = 0; k <= cells; ++k) z[k] = HE * k / cells;
    return z;
}

}  // namespace

TEST_SUITE("exchanger") {
    TEST_CASE("dimensionless groups at the default fluid") {
        const FieldModel m = testing::field_model({{0, 0}});
        const ConvectionParams p = convection_params(m.fluid, m.exchanger);
        CHECK(p.reynolds == doctest::Approx(4663.5).epsilon(1e-4));
        CHECK(p.prandtl == doctest::Approx(23.108).epsilon(1e-4));
        CHECK(p.nusselt == doctest::Approx(53.735).epsilon(1e-4));
        CHECK(p.decay_c == doctest::Approx(0.06233).epsilon(1e-3));
    }

    TEST_CASE("Nusselt correlation") {
        const double expected = 0.012 * (std::pow(1e4, 0.87) - 280.0) * std::pow(7.0, 0.4);
        CHECK(nusselt(1e4, 7.0) == doctest::Approx(expected).epsilon(1e-14));
        CHECK_THROWS_AS(nusselt(500.0, 7.0), ConfigError);
        CHECK_THROWS_AS(nusselt(1e4, 0.0), ConfigError);
    }

    TEST_CASE("fluid at soil temperature stays there") {
        const auto z = pipe_nodes(50, 25.0);
        const std::vector<double> u(z.size(), 283.0);
        for (double v : descending_profile(z, u, 0.06, 283.0)) CHECK(v == doctest::Approx(283.0).epsilon(1e-15));
        for (double v : ascending_profile(z, u, 0.06, 283.0)) CHECK(v == doctest::Approx(283.0).epsilon(1e-15));
    }

    TEST_CASE("constant soil gives exponential relaxation") {
        const double c = 0.06233, U = 286.0, Tin = 280.0, Tb = 284.0, HE = 25.0;
        const auto z = pipe_nodes(50, HE);
        const std::vector<double> u(z.size(), U);
        const auto down = descending_profile(z, u, c, Tin);
        const auto up = ascending_profile(z, u, c, Tb);
        for (std::size_t k = 0; k < z.size(); ++k) {
            CHECK(down[k] == doctest::Approx(U + (Tin - U) * std::exp(-c * z[k])).epsilon(1e-13));
            CHECK(up[k] == doctest::Approx(U + (Tb - U) * std::exp(-c * (HE - z[k]))).epsilon(1e-13));
        }
    }

    TEST_CASE("linear soil is integrated exactly") {
        const double c = 0.06233, a = 281.0, b = 0.2, Tin = 280.0;
        const auto z = pipe_nodes(17, 25.0);
        std::vector<double> u(z.size());
        for (std::size_t k = 0; k < z.size(); ++k) u[k] = a + b * z[k];
        const auto down = descending_profile(z, u, c, Tin);
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double exact = a + b * z[k] - b / c + (Tin - a + b / c) * std::exp(-c * z[k]);
            CHECK(down[k] == doctest::Approx(exact).epsilon(1e-13));
        }
    }

    TEST_CASE("wall profile is continuous at the exchanger bottom") {
        const FieldModel m = testing::field_model({{0, 0}});
        const auto z = testing::z_nodes(80);
        const int kE = 50;
        std::vector<double> u(kE + 1);
        for (int k = 0; k <= kE; ++k) u[k] = undisturbed_profile(z[k], m.thermal, 40.0);
        const WallModel wm(m, z, kE);
        const Eigen::VectorXd wall = wm(u);
        REQUIRE(wall.size() == 81);
        const auto down = descending_profile(std::span(z).first(kE + 1), u, wm.params().decay_c, 280.0);
        CHECK(wall(kE) == doctest::Approx(down.back()).epsilon(1e-14));
        CHECK(wall(80) == doctest::Approx(m.thermal.TH_bottom));
        CHECK(wall(0) > 280.0);
        const double slope = wall(kE + 2) - wall(kE + 1);
        CHECK(wall(kE + 1) - wall(kE) == doctest::Approx(slope));
    }

    TEST_CASE("lagged coupling applies the predictor once") {
        const FieldModel m = testing::field_model({{0, 0}});
        const auto z = testing::z_nodes(80);
        const WallModel wm(m, z, 50);
        const std::vector<double> u0(51, 283.0);
        int calls = 0;
        CouplingSettings lagged;
        lagged.max_iterations = 0;
        const auto out = coupled_step(u0, wm, [&](const Eigen::VectorXd&) {
            ++calls;
            return std::vector<double>(51, 285.0);
        }, lagged);
        CHECK(calls == 1);
        CHECK(out.iterations == 0);
        CHECK((out.wall - wm(u0)).cwiseAbs().maxCoeff() == 0.0);
    }

    TEST_CASE("fixed-point coupling converges to a consistent wall") {
        const FieldModel m = testing::field_model({{0, 0}});
        const auto z = testing::z_nodes(80);
        const WallModel wm(m, z, 50);
        std::vector<double> u0(51);
        for (int k = 0; k <= 50; ++k) u0[k] = undisturbed_profile(z[k], m.thermal, 40.0);
        // soil relaxes halfway towards the wall
        auto soil = [&](const Eigen::VectorXd& wall) {
            std::vector<double> u(51);
            for (int k = 0; k <= 50; ++k) u[k] = 0.5 * (u0[k] + wall(k));
            return u;
        };
        Eigen::VectorXd last_applied;
        const auto out = coupled_step(u0, wm, [&](const Eigen::VectorXd& w) {
            last_applied = w;
            return soil(w);
        }, CouplingSettings{1e-10, 60});
        CHECK(out.iterations > 1);
        CHECK(out.residual <= 1e-10);
        CHECK((last_applied - out.wall).cwiseAbs().maxCoeff() == 0.0);
        CHECK((wm(soil(out.wall)) - out.wall).cwiseAbs().maxCoeff() < 1e-9);
        CHECK_THROWS_AS(coupled_step(u0, wm, soil, CouplingSettings{1e-14, 2}), NumericError);
    }
}
