#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geofield/errors.hpp"
#include "geofield/inverse_source.hpp"
#include "kernel_oracles.hpp"
#include "support.hpp"

using namespace geofield;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> trapezoid_sine(const std::vector<double>& z, const std::vector<double>& f, int R) {
    const double H = z.back();
    const double h = z[1] - z[0];
    std::vector<double> c(R, 0.0);
    for (int r = 1; r <= R; ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double w = (k == 0 || k + 1 == z.size()) ? 0.5 : 1.0;
            acc += w * f[k] * std::sin(r * kPi * z[k] / H);
        }
        c[r - 1] = 2.0 / H * h * acc;
    }
    return c;
}

// Right-hand side dt * sum_{p <= n} kernel[n - p] x_p for a known solution.
std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& kernel, double dt) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t n = 0; n < x.size(); ++n)
        for (std::size_t p = 0; p <= n; ++p) out[n] += dt * kernel[n - p] * x[p];
    return out;
}

std::vector<double> decaying_kernel(int n) {
    std::vector<double> k(n);
    for (int m = 0; m < n; ++m) k[m] = 0.05 * std::exp(-0.01 * m) / std::sqrt(m + 0.5);
    return k;
}

}  // namespace

TEST_SUITE("inverse_source") {
    TEST_CASE("sine transform recovers a single mode") {
        const auto z = testing::z_nodes(80);
        std::vector<double> f(z.size());
        for (std::size_t k = 0; k < z.size(); ++k) f[k] = std::sin(3 * kPi * z[k] / 40.0);
        const auto c = fourier_sine_coeffs(z, f, 64);
        CHECK(c[2] == doctest::Approx(1.0).epsilon(1e-13));
        for (int r = 0; r < 64; ++r)
            if (r != 2) CHECK(std::abs(c[r]) < 1e-13);
    }

    TEST_CASE("sine transform of zeros is zero") {
        const auto z = testing::z_nodes(40);
        const std::vector<double> f(z.size(), 0.0);
        for (double c : fourier_sine_coeffs(z, f, 64)) CHECK(c == 0.0);
    }

    TEST_CASE("sine transform equals the trapezoid rule, aliased modes included") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> val(-3.0, 3.0);
        for (int cells : {16, 40, 80}) {
            const auto z = testing::z_nodes(cells);
            std::vector<double> f(z.size());
            for (auto& v : f) v = val(rng);
            const int R = 2 * cells + 7;
            const auto fast = fourier_sine_coeffs(z, f, R);
            const auto slow = trapezoid_sine(z, f, R);
            for (int r = 0; r < R; ++r) CHECK(fast[r] == doctest::Approx(slow[r]).epsilon(1e-8).scale(1.0));
        }
    }

    TEST_CASE("sine transform rejects uneven samples") {
        std::vector<double> z{0.0, 1.0, 2.5, 3.0};
        std::vector<double> f(4, 1.0);
        CHECK_THROWS_AS(fourier_sine_coeffs(z, f, 4), NumericError);
    }

    TEST_CASE("soil coefficients match quadrature of the profile gap") {
        const ThermalBoundary tb;
        const double H = 40.0;
        const auto closed = soil_coeffs_closed_form(tb, H, 64);
        for (int r = 1; r <= 64; ++r) {
            auto f = [&](double z) {
                return (undisturbed_profile(z, tb, H) - linear_translation_w(z, tb.T0_surface, tb.TH_bottom, H)) *
                       std::sin(r * kPi * z / H);
            };
            const double q = 2.0 / H *
                             (testing::adaptive_integral(f, 0.0, tb.seasonal_depth_Hbar) +
                              testing::adaptive_integral(f, tb.seasonal_depth_Hbar, H));
            CHECK(closed[r - 1] == doctest::Approx(q).epsilon(1e-10).scale(1.0));
        }
    }

    TEST_CASE("soil coefficients vanish when the profile is already linear") {
        ThermalBoundary deep;
        deep.seasonal_depth_Hbar = 40.0;
        for (double c : soil_coeffs_closed_form(deep, 40.0, 64)) CHECK(std::abs(c) < 1e-12);
        ThermalBoundary flat;
        flat.TH_bottom = flat.T0_surface;
        for (double c : soil_coeffs_closed_form(flat, 40.0, 64)) CHECK(c == 0.0);
    }

    TEST_CASE("Volterra solve: zero data, first step and round trip") {
        const int N = 225;
        const double dt = 0.8;
        const auto kernel = decaying_kernel(N);
        const std::vector<double> zero(N, 0.0);
        for (double v : solve_volterra(zero, kernel, dt)) CHECK(v == 0.0);

        const std::vector<double> one{2.0};
        CHECK(solve_volterra(one, kernel, dt)[0] == doctest::Approx(2.0 / (dt * kernel[0])));

        std::mt19937_64 rng(9);
        std::normal_distribution<double> nd;
        std::vector<double> x(N);
        for (auto& v : x) v = nd(rng);
        const auto back = solve_volterra(convolve(x, kernel, dt), kernel, dt);
        double worst = 0.0, scale = 0.0;
        for (int n = 0; n < N; ++n) {
            worst = std::max(worst, std::abs(back[n] - x[n]));
            scale = std::max(scale, std::abs(x[n]));
        }
        CHECK(worst / scale <= 1e-12);
    }

    TEST_CASE("Volterra solve is linear") {
        const int N = 60;
        const auto kernel = decaying_kernel(N);
        std::vector<double> a(N), b(N), mix(N);
        for (int n = 0; n < N; ++n) {
            a[n] = std::sin(0.3 * n);
            b[n] = std::cos(0.1 * n) + 1.0;
            mix[n] = 2.5 * a[n] - 0.7 * b[n];
        }
        const auto xa = solve_volterra(a, kernel, 0.8);
        const auto xb = solve_volterra(b, kernel, 0.8);
        const auto xm = solve_volterra(mix, kernel, 0.8);
        for (int n = 0; n < N; ++n) CHECK(xm[n] == doctest::Approx(2.5 * xa[n] - 0.7 * xb[n]).scale(1.0));
    }

    TEST_CASE("Volterra solve reports a vanishing diagonal and growth") {
        std::vector<double> kernel{0.0, 1.0, 1.0};
        std::vector<double> target{1.0, 1.0, 1.0};
        CHECK_THROWS_AS(solve_volterra(target, kernel, 1.0), NumericError);

        std::vector<double> tiny{1e-12, 1.0, 1.0};
        std::vector<std::string> warnings;
        VolterraOptions opt;
        opt.growth_bound = 1e6;
        opt.mode = 4;
        solve_volterra(target, tiny, 1.0, opt, &warnings);
        REQUIRE_FALSE(warnings.empty());
        CHECK(warnings.front().find("mode 4") != std::string::npos);
    }

    TEST_CASE("incremental rows equal the batch solve") {
        const int N = 80, R = 5;
        const double dt = 0.8;
        Eigen::MatrixXd kernel(R, N);
        for (int r = 0; r < R; ++r)
            for (int m = 0; m < N; ++m) kernel(r, m) = std::exp(-0.02 * (r + 1) * (r + 1) * m) / (m + 1.0);
        Eigen::MatrixXd target(R, N);
        for (int r = 0; r < R; ++r)
            for (int n = 0; n < N; ++n) target(r, n) = std::sin(0.2 * n + r);

        IncrementalVolterra inc(kernel, dt, 4);
        std::vector<double> col(R);
        for (int n = 0; n < N; ++n) {
            for (int r = 0; r < R; ++r) col[r] = 100.0 + r;  // provisional, revised below
            inc.push(col);
            for (int r = 0; r < R; ++r) col[r] = target(r, n);
            inc.revise_last(col);
        }
        CHECK(inc.rows() == N);
        for (int r = 0; r < R; ++r) {
            std::vector<double> t(N), k(N);
            for (int n = 0; n < N; ++n) {
                t[n] = target(r, n);
                k[n] = kernel(r, n);
            }
            const auto batch = solve_volterra(t, k, dt);
            for (int n = 0; n < N; ++n) {
                if (r < 4) {
                    CHECK(inc.solution()(r, n) == doctest::Approx(batch[n]).epsilon(1e-12));
                } else {
                    CHECK(inc.solution()(r, n) == 0.0);
                }
            }
        }
    }

    TEST_CASE("a wall at the undisturbed profile needs no exchanger source") {
        const FieldModel m = testing::field_model({{0, 0}});
        const auto z = testing::z_nodes(80);
        const TimeGrid time = make_time_grid(20.0, 0.8);
        const KernelMatrices km = build_kernel_matrices(time, m.geometry, m.exchanger, 0.05, 64);
        Eigen::MatrixXd wall(z.size(), time.steps + 1);
        for (std::size_t k = 0; k < z.size(); ++k) wall.row(k).setConstant(undisturbed_profile(z[k], m.thermal, 40.0));
        const auto sc = estimate_sources(m, z, km, wall, resolved_modes(64, 80));
        CHECK(sc.eps.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(sc.sig.cwiseAbs().maxCoeff() > 0.0);
        CHECK(resolved_modes(64, 80) == 64);
        CHECK(resolved_modes(64, 40) == 39);
    }
}
