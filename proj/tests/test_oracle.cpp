#include "fixtures.hpp"
#include "fpt/errors.hpp"
#include "fpt/oracle.hpp"
#include "fpt/solution.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace fpt;
using doctest::Approx;

namespace {

// Leading significant digits shared by two decimal expansions.
int shared_digits(const std::string& a, const std::string& b) {
    int n = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i] != b[i]) break;
        if (a[i] == 'e') break;
        if (std::isdigit(static_cast<unsigned char>(a[i])) && (n > 0 || a[i] != '0')) ++n;
    }
    return n;
}

}  // namespace

TEST_SUITE("oracle") {
    TEST_CASE("config validation") {
        oracle::OracleConfig cfg;
        CHECK_NOTHROW(cfg.validate());
        cfg.digits = 29;
        CHECK_THROWS_AS(cfg.validate(), InvalidParams);
        cfg = {};
        cfg.pde_grid.nodes = 199;
        CHECK_THROWS_AS(cfg.validate(), InvalidParams);
    }

    TEST_CASE("polynomial eigenvalue") {
        CHECK(oracle::highprec_alpha(1.5, 1) == 1.0);
        const auto a = oracle::highprec_alphas(1.5, 3);
        CHECK(a[0].text == "1");
        CHECK(a[1].value > 1.0);
        CHECK(oracle::highprec_tricomi(-1.0, 1.5, 0.012).value == Approx(0.012 - 1.5).epsilon(1e-15));
    }

    TEST_CASE("two working precisions agree") {
        oracle::OracleConfig lo, hi;
        hi.digits = 50;
        for (double kappa : {0.003, 0.049}) {
            const auto a = oracle::highprec_alphas(kappa, 3, lo);
            const auto b = oracle::highprec_alphas(kappa, 3, hi);
            for (int i = 0; i < 3; ++i) CHECK(shared_digits(a[i].text, b[i].text) >= 20);
        }
        const auto u30 = oracle::highprec_tricomi(-2.3, 1.5, 0.7, lo);
        const auto u50 = oracle::highprec_tricomi(-2.3, 1.5, 0.7, hi);
        CHECK(shared_digits(u30.text, u50.text) >= 20);
    }

    TEST_CASE("fixture values recompute") {
        const auto& f = oracle::find_fixture(test::golden(), "alpha", 0.012, 1);
        CHECK(f.generator_version == oracle::kGeneratorVersion);
        CHECK(shared_digits(oracle::highprec_alphas(0.012, 1).front().text, f.value) >= 20);
        CHECK(oracle::mfpt_integral(0.049, 5.0) ==
              Approx(test::golden_value("mfpt_integral", 0.049, 5)).epsilon(1e-13));
        CHECK_THROWS_AS(oracle::find_fixture(test::golden(), "alpha", 0.012, 99), std::out_of_range);
    }

    TEST_CASE("fixture file round trip") {
        const auto path = std::filesystem::temp_directory_path() / "fpt_fixture_roundtrip.json";
        const std::vector<oracle::Fixture> in{{"alpha", 0.5, 2, "1.25", 30, oracle::kGeneratorVersion},
                                              {"norm", 0.012, 1, "17.75", 30, "x"}};
        oracle::write_fixtures(path, in);
        CHECK(oracle::read_fixtures(path) == in);
        std::filesystem::remove(path);
    }

    TEST_CASE("mode oracle reproduces the polynomial normalization") {
        const double k = 1.5;
        const double ref = std::sqrt(2.25 * (test::gaussian_moment(6, k) - 2 * test::gaussian_moment(4, k) +
                                             test::gaussian_moment(2, k)));
        const auto m = oracle::highprec_mode(k, 1);
        CHECK(m.alpha.value == 1.0);
        CHECK(m.norm.value == Approx(ref).epsilon(1e-13));
    }

    TEST_CASE("mfpt integral boundary value and guard") {
        for (double kappa : {0.003, 0.049, 2.0}) CHECK(oracle::mfpt_integral(kappa, 1.0) == 0.0);
        CHECK_THROWS_AS(oracle::mfpt_integral(1.0, 30.0), OverflowGuard);
        CHECK_THROWS_AS(oracle::mfpt_slope(1.0, 30.0), OverflowGuard);
        CHECK_THROWS_AS(oracle::mfpt_integral(0.1, 0.5), DomainError);
    }

    TEST_CASE("mfpt integral solves the backward equation") {
        // (1/(2 kappa)) mu'' + (1/(kappa z) - z) mu' = -1, with mu'' from a
        // five-point stencil on the integrand and mu' checked against the integral.
        const auto d1 = [](auto&& f, double z, double h) {
            return (f(z - 2 * h) - 8 * f(z - h) + 8 * f(z + h) - f(z + 2 * h)) / (12 * h);
        };
        for (double kappa : {0.003, 0.049, 0.5}) {
            for (double z : {1.5, 3.0, 7.0}) {
                const auto slope = [kappa](double y) { return oracle::mfpt_slope(kappa, y); };
                const auto mu = [kappa](double y) { return oracle::mfpt_integral(kappa, y); };
                const double m1 = slope(z);
                const double m2 = d1(slope, z, 1e-3);
                CAPTURE(kappa);
                CAPTURE(z);
                CHECK(std::abs(m2 / (2 * kappa) + (1 / (kappa * z) - z) * m1 + 1) <= 1e-6);
                CHECK(d1(mu, z, 1e-3) == Approx(m1).epsilon(1e-9));
            }
        }
    }

    TEST_CASE("mfpt integral monotonicity") {
        for (double kappa : {0.003, 0.012, 0.049}) {
            double prev = 0;
            for (double z = 1.25; z <= 20; z += 0.75) {
                const double m = oracle::mfpt_integral(kappa, z);
                CHECK(m > prev);
                prev = m;
            }
        }
        for (double z : {2.0, 10.0}) {
            CHECK(oracle::mfpt_integral(0.003, z) > oracle::mfpt_integral(0.006, z));
            CHECK(oracle::mfpt_integral(0.006, z) > oracle::mfpt_integral(0.049, z));
        }
    }

    TEST_CASE("pde boundary and initial values") {
        CHECK(oracle::pde_survival(0.012, 1.0, 0.7) == 0.0);
        CHECK(oracle::pde_survival(0.012, 5.0, 0.0) == 1.0);
        const auto p = oracle::pde_solve(0.012, 0.0, {});
        for (std::size_t i = 1; i < p.S.size(); ++i) CHECK(p.S[i] == 1.0);
        CHECK(p.S.front() == 0.0);
        CHECK(oracle::pde_interpolate(p, p.z[10]) == p.S[10]);
    }

    TEST_CASE("pde agrees with the series") {
        const auto sys = spectral::build_eigensystem(0.012, 50);
        for (double t : {0.5, 1.0, 2.0}) {
            CHECK(std::abs(oracle::pde_survival(0.012, 5.0, t) - solution::survival(sys, 5.0, t).raw) <= 5e-3);
        }
    }

    TEST_CASE("pde is second order") {
        oracle::PdeGrid g;
        g.nodes = 401;
        std::vector<double> s;
        for (int level = 0; level < 3; ++level) {
            s.push_back(oracle::pde_interpolate(oracle::pde_solve(0.049, 0.5, g), 3.0));
            g.nodes = 2 * g.nodes - 1;
        }
        const double ratio = (s[0] - s[1]) / (s[1] - s[2]);
        CHECK(ratio == Approx(4.0).epsilon(0.15));
    }

    TEST_CASE("coarse grid is reported") {
        oracle::OracleConfig cfg;
        cfg.pde_grid.nodes = 200;
        cfg.pde_grid.z_max = 400.0;
        CHECK_THROWS_AS(oracle::pde_survival(0.012, 1.5, 0.01, cfg), GridTooCoarse);
    }
}
