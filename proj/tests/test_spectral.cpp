#include "fixtures.hpp"
#include "fpt/errors.hpp"
#include "fpt/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace fpt;
using doctest::Approx;

namespace {

const spectral::EigenSystem& system_012() {
    static const auto sys = spectral::build_eigensystem(0.012, 50);
    return sys;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("fpt_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_SUITE("spectral") {
    TEST_CASE("boundary function values") {
        CHECK(spectral::boundary_function(0.0, 0.3) == 1.0);
        CHECK(spectral::boundary_function(1.0, 1.5) == Approx(0.0).epsilon(1e-15));
        const double u = spectral::boundary_function(1.0, 0.012);
        CHECK(u < 0.0);
        CHECK(u == Approx(test::golden_value("tricomi_u(-1,1.5,kappa)", 0.012, 1)).epsilon(1e-14));
        CHECK(u == Approx(0.012 - 1.5).epsilon(1e-15));
    }

    TEST_CASE("kappa = 0 is rejected as potential-free") {
        CHECK_THROWS_AS(spectral::boundary_function(0.5, 0.0), ZeroStiffness);
        CHECK_THROWS_AS(spectral::find_eigenvalues(0.0, 3), ZeroStiffness);
        CHECK_THROWS_AS(spectral::build_eigensystem(0.0, 3), ZeroStiffness);
        CHECK_THROWS_AS(spectral::find_eigenvalues(-0.1, 3), DomainError);
    }

    TEST_CASE("eigenvalues match the multiprecision oracle") {
        for (double kappa : {0.003, 0.012, 0.024, 0.049}) {
            const auto alphas = spectral::find_eigenvalues(kappa, 25, 1e-10);
            REQUIRE(alphas.size() == 25);
            for (int n = 1; n <= 25; ++n) {
                CAPTURE(kappa);
                CAPTURE(n);
                CHECK(std::abs(alphas[n - 1] - test::golden_value("alpha", kappa, n)) <= 1e-10);
                if (n > 1) CHECK(alphas[n - 1] > alphas[n - 2]);
            }
        }
    }

    TEST_CASE("exact polynomial zero at kappa = 1.5") {
        const auto alphas = spectral::find_eigenvalues(1.5, 3, 1e-10);
        CHECK(alphas[0] <= 1.0 + 1e-10);
        CHECK(std::abs(spectral::boundary_function(alphas[0], 1.5)) <= 1e-9);
        const bool has_one = std::any_of(alphas.begin(), alphas.end(), [](double a) { return std::abs(a - 1.0) <= 1e-10; });
        CHECK(has_one);
        CHECK(test::golden_value("alpha", 1.5, 1) == Approx(1.0).epsilon(1e-15));
    }

    TEST_CASE("slowest rate grows with kappa") {
        // Stiffer traps pull the particle in faster: alpha_1 increases with kappa.
        const double a003 = spectral::find_eigenvalues(0.003, 1)[0];
        const double a012 = spectral::find_eigenvalues(0.012, 1)[0];
        const double a049 = spectral::find_eigenvalues(0.049, 1)[0];
        CHECK(a003 < a012);
        CHECK(a012 < a049);
    }

    TEST_CASE("scan ceiling") {
        // A very stiff trap pushes alpha_1 far beyond the ceiling of 5 count + 20.
        CHECK_THROWS_AS(spectral::find_eigenvalues(500.0, 1), BracketExhausted);
        CHECK_THROWS_AS(spectral::find_eigenvalues(0.012, 0), DomainError);
    }

    TEST_CASE("weighted integral closed forms") {
        CHECK(spectral::weighted_integral([](double) { return 0.0; }, 0.5) == 0.0);
        const double ref = std::exp(-1.0) / 2.0 + std::sqrt(M_PI) / 4.0 * std::erfc(1.0);
        CHECK(spectral::weighted_integral([](double) { return 1.0; }, 1.0, 1e-12) == Approx(ref).epsilon(1e-11));
        CHECK(ref == Approx(0.253648).epsilon(1e-5));
        // z^2 weight times z^2: fourth Gaussian moment.
        CHECK(spectral::weighted_integral([](double z) { return z * z; }, 0.012, 1e-12) ==
              Approx(test::gaussian_moment(4, 0.012)).epsilon(1e-11));
    }

    TEST_CASE("normalization at the polynomial mode") {
        // U(-1, 3/2, 1.5 z^2) = 1.5 (z^2 - 1)
        const double k = 1.5;
        const double ref = std::sqrt(2.25 * (test::gaussian_moment(6, k) - 2 * test::gaussian_moment(4, k) +
                                             test::gaussian_moment(2, k)));
        const double z_max = spectral::quadrature_cutoff(k, 1.0, 1e-12);
        CHECK(spectral::normalization(k, 1.0, 1e-12, z_max) == Approx(ref).epsilon(1e-11));
    }

    TEST_CASE("modes match the multiprecision oracle") {
        const auto& sys = system_012();
        for (int n = 1; n <= 3; ++n) {
            CAPTURE(n);
            CHECK(sys.modes[n - 1].norm == Approx(test::golden_value("norm", 0.012, n)).epsilon(1e-9));
            CHECK(sys.modes[n - 1].amp == Approx(test::golden_value("amp", 0.012, n)).epsilon(1e-9));
        }
        CHECK(sys.psi(1, 5.0) == Approx(test::golden_value("psi1", 0.012, 5)).epsilon(1e-9));
    }

    TEST_CASE("orthonormality") {
        for (double kappa : {0.003, 0.012, 0.049}) {
            const auto sys = spectral::build_eigensystem(kappa, 10);
            for (int i = 1; i <= 10; ++i) {
                for (int j = i; j <= 10; ++j) {
                    const double g = spectral::weighted_integral(
                        [&](double z) { return sys.psi(i, z) * sys.psi(j, z); }, kappa, 1e-12, sys.z_max);
                    CAPTURE(kappa);
                    CAPTURE(i);
                    CAPTURE(j);
                    CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 2 * sys.quad_tol);
                }
            }
        }
    }

    TEST_CASE("boundary condition and index checks") {
        const auto& sys = system_012();
        for (int n = 1; n <= 50; ++n) CHECK(spectral::eigenfunction_eval(sys, n, 1.0) == 0.0);
        CHECK_THROWS_AS(sys.psi(0, 2.0), std::out_of_range);
        CHECK_THROWS_AS(sys.psi(51, 2.0), std::out_of_range);
        CHECK_THROWS_AS(sys.psi(1, 0.5), DomainError);
    }

    TEST_CASE("mode invariants and extension") {
        const auto& s50 = system_012();
        const auto s25 = spectral::build_eigensystem(0.012, 25);
        REQUIRE(s50.size() == 50);
        for (std::size_t i = 0; i < s50.size(); ++i) {
            CHECK(s50.modes[i].n == int(i) + 1);
            CHECK(s50.modes[i].lambda_tau == 2.0 * s50.modes[i].alpha);
            CHECK(s50.modes[i].norm > 0.0);
            if (i < 25) CHECK(std::abs(s50.modes[i].alpha - s25.modes[i].alpha) <= 1e-10);
        }
    }

    TEST_CASE("escape amplitude at small kappa") {
        const auto sys = spectral::build_eigensystem(0.00012, 1);
        const double amp = sys.modes[0].amp * sys.psi(1, 5.0);
        CHECK(std::abs(amp - 0.8) <= 0.02);
        CHECK(amp == Approx(test::golden_value("escape_amplitude", 0.00012, 5)).epsilon(1e-9));
    }

    TEST_CASE("cache round trip is bit-identical") {
        const auto dir = scratch_dir("cache");
        const spectral::EigenCache cache(dir);
        const auto built = spectral::build_eigensystem(0.024, 8, 1e-10, 1e-10, &cache);
        REQUIRE(std::filesystem::exists(cache.path_for(0.024, 8, 1e-10, 1e-10)));
        const auto loaded = cache.load(0.024, 8, 1e-10, 1e-10);
        REQUIRE(loaded.has_value());
        CHECK(*loaded == built);
        CHECK(spectral::build_eigensystem(0.024, 8, 1e-10, 1e-10, &cache) == built);
        CHECK_FALSE(cache.load(0.024, 9, 1e-10, 1e-10).has_value());
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("corrupt cache entries are recomputed") {
        const auto dir = scratch_dir("corrupt");
        const spectral::EigenCache cache(dir);
        std::filesystem::create_directories(dir);
        const auto path = cache.path_for(0.049, 4, 1e-10, 1e-10);
        std::ofstream(path) << "{\"kappa\": 0.049, \"modes\": [";
        CHECK_THROWS_AS(cache.load(0.049, 4, 1e-10, 1e-10), CacheCorrupt);
        const auto sys = spectral::build_eigensystem(0.049, 4, 1e-10, 1e-10, &cache);
        CHECK(sys.size() == 4);
        CHECK(*cache.load(0.049, 4, 1e-10, 1e-10) == sys);
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("json rejects broken invariants") {
        auto sys = spectral::build_eigensystem(0.049, 3);
        auto text = spectral::to_json(sys);
        CHECK(spectral::from_json(text) == sys);
        sys.modes[1].alpha = sys.modes[0].alpha * 0.5;
        CHECK_THROWS_AS(spectral::from_json(spectral::to_json(sys)), CacheCorrupt);
        CHECK_THROWS_AS(spectral::from_json("[1, 2"), CacheCorrupt);
    }
}
