#include "fpt/errors.hpp"
#include "fpt/montecarlo.hpp"
#include "fpt/philox.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace fpt;
using doctest::Approx;
using montecarlo::SimParams;

namespace {

struct Moments {
    double mean = 0, var = 0, fourth = 0;  // fourth central moment, for the variance's standard error
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    for (double x : xs) m.mean += x;
    m.mean /= double(xs.size());
    for (double x : xs) {
        const double d = (x - m.mean) * (x - m.mean);
        m.var += d;
        m.fourth += d * d;
    }
    m.var /= double(xs.size() - 1);
    m.fourth /= double(xs.size());
    return m;
}

void check_ou_moments(double x0, double dt, double kappa, std::uint64_t seed) {
    constexpr int n = 1'000'000;
    rng::NormalStream normal(rng::Philox4x32(seed), 0);
    std::vector<double> xs(n);
    for (auto& x : xs) x = montecarlo::ou_step(x0, dt, normal(), kappa);
    const auto m = moments(xs);
    const double mean = x0 * std::exp(-dt);
    const double var = -std::expm1(-2 * dt) / (2 * kappa);
    const double var_se = std::sqrt((m.fourth - m.var * m.var) / n);
    CAPTURE(dt);
    CHECK(std::abs(m.mean - mean) <= 4 * std::sqrt(var / n));
    CHECK(std::abs(m.var - var) <= 4 * var_se);
}

SimParams small_run(std::int64_t n, int threads = 0) {
    SimParams p;
    p.kappa = 0.049;
    p.z0 = 2.0;
    p.dt_over_tau = 1e-2;
    p.horizon_over_tau = 2.0;
    p.trajectories = n;
    p.master_seed = 42;
    p.threads = threads;
    return p;
}

}  // namespace

TEST_SUITE("montecarlo") {
    TEST_CASE("philox known-answer vectors") {
        using B = rng::Philox4x32::Block;
        CHECK(rng::Philox4x32(0)(B{0, 0, 0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
        CHECK(rng::Philox4x32(~0ull)(B{~0u, ~0u, ~0u, ~0u}) == B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
        CHECK(rng::Philox4x32(0x299f31d0a4093822ull)(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
              B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
    }

    TEST_CASE("uniforms stay inside (0, 1]") {
        CHECK(rng::NormalStream::to_open_unit(0) > 0.0);
        CHECK(rng::NormalStream::to_open_unit(~0ull) == 1.0);
    }

    TEST_CASE("normal stream moments and tails") {
        rng::NormalStream normal(rng::Philox4x32(99), 3);
        constexpr int n = 2'000'000;
        std::vector<double> xs(n);
        int beyond3 = 0;
        for (auto& x : xs) {
            x = normal();
            beyond3 += std::abs(x) > 3.0;
        }
        const auto m = moments(xs);
        CHECK(std::abs(m.mean) <= 4 / std::sqrt(double(n)));
        CHECK(std::abs(m.var - 1) <= 4 * std::sqrt(2.0 / n));
        const double p3 = std::erfc(3 / std::sqrt(2.0));
        CHECK(std::abs(beyond3 / double(n) - p3) <= 4 * std::sqrt(p3 / n));
    }

    TEST_CASE("ou_step limits") {
        CHECK(montecarlo::ou_step(3.25, 0.0, 1.7, 0.012) == 3.25);
        CHECK(montecarlo::ou_step(3.25, 1e3, 1.7, 0.012) == Approx(1.7 / std::sqrt(2 * 0.012)).epsilon(1e-15));
        CHECK(montecarlo::ou_step(-8.0, 1e3, 0.4, 0.5) == Approx(0.4).epsilon(1e-15));
        CHECK_THROWS_AS(montecarlo::ou_step(1.0, -1e-3, 0.0, 0.012), DomainError);
    }

    TEST_CASE("ou_step matches exact moments") {
        check_ou_moments(3.0, 0.1, 0.012, 1);
        check_ou_moments(3.0, 1e-3, 0.012, 2);
        check_ou_moments(3.0, 1.0, 0.012, 3);
        check_ou_moments(-1.5, 0.1, 0.5, 4);
    }

    TEST_CASE("parameter validation") {
        auto p = small_run(10);
        CHECK_NOTHROW(p.validate());
        p.trajectories = 0;
        CHECK_THROWS_AS(montecarlo::simulate_fpt(p), InvalidParams);
        p = small_run(10);
        p.z0 = 1.0;
        CHECK_THROWS_AS(p.validate(), InvalidParams);
        p = small_run(10);
        p.dt_over_tau = 0;
        CHECK_THROWS_AS(p.validate(), InvalidParams);
        p = small_run(10);
        p.horizon_over_tau = p.dt_over_tau;
        CHECK_THROWS_AS(p.validate(), InvalidParams);
        p = small_run(10);
        p.kappa = 0;
        CHECK_THROWS_AS(p.validate(), InvalidParams);
    }

    TEST_CASE("counting invariant") {
        for (std::int64_t n : {1, 2, 257}) {
            const auto r = montecarlo::simulate_fpt(small_run(n));
            CHECK(std::int64_t(r.fpt_samples.size()) + r.censored_count == n);
            CHECK(std::int64_t(r.outcomes.size()) == n);
            for (double t : r.fpt_samples) {
                CHECK(t > 0.0);
                CHECK(t <= r.params.horizon_over_tau + 1e-12);
            }
        }
    }

    TEST_CASE("deterministic across thread counts") {
        const auto a = montecarlo::simulate_fpt(small_run(3000, 1));
        const auto b = montecarlo::simulate_fpt(small_run(3000, 3));
        const auto c = montecarlo::simulate_fpt(small_run(3000, 0));
        CHECK(a.fpt_samples == b.fpt_samples);
        CHECK(a.fpt_samples == c.fpt_samples);
        CHECK(a.censored_count == b.censored_count);
        std::ostringstream sa, sb;
        montecarlo::write_samples_csv(sa, a);
        montecarlo::write_samples_csv(sb, b);
        CHECK(sa.str() == sb.str());
        auto other = small_run(3000, 1);
        other.master_seed = 43;
        CHECK(montecarlo::simulate_fpt(other).fpt_samples != a.fpt_samples);
    }

    TEST_CASE("prefix stability") {
        // Trajectory i uses stream i, so a larger run extends a smaller one.
        const auto a = montecarlo::simulate_fpt(small_run(100));
        const auto b = montecarlo::simulate_fpt(small_run(500));
        for (std::size_t i = 0; i < 100; ++i) {
            CHECK(a.outcomes[i].captured == b.outcomes[i].captured);
            CHECK(a.outcomes[i].time == b.outcomes[i].time);
        }
    }

    TEST_CASE("start next to the boundary") {
        SimParams p;
        p.kappa = 0.049;
        p.z0 = 1.0 + 1e-6;
        p.dt_over_tau = 1e-3;
        p.horizon_over_tau = 10 * p.dt_over_tau;
        p.trajectories = 20000;
        p.master_seed = 11;
        const auto r = montecarlo::simulate_fpt(p);
        const double fraction = double(r.fpt_samples.size()) / double(p.trajectories);
        CHECK(fraction > 0.4);
    }

    TEST_CASE("empirical survival") {
        const auto r = montecarlo::simulate_fpt(small_run(4000));
        const std::vector<double> grid{0.0, 0.1, 0.5, 1.0, 1.5, 2.0};
        const auto c = montecarlo::empirical_survival(r, grid);
        CHECK(c.values.front() == 1.0);
        CHECK(c.std_errors.front() == 0.0);
        CHECK(c.values.back() == Approx(double(r.censored_count) / 4000).epsilon(1e-15));
        for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] <= c.values[i - 1]);
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            CHECK(c.std_errors[i] == Approx(std::sqrt(c.values[i] * (1 - c.values[i]) / 4000)));
        }
        CHECK(c.meta.kind == solution::CurveKind::empirical);
        const std::vector<double> past{1.0, 2.5};
        CHECK_THROWS_AS(montecarlo::empirical_survival(r, past), GridBeyondHorizon);
    }

    TEST_CASE("capture at a grid time counts as gone") {
        montecarlo::SimResult r;
        r.params = small_run(4);
        r.outcomes = {{true, 0.5}, {true, 1.0}, {false, 2.0}, {false, 2.0}};
        r.fpt_samples = {0.5, 1.0};
        r.censored_count = 2;
        const std::vector<double> grid{0.5, 0.75, 1.0};
        const auto c = montecarlo::empirical_survival(r, grid);
        CHECK(c.values == std::vector<double>{0.75, 0.75, 0.5});
    }

    TEST_CASE("sample dump") {
        montecarlo::SimResult r;
        r.params = small_run(2);
        r.outcomes = {{true, 0.25}, {false, 2.0}};
        std::ostringstream out;
        montecarlo::write_samples_csv(out, r);
        CHECK(out.str() == "trajectory_index,captured,t_over_tau\n0,1,0.25\n1,0,2\n");
    }

    TEST_CASE("radial equilibrium ratios") {
        auto p = small_run(1'000'000);
        p.kappa = 0.5;  // sigma = 1 per coordinate
        p.dt_over_tau = 10.0;
        p.horizon_over_tau = 20.0;
        const auto radii = montecarlo::free_radii(p, 10.0);
        double s1 = 0, s2 = 0;
        for (double r : radii) {
            s1 += r;
            s2 += r * r;
        }
        const double mean = s1 / double(radii.size());
        const double rms = std::sqrt(s2 / double(radii.size()));

        // Mode from a fit of ln h = a + b ln r + c r^2 to the histogram.
        constexpr int bins = 120;
        const double width = 6.0 / bins;
        std::vector<double> h(bins);
        for (double r : radii) {
            if (r < 6.0) h[std::size_t(r / width)] += 1;
        }
        double A[3][4] = {};
        for (int i = 0; i < bins; ++i) {
            if (h[i] < 200) continue;
            const double r = (i + 0.5) * width;
            const double f[3] = {1.0, std::log(r), r * r};
            const double y = std::log(h[i]);
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) A[a][b] += h[i] * f[a] * f[b];
                A[a][3] += h[i] * f[a] * y;
            }
        }
        for (int col = 0; col < 3; ++col) {
            for (int row = col + 1; row < 3; ++row) {
                const double m = A[row][col] / A[col][col];
                for (int k = col; k < 4; ++k) A[row][k] -= m * A[col][k];
            }
        }
        const double c = A[2][3] / A[2][2];
        const double b = (A[1][3] - A[1][2] * c) / A[1][1];
        const double mode = std::sqrt(-b / (2 * c));

        CHECK(rms / mean == Approx(std::sqrt(3.0) / std::sqrt(8.0 / M_PI)).epsilon(0.01));
        CHECK(rms / mode == Approx(std::sqrt(3.0) / std::sqrt(2.0)).epsilon(0.01));
        CHECK(mean / mode == Approx(std::sqrt(8.0 / M_PI) / std::sqrt(2.0)).epsilon(0.01));
    }

    TEST_CASE("coordinates are statistically interchangeable") {
        // Same start on all three axes; the marginals after one step must agree,
        // and must not depend on which seed drove them.
        for (std::uint64_t seed : {5ull, 6ull}) {
            constexpr int n = 400000;
            std::vector<double> xs(n), ys(n), zs(n);
            const rng::Philox4x32 gen(seed);
            for (int i = 0; i < n; ++i) {
                rng::NormalStream normal(gen, std::uint64_t(i));
                xs[i] = montecarlo::ou_step(2.0, 0.3, normal(), 0.1);
                ys[i] = montecarlo::ou_step(2.0, 0.3, normal(), 0.1);
                zs[i] = montecarlo::ou_step(2.0, 0.3, normal(), 0.1);
            }
            const auto mx = moments(xs), my = moments(ys), mz = moments(zs);
            const double se = std::sqrt(2 * mx.var / n);
            const double vse = std::sqrt(2 * (mx.fourth - mx.var * mx.var) / n);
            CHECK(std::abs(mx.mean - my.mean) <= 4 * se);
            CHECK(std::abs(mx.mean - mz.mean) <= 4 * se);
            CHECK(std::abs(mx.var - my.var) <= 4 * vse);
            CHECK(std::abs(mx.var - mz.var) <= 4 * vse);
        }
    }
}
