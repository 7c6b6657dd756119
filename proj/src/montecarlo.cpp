#include "fpt/montecarlo.hpp"

#include "fpt/errors.hpp"
#include "fpt/philox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fpt::montecarlo {

namespace {

struct Propagator {
    double decay;  // exp(-dt)
    double sd;     // stationary-scaled noise amplitude

    Propagator(double dt, double kappa)
        : decay(std::exp(-dt)), sd(std::sqrt(-std::expm1(-2.0 * dt) / (2.0 * kappa))) {}

    double operator()(double x, double noise) const { return x * decay + sd * noise; }
};

// Trajectories are short and uneven in cost, so hand them out in chunks.
constexpr int kChunk = 64;

int resolve_threads(int requested) {
    if (requested > 0) return requested;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace

void SimParams::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidParams("simulation kappa must be positive");
    if (!(z0 > 1.0) || !std::isfinite(z0)) throw InvalidParams("simulation z0 must exceed 1");
    if (!(dt_over_tau > 0.0) || !std::isfinite(dt_over_tau)) throw InvalidParams("time step must be positive");
    if (!(horizon_over_tau > dt_over_tau) || !std::isfinite(horizon_over_tau)) {
        throw InvalidParams("horizon must exceed the time step");
    }
    if (trajectories <= 0) throw InvalidParams("trajectory count must be positive");
    if (threads < 0) throw InvalidParams("thread count must be non-negative");
}

double ou_step(double coord, double dt_over_tau, double noise, double kappa) {
    if (!(dt_over_tau >= 0.0)) throw DomainError("ou_step: dt must be non-negative");
    if (!(kappa > 0.0)) throw DomainError("ou_step: kappa must be positive");
    return Propagator(dt_over_tau, kappa)(coord, noise);
}

SimResult simulate_fpt(const SimParams& params) {
    params.validate();
    const Propagator step(params.dt_over_tau, params.kappa);
    const auto max_steps = static_cast<std::int64_t>(std::floor(params.horizon_over_tau / params.dt_over_tau + 1e-9));
    const rng::Philox4x32 gen(params.master_seed);

    SimResult result;
    result.params = params;
    result.outcomes.resize(static_cast<std::size_t>(params.trajectories));
    const int threads = resolve_threads(params.threads);

#pragma omp parallel for schedule(dynamic, kChunk) num_threads(threads)
    for (std::int64_t i = 0; i < params.trajectories; ++i) {
        rng::NormalStream normal(gen, static_cast<std::uint64_t>(i));
        double x = params.z0, y = 0.0, z = 0.0;
        Outcome out{false, max_steps * params.dt_over_tau};
        for (std::int64_t s = 1; s <= max_steps; ++s) {
            x = step(x, normal());
            y = step(y, normal());
            z = step(z, normal());
            if (x * x + y * y + z * z < 1.0) {  // strictly inside the contact radius
                out = {true, s * params.dt_over_tau};
                break;
            }
        }
        result.outcomes[static_cast<std::size_t>(i)] = out;
    }

    for (const auto& o : result.outcomes) {
        if (o.captured) {
            result.fpt_samples.push_back(o.time);
        } else {
            ++result.censored_count;
        }
    }
    return result;
}

std::vector<double> free_radii(const SimParams& params, double t_over_tau) {
    params.validate();
    if (!(t_over_tau > 0.0)) throw InvalidParams("free evolution time must be positive");
    const auto steps = std::max<std::int64_t>(1, std::llround(t_over_tau / params.dt_over_tau));
    const Propagator step(t_over_tau / static_cast<double>(steps), params.kappa);
    const rng::Philox4x32 gen(params.master_seed);
    std::vector<double> radii(static_cast<std::size_t>(params.trajectories));
    const int threads = resolve_threads(params.threads);

#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < params.trajectories; ++i) {
        rng::NormalStream normal(gen, static_cast<std::uint64_t>(i));
        double x = params.z0, y = 0.0, z = 0.0;
        for (std::int64_t s = 0; s < steps; ++s) {
            x = step(x, normal());
            y = step(y, normal());
            z = step(z, normal());
        }
        radii[static_cast<std::size_t>(i)] = std::sqrt(x * x + y * y + z * z);
    }
    return radii;
}

solution::Curve empirical_survival(const SimResult& result, std::span<const double> times) {
    const auto& p = result.params;
    const auto n = static_cast<double>(result.outcomes.size());
    if (result.outcomes.empty()) throw InvalidParams("empirical survival of an empty simulation");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw DomainError("survival grid times must be non-negative");
        if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("survival grid must be strictly increasing");
        if (times[i] > p.horizon_over_tau) {
            throw GridBeyondHorizon("survival grid time " + std::to_string(times[i]) + " exceeds the horizon " +
                                    std::to_string(p.horizon_over_tau));
        }
    }

    std::vector<double> sorted = result.fpt_samples;
    std::sort(sorted.begin(), sorted.end());

    solution::Curve c;
    c.meta = {p.kappa, p.z0, 0, solution::CurveKind::empirical};
    for (double t : times) {
        // A trajectory captured at exactly t is no longer alive at t.
        const auto captured = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        const double s = 1.0 - static_cast<double>(captured) / n;
        c.abscissa.push_back(t);
        c.values.push_back(s);
        c.std_errors.push_back(std::sqrt(s * (1.0 - s) / n));
    }
    return c;
}

void write_samples_csv(std::ostream& out, const SimResult& result) {
    out << "trajectory_index,captured,t_over_tau\n";
    char buf[64];
    for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
        const auto& o = result.outcomes[i];
        std::snprintf(buf, sizeof buf, "%.12g", o.time);
        out << i << ',' << (o.captured ? 1 : 0) << ',' << buf << '\n';
    }
}

}  // namespace fpt::montecarlo
