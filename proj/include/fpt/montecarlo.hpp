#pragma once

#include "fpt/solution.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace fpt::montecarlo {

struct SimParams {
    double kappa = 0.0;
    double z0 = 0.0;                ///< starting radius in units of L
    double dt_over_tau = 1e-3;
    double horizon_over_tau = 5.0;  ///< trajectories alive at the horizon are censored
    std::int64_t trajectories = 0;
    std::uint64_t master_seed = 0;
    int threads = 0;  ///< 0 leaves the OpenMP default

    /// Throws InvalidParams.
    void validate() const;
};

struct Outcome {
    bool captured = false;
    double time = 0.0;  ///< capture time, or the horizon when censored
};

struct SimResult {
    std::vector<double> fpt_samples;  ///< captured trajectories, in trajectory order
    std::int64_t censored_count = 0;
    std::vector<Outcome> outcomes;  ///< one per trajectory, indexed by trajectory
    SimParams params;
};

/// Exact Ornstein-Uhlenbeck update of one Cartesian coordinate (units of L)
/// over dt_over_tau >= 0, driven by a standard normal deviate.
double ou_step(double coord, double dt_over_tau, double noise, double kappa);

/// Simulates independent trajectories from (z0, 0, 0), absorbing at |r| < 1
/// checked after each step. Result is independent of the thread count.
SimResult simulate_fpt(const SimParams& params);

/// Radii after free (non-absorbing) evolution for t_over_tau, same stream
/// layout as simulate_fpt.
std::vector<double> free_radii(const SimParams& params, double t_over_tau);

/// Fraction of trajectories not yet captured at each grid time, with binomial
/// standard errors. Throws GridBeyondHorizon if the grid passes the horizon.
solution::Curve empirical_survival(const SimResult& result, std::span<const double> times);

/// Writes "trajectory_index,captured,t_over_tau" rows.
void write_samples_csv(std::ostream& out, const SimResult& result);

}  // namespace fpt::montecarlo
