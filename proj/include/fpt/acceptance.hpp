#pragma once

#include "fpt/spectral.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fpt::acceptance {

struct Options {
    std::int64_t trajectories = 100000;
    std::uint64_t seed = 20240611;
    int threads = 0;
    const spectral::EigenCache* cache = nullptr;
    std::vector<int> only;  ///< criterion ids to run; empty runs all
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

/// Runs one criterion. Numeric exceptions are caught and reported as failures.
CriterionResult run_criterion(int id, const Options& options);

/// Runs the selected criteria, printing each line to `out` as it finishes.
std::vector<CriterionResult> run_all(const Options& options, std::ostream& out);

/// "AC<id> PASS|FAIL <title>: <detail> (<seconds> s)"
std::string format(const CriterionResult& result);

}  // namespace fpt::acceptance
