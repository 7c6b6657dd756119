#pragma once

#include "fpt/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fpt::test {

inline const std::vector<oracle::Fixture>& golden() {
    static const auto fixtures = oracle::read_fixtures(FPT_FIXTURE_PATH);
    return fixtures;
}

inline double golden_value(const std::string& quantity, double kappa, double z_or_n) {
    return std::stod(oracle::find_fixture(golden(), quantity, kappa, z_or_n).value);
}

// int_1^inf z^m e^{-kappa z^2} dz for even m.
inline double gaussian_moment(int m, double kappa) {
    double i = std::sqrt(std::numbers::pi) / (2.0 * std::sqrt(kappa)) * std::erfc(std::sqrt(kappa));
    for (int j = 0; j < m; j += 2) i = std::exp(-kappa) / (2.0 * kappa) + (j + 1) / (2.0 * kappa) * i;
    return i;
}

}  // namespace fpt::test
