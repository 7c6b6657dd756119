#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fpt::oracle {

struct PdeGrid {
    double z_max = 0.0;      ///< 0 selects max(20, 6/sqrt(kappa))
    int nodes = 2001;        ///< grid points including both ends
    double time_step = 0.0;  ///< 0 selects a step proportional to the spacing
};

struct OracleConfig {
    int digits = 30;  ///< working precision; results are re-checked at a higher one
    PdeGrid pde_grid;
    int quad_points = 4000;  ///< Gauss-Legendre nodes for the MFPT outer integral

    /// Throws InvalidParams: digits in [30, 100], nodes >= 200.
    void validate() const;
};

/// Multiprecision result rounded to double, plus its decimal expansion.
struct HighPrec {
    double value = 0.0;
    std::string text;
};

/// U(a, b, x) from the Kummer connection formula in multiprecision,
/// checked at two precisions. Throws PrecisionExhausted on disagreement.
HighPrec highprec_tricomi(double a, double b, double x, const OracleConfig& config = {});

/// First `count` zeros in alpha of U(-alpha, 3/2, kappa), by scan and
/// bisection in multiprecision.
std::vector<HighPrec> highprec_alphas(double kappa, int count, const OracleConfig& config = {});

/// The n-th zero (1-based).
double highprec_alpha(double kappa, int n, const OracleConfig& config = {});

struct HighPrecMode {
    HighPrec alpha;
    HighPrec norm;  ///< sqrt of the weighted integral of U^2
    HighPrec amp;   ///< weighted integral of U, divided by norm
};

/// Mode n by multiprecision Gauss-Legendre quadrature. Slow; intended for
/// the first few modes only. Throws PrecisionExhausted when cancellation in
/// the hypergeometric series would eat the working precision.
HighPrecMode highprec_mode(double kappa, int n, const OracleConfig& config = {});

/// psi_n(z) = U(-alpha_n, 3/2, kappa z^2) / N_n at the mode-quadrature precision.
HighPrec highprec_eigenfunction(double kappa, int n, double z, const OracleConfig& config = {});

/// d(mu/tau)/dz = 1/z + sqrt(pi)/(2 sqrt(kappa)) z^-2 erfcx(sqrt(kappa) z).
double mfpt_slope(double kappa, double z);

/// mu/tau = 2 kappa int_1^z dy e^{kappa y^2} y^-2 int_y^inf dx x^2 e^{-kappa x^2}.
/// Throws OverflowGuard when kappa z^2 > 700.
double mfpt_integral(double kappa, double z, const OracleConfig& config = {});

inline constexpr double kLogOverflowGuard = 700.0;

struct PdeProfile {
    std::vector<double> z;
    std::vector<double> S;
    double time_step = 0.0;
};

/// Crank-Nicolson solve of the dimensionless survival equation on `grid`,
/// with backward-Euler start-up steps. No error control.
PdeProfile pde_solve(double kappa, double t_over_tau, const PdeGrid& grid);

/// Cubic interpolation of a profile at z.
double pde_interpolate(const PdeProfile& profile, double z);

/// S(t|z) from the PDE, Richardson-checked against twice the nodes.
/// Throws GridTooCoarse if the two grids differ by more than 1e-3.
double pde_survival(double kappa, double z_eval, double t_over_tau, const OracleConfig& config = {});

inline constexpr double kRichardsonLimit = 1e-3;

/// One golden constant with its generation parameters.
struct Fixture {
    std::string quantity;
    double kappa = 0.0;
    double z_or_n = 0.0;
    std::string value;
    int digits = 0;
    std::string generator_version;

    bool operator==(const Fixture&) const = default;
};

inline constexpr const char* kGeneratorVersion = "fpt-oracle 1";

std::vector<Fixture> read_fixtures(const std::filesystem::path& path);
void write_fixtures(const std::filesystem::path& path, const std::vector<Fixture>& fixtures);

/// Looks up a fixture by quantity and parameters; throws std::out_of_range.
const Fixture& find_fixture(const std::vector<Fixture>& fixtures, const std::string& quantity, double kappa,
                            double z_or_n);

}  // namespace fpt::oracle
