#pragma once

#include "fpt/spectral.hpp"

#include <span>
#include <string>
#include <vector>

namespace fpt::solution {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

/// Physical description of the trapped particle, SI units throughout.
struct TrapParams {
    double k = 0.0;            ///< trap stiffness, N/m
    double zeta = 0.0;         ///< friction coefficient, N s/m
    double D = 0.0;            ///< diffusivity, m^2/s
    double temperature = 0.0;  ///< K
    double L = 0.0;            ///< contact radius, m
    double r0 = 0.0;           ///< initial radius, m

    /// Builds from the units used in the trap-parameter tables: k in fN/nm,
    /// zeta in nN us/nm, D in nm^2/us, L and r0 in nm. A non-positive D is
    /// replaced by the Einstein value k_B T / zeta.
    static TrapParams from_lab_units(double k_fN_per_nm, double zeta_nN_us_per_nm, double D_nm2_per_us,
                                     double temperature_K, double L_nm, double r0_nm);

    /// Relative tolerance on D = k_B T / zeta. Loose enough for a diffusivity
    /// quoted to one significant figure.
    static constexpr double kEinsteinTolerance = 0.03;

    /// Throws InvalidParams on a violated invariant.
    void validate() const;
};

struct Dimensionless {
    double kappa = 0.0;  ///< k L^2 / (2 zeta D)
    double z = 0.0;      ///< r0 / L
    double tau = 0.0;    ///< zeta / k, seconds
};

struct EquilibriumStats {
    double rms = 0.0;   ///< sqrt(<r^2>), m
    double mean = 0.0;  ///< <|r|>, m
    double mode = 0.0;  ///< most probable |r|, m
};

/// Equilibrium radial statistics of the untrapped-by-the-sphere particle
/// (Maxwell distribution with variance k_B T / k per coordinate).
EquilibriumStats equilibrium_stats(const TrapParams& params);

/// Throws InvalidParams when r0 <= L or another invariant fails.
Dimensionless to_dimensionless(const TrapParams& params);

enum class CurveKind { survival, density, mfpt, empirical };

std::string to_string(CurveKind kind);

struct CurveMeta {
    double kappa = 0.0;
    double z = 0.0;  ///< NaN for MFPT curves, whose abscissa is z
    int terms = 0;
    CurveKind kind = CurveKind::survival;
};

/// Sampled curve. Abscissa is t/tau, or z for MFPT curves.
struct Curve {
    std::vector<double> abscissa;
    std::vector<double> values;
    /// Per-point flags; see SeriesValue. Empty when not applicable.
    std::vector<unsigned> flags;
    /// Per-point standard errors for empirical curves, otherwise empty.
    std::vector<double> std_errors;
    CurveMeta meta;
};

/// Bit flags attached to series values.
enum SeriesFlag : unsigned {
    kTruncationWarning = 1u << 0,  ///< t/tau < 0.2 with fewer than 50 terms
    kEarlyTimeUnreliable = 1u << 1,  ///< density at t/tau < 0.03
};

inline constexpr double kTruncationWarningTime = 0.2;
inline constexpr int kTruncationWarningTerms = 50;
inline constexpr double kUnreliableDensityTime = 0.03;

struct SeriesValue {
    double raw = 0.0;       ///< truncated series as summed
    double reported = 0.0;  ///< survival: raw clamped to [0, 1]; density: raw
    unsigned flags = 0;
};

/// c_n psi_n(z) for the first `terms` modes, reused across a time grid.
/// terms <= 0 takes every mode of the system.
class ModalProfile {
public:
    ModalProfile(const spectral::EigenSystem& system, double z, int terms = 0);

    double z() const { return z_; }
    int terms() const { return static_cast<int>(weights_.size()); }

    double survival_raw(double t_over_tau) const;
    double density_raw(double t_over_tau) const;
    double mfpt_over_tau() const;

private:
    double z_;
    std::vector<double> rates_;    // 2 alpha_n
    std::vector<double> weights_;  // c_n psi_n(z)
};

/// S(t|z) = sum_n c_n psi_n(z) exp(-2 alpha_n t/tau).
SeriesValue survival(const spectral::EigenSystem& system, double z, double t_over_tau, int terms = 0);

/// P(t|z) = -dS/dt in units of 1/tau.
SeriesValue fpt_density(const spectral::EigenSystem& system, double z, double t_over_tau, int terms = 0);

/// Mean first-passage time in units of tau.
double mfpt(const spectral::EigenSystem& system, double z, int terms = 0);

/// Potential-free escape probability 1 - 1/z. Throws DomainError for z < 1.
double escape_probability(double z);

/// c_1 psi_1(z), the amplitude of the slowest mode.
double escape_amplitude(const spectral::EigenSystem& system, double z);

Curve survival_curve(const spectral::EigenSystem& system, double z, std::span<const double> times, int terms = 0);
Curve density_curve(const spectral::EigenSystem& system, double z, std::span<const double> times, int terms = 0);
Curve mfpt_curve(const spectral::EigenSystem& system, std::span<const double> zs, int terms = 0);

}  // namespace fpt::solution
