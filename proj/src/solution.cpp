#include "fpt/solution.hpp"

#include "fpt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fpt::solution {

namespace {

void require_z(double z) {
    if (!(z >= 1.0)) throw DomainError("initial separation z must be at least 1");
}

void require_time(double t) {
    if (!(t >= 0.0)) throw DomainError("time must be non-negative");
}

int resolve_terms(const spectral::EigenSystem& system, int terms) {
    if (system.modes.empty()) throw DomainError("eigensystem has no modes");
    if (terms <= 0) return static_cast<int>(system.size());
    if (static_cast<std::size_t>(terms) > system.size()) {
        throw std::out_of_range("requested " + std::to_string(terms) + " terms from a " +
                                std::to_string(system.size()) + "-mode system");
    }
    return terms;
}

unsigned survival_flags(double t, int terms) {
    return (t < kTruncationWarningTime && terms < kTruncationWarningTerms) ? kTruncationWarning : 0u;
}

unsigned density_flags(double t, int terms) {
    return survival_flags(t, terms) | (t < kUnreliableDensityTime ? kEarlyTimeUnreliable : 0u);
}

void require_increasing(std::span<const double> xs) {
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw DomainError("curve abscissa must be strictly increasing");
    }
}

}  // namespace

TrapParams TrapParams::from_lab_units(double k_fN_per_nm, double zeta_nN_us_per_nm, double D_nm2_per_us,
                                      double temperature_K, double L_nm, double r0_nm) {
    TrapParams p;
    p.k = k_fN_per_nm * 1e-6;           // 1 fN/nm = 1e-15 N / 1e-9 m
    p.zeta = zeta_nN_us_per_nm * 1e-6;  // 1 nN us/nm = 1e-9 N 1e-6 s / 1e-9 m
    p.temperature = temperature_K;
    p.D = D_nm2_per_us > 0.0 ? D_nm2_per_us * 1e-12 : kBoltzmann * temperature_K / p.zeta;
    p.L = L_nm * 1e-9;
    p.r0 = r0_nm * 1e-9;
    return p;
}

void TrapParams::validate() const {
    if (!(k > 0.0)) throw InvalidParams("trap stiffness k must be positive");
    if (!(zeta > 0.0)) throw InvalidParams("friction coefficient zeta must be positive");
    if (!(D > 0.0)) throw InvalidParams("diffusivity D must be positive");
    if (!(temperature > 0.0)) throw InvalidParams("temperature must be positive");
    if (!(L > 0.0)) throw InvalidParams("contact radius L must be positive");
    if (!(r0 > L)) throw InvalidParams("initial radius r0 must exceed the contact radius L");
    const double einstein = kBoltzmann * temperature / zeta;
    if (std::abs(D - einstein) > kEinsteinTolerance * einstein) {
        throw InvalidParams("diffusivity violates the Einstein relation D = k_B T / zeta");
    }
}

EquilibriumStats equilibrium_stats(const TrapParams& params) {
    if (!(params.k > 0.0) || !(params.temperature > 0.0)) {
        throw InvalidParams("equilibrium statistics need positive k and temperature");
    }
    const double sigma = std::sqrt(kBoltzmann * params.temperature / params.k);
    return {std::sqrt(3.0) * sigma, std::sqrt(8.0 / std::numbers::pi) * sigma, std::sqrt(2.0) * sigma};
}

Dimensionless to_dimensionless(const TrapParams& params) {
    params.validate();
    return {params.k * params.L * params.L / (2.0 * params.zeta * params.D), params.r0 / params.L,
            params.zeta / params.k};
}

std::string to_string(CurveKind kind) {
    switch (kind) {
        case CurveKind::survival: return "survival";
        case CurveKind::density: return "density";
        case CurveKind::mfpt: return "mfpt";
        case CurveKind::empirical: return "empirical";
    }
    return "unknown";
}

ModalProfile::ModalProfile(const spectral::EigenSystem& system, double z, int terms) : z_(z) {
    require_z(z);
    const int n = resolve_terms(system, terms);
    rates_.reserve(static_cast<std::size_t>(n));
    weights_.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const auto& m = system.modes[static_cast<std::size_t>(i - 1)];
        rates_.push_back(m.lambda_tau);
        weights_.push_back(m.amp * system.psi(i, z));
    }
}

double ModalProfile::survival_raw(double t) const {
    require_time(t);
    double s = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i) s += weights_[i] * std::exp(-rates_[i] * t);
    return s;
}

double ModalProfile::density_raw(double t) const {
    require_time(t);
    double p = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i) p += rates_[i] * weights_[i] * std::exp(-rates_[i] * t);
    return p;
}

double ModalProfile::mfpt_over_tau() const {
    double mu = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i) mu += weights_[i] / rates_[i];
    return mu;
}

SeriesValue survival(const spectral::EigenSystem& system, double z, double t_over_tau, int terms) {
    const ModalProfile profile(system, z, terms);
    const double raw = profile.survival_raw(t_over_tau);
    return {raw, std::clamp(raw, 0.0, 1.0), survival_flags(t_over_tau, profile.terms())};
}

SeriesValue fpt_density(const spectral::EigenSystem& system, double z, double t_over_tau, int terms) {
    const ModalProfile profile(system, z, terms);
    const double raw = profile.density_raw(t_over_tau);
    return {raw, raw, density_flags(t_over_tau, profile.terms())};
}

double mfpt(const spectral::EigenSystem& system, double z, int terms) {
    return ModalProfile(system, z, terms).mfpt_over_tau();
}

double escape_probability(double z) {
    require_z(z);
    return 1.0 - 1.0 / z;
}

double escape_amplitude(const spectral::EigenSystem& system, double z) {
    require_z(z);
    if (system.modes.empty()) throw DomainError("eigensystem has no modes");
    return system.modes.front().amp * system.psi(1, z);
}

Curve survival_curve(const spectral::EigenSystem& system, double z, std::span<const double> times, int terms) {
    require_increasing(times);
    const ModalProfile profile(system, z, terms);
    Curve c;
    c.meta = {system.kappa, z, profile.terms(), CurveKind::survival};
    for (double t : times) {
        c.abscissa.push_back(t);
        c.values.push_back(std::clamp(profile.survival_raw(t), 0.0, 1.0));
        c.flags.push_back(survival_flags(t, profile.terms()));
    }
    return c;
}

Curve density_curve(const spectral::EigenSystem& system, double z, std::span<const double> times, int terms) {
    require_increasing(times);
    const ModalProfile profile(system, z, terms);
    Curve c;
    c.meta = {system.kappa, z, profile.terms(), CurveKind::density};
    for (double t : times) {
        c.abscissa.push_back(t);
        c.values.push_back(profile.density_raw(t));
        c.flags.push_back(density_flags(t, profile.terms()));
    }
    return c;
}

Curve mfpt_curve(const spectral::EigenSystem& system, std::span<const double> zs, int terms) {
    require_increasing(zs);
    Curve c;
    c.meta = {system.kappa, std::numeric_limits<double>::quiet_NaN(), resolve_terms(system, terms), CurveKind::mfpt};
    for (double z : zs) {
        c.abscissa.push_back(z);
        c.values.push_back(mfpt(system, z, terms));
    }
    return c;
}

}  // namespace fpt::solution
