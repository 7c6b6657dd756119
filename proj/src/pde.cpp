#include "fpt/errors.hpp"
#include "fpt/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace fpt::oracle {

namespace {

// Steps taken with backward Euler (at half the step) before Crank-Nicolson,
// to damp the corner discontinuity of the initial data.
constexpr int kStartupHalfSteps = 4;

// Default time step per unit grid spacing.
constexpr double kStepPerSpacing = 0.05;

struct Tridiagonal {
    std::vector<double> lower, diag, upper;
};

// Solves (I - theta dt A) x = rhs in place; row 0 is the Dirichlet node.
void solve_in_place(const Tridiagonal& A, double theta_dt, std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    std::vector<double> c(n, 0.0);
    // Row 0: x0 = 0.
    rhs[0] = 0.0;
    double prev_c = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double a = -theta_dt * A.lower[i];
        const double b = 1.0 - theta_dt * A.diag[i];
        const double up = i + 1 < n ? -theta_dt * A.upper[i] : 0.0;
        const double m = b - a * prev_c;
        c[i] = up / m;
        rhs[i] = (rhs[i] - a * rhs[i - 1]) / m;
        prev_c = c[i];
    }
    for (std::size_t i = n - 1; i-- > 1;) rhs[i] -= c[i] * rhs[i + 1];
}

void apply(const Tridiagonal& A, const std::vector<double>& s, double scale, std::vector<double>& out) {
    const std::size_t n = s.size();
    out[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double v = A.diag[i] * s[i] + A.lower[i] * s[i - 1];
        if (i + 1 < n) v += A.upper[i] * s[i + 1];
        out[i] = s[i] + scale * v;
    }
}

double default_z_max(double kappa) { return std::max(20.0, 6.0 / std::sqrt(kappa)); }

}  // namespace

PdeProfile pde_solve(double kappa, double t, const PdeGrid& grid) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("PDE: kappa must be positive");
    if (!(t >= 0.0)) throw DomainError("PDE: time must be non-negative");
    if (grid.nodes < 200) throw InvalidParams("PDE grid needs at least 200 nodes");
    const double z_max = grid.z_max > 0.0 ? grid.z_max : default_z_max(kappa);
    if (!(z_max > 1.0)) throw InvalidParams("PDE z_max must exceed 1");

    const auto n = static_cast<std::size_t>(grid.nodes);
    const double h = (z_max - 1.0) / static_cast<double>(n - 1);
    const double diff = 1.0 / (2.0 * kappa);

    PdeProfile prof;
    prof.z.resize(n);
    prof.S.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) prof.z[i] = 1.0 + h * static_cast<double>(i);
    prof.z.back() = z_max;
    prof.S[0] = 0.0;
    if (t == 0.0) return prof;

    // dS/dt = diff S'' + (1/(kappa z) - z) S', central differences; the far
    // end mirrors its neighbour (zero flux).
    Tridiagonal A{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double drift = 1.0 / (kappa * prof.z[i]) - prof.z[i];
        A.lower[i] = diff / (h * h) - drift / (2.0 * h);
        A.diag[i] = -2.0 * diff / (h * h);
        A.upper[i] = diff / (h * h) + drift / (2.0 * h);
    }
    A.lower[n - 1] = 2.0 * diff / (h * h);
    A.diag[n - 1] = -2.0 * diff / (h * h);

    const double target = grid.time_step > 0.0 ? grid.time_step : kStepPerSpacing * h;
    const auto steps = std::max<long>(kStartupHalfSteps, std::lround(std::ceil(t / target)));
    const double dt = t / static_cast<double>(steps);
    prof.time_step = dt;

    std::vector<double> rhs(n);
    for (int k = 0; k < kStartupHalfSteps; ++k) solve_in_place(A, 0.5 * dt, prof.S);
    for (long k = kStartupHalfSteps / 2; k < steps; ++k) {
        apply(A, prof.S, 0.5 * dt, rhs);
        solve_in_place(A, 0.5 * dt, rhs);
        prof.S.swap(rhs);
    }
    return prof;
}

double pde_interpolate(const PdeProfile& p, double z) {
    if (p.z.size() < 4) throw DomainError("PDE profile too short to interpolate");
    if (!(z >= p.z.front() && z <= p.z.back())) throw DomainError("z outside the PDE grid");
    const auto it = std::upper_bound(p.z.begin(), p.z.end(), z);
    auto j = static_cast<std::ptrdiff_t>(it - p.z.begin()) - 2;
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(p.z.size()) - 4);
    double sum = 0.0;
    for (std::ptrdiff_t a = j; a < j + 4; ++a) {
        double l = 1.0;
        for (std::ptrdiff_t b = j; b < j + 4; ++b) {
            if (b != a) l *= (z - p.z[b]) / (p.z[a] - p.z[b]);
        }
        sum += l * p.S[a];
    }
    return sum;
}

double pde_survival(double kappa, double z_eval, double t, const OracleConfig& config) {
    config.validate();
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("PDE: kappa must be positive");
    const double z_max = config.pde_grid.z_max > 0.0 ? config.pde_grid.z_max : default_z_max(kappa);
    if (!(z_eval >= 1.0 && z_eval <= z_max)) throw DomainError("PDE: z_eval outside the grid");
    if (z_eval == 1.0) return 0.0;
    if (t == 0.0) return 1.0;

    PdeGrid coarse = config.pde_grid;
    coarse.z_max = z_max;
    PdeGrid fine = coarse;
    fine.nodes = 2 * coarse.nodes - 1;
    if (coarse.time_step > 0.0) fine.time_step = 0.5 * coarse.time_step;

    const double s_coarse = pde_interpolate(pde_solve(kappa, t, coarse), z_eval);
    const double s_fine = pde_interpolate(pde_solve(kappa, t, fine), z_eval);
    if (std::abs(s_fine - s_coarse) > kRichardsonLimit) {
        throw GridTooCoarse("PDE: Richardson estimate exceeds 1e-3; refine the grid");
    }
    return s_fine;
}

}  // namespace fpt::oracle
