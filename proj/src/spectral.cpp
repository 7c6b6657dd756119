#include "fpt/spectral.hpp"

#include "fpt/errors.hpp"
#include "fpt/quadrature.hpp"
#include "fpt/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>

namespace fpt::spectral {

namespace {

constexpr double kB = 1.5;
constexpr int kInitialPanels = 64;
constexpr int kMaxCutoffDoublings = 4;

void require_kappa(double kappa) {
    if (kappa == 0.0) {
        throw ZeroStiffness("kappa = 0: the eigen-series is inapplicable for a potential-free particle");
    }
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive and finite");
}

double tricomi(double alpha, double x) { return specfun::tricomi_u(-alpha, kB, x); }

// Bisection down to a narrow bracket, then secant steps that fall back to
// bisection whenever they would leave the bracket.
double refine_root(double kappa, double lo, double f_lo, double hi, double f_hi, double root_tol) {
    const auto f = [kappa](double a) { return boundary_function(a, kappa); };
    const double narrow = std::max(root_tol, 1e-4 * kScanStep);
    while (hi - lo > narrow) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    double x0 = lo, f0 = f_lo, x1 = hi, f1 = f_hi;
    for (int it = 0; it < 100; ++it) {
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 > lo && x2 < hi)) x2 = 0.5 * (lo + hi);
        const double f2 = f(x2);
        if (f2 == 0.0) return x2;
        if ((f2 < 0.0) == (f_lo < 0.0)) {
            lo = x2;
            f_lo = f2;
        } else {
            hi = x2;
            f_hi = f2;
        }
        const double step = std::abs(x2 - x1);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if (step <= root_tol || hi - lo <= root_tol) return x1;
    }
    throw NoConvergence("find_eigenvalues: root refinement did not converge");
}

// The last initial panel before the cutoff must contribute below quad_tol
// relative to `total`.
bool tail_negligible(const std::function<double(double)>& integrand, double z_max, double total, double quad_tol) {
    const double width = (z_max - 1.0) / kInitialPanels;
    quad::QuadOptions opt;
    opt.rel_tol = quad_tol;
    const auto tail = quad::integrate(integrand, z_max - width, z_max, opt);
    return std::abs(tail.value) <= quad_tol * std::abs(total);
}

}  // namespace

double EigenSystem::psi(int n, double z) const {
    if (n < 1 || static_cast<std::size_t>(n) > modes.size()) {
        throw std::out_of_range("eigenfunction index " + std::to_string(n) + " outside 1.." +
                                std::to_string(modes.size()));
    }
    if (!(z >= 1.0)) throw DomainError("eigenfunction evaluated below the absorbing radius");
    // alpha_n is a zero of U(-alpha, 3/2, kappa), so the boundary value is
    // zero by construction rather than a root residual.
    if (z == 1.0) return 0.0;
    const auto& m = modes[static_cast<std::size_t>(n - 1)];
    return tricomi(m.alpha, kappa * z * z) / m.norm;
}

double eigenfunction_eval(const EigenSystem& system, int n, double z) { return system.psi(n, z); }

double boundary_function(double alpha, double kappa) {
    require_kappa(kappa);
    return tricomi(alpha, kappa);
}

std::vector<double> find_eigenvalues(double kappa, int count, double root_tol) {
    require_kappa(kappa);
    if (count < 1) throw DomainError("find_eigenvalues: count must be at least 1");
    if (!(root_tol > 0.0)) throw DomainError("find_eigenvalues: root_tol must be positive");

    const double ceiling = 5.0 * count + 20.0;
    std::vector<double> roots;
    roots.reserve(static_cast<std::size_t>(count));
    double prev_alpha = 0.0;
    double prev_f = boundary_function(0.0, kappa);
    for (int i = 1; static_cast<int>(roots.size()) < count; ++i) {
        const double alpha = i * kScanStep;
        if (alpha > ceiling) {
            throw BracketExhausted("find_eigenvalues: only " + std::to_string(roots.size()) + " of " +
                                   std::to_string(count) + " zeros below alpha = " + std::to_string(ceiling));
        }
        const double f = boundary_function(alpha, kappa);
        if (f == 0.0) {
            // Exact zero on the grid (polynomial case); restart just past it.
            roots.push_back(alpha);
            prev_alpha = alpha + 1e-3 * kScanStep;
            prev_f = boundary_function(prev_alpha, kappa);
            continue;
        }
        if ((f < 0.0) != (prev_f < 0.0)) {
            roots.push_back(refine_root(kappa, prev_alpha, prev_f, alpha, f, root_tol));
        }
        prev_alpha = alpha;
        prev_f = f;
    }
    return roots;
}

double quadrature_cutoff(double kappa, double alpha_max, double quad_tol) {
    require_kappa(kappa);
    const double log_tol = std::log(1.0 / quad_tol);
    double z = 30.0;
    for (int it = 0; it < 50; ++it) {
        const double next = std::max(30.0, std::sqrt((log_tol + 2.0 * alpha_max * std::log(z)) / kappa));
        const bool done = std::abs(next - z) <= 1e-6 * z;
        z = next;
        if (done) break;
    }
    return 2.0 * z;
}

double weighted_integral(const std::function<double(double)>& f, double kappa, double quad_tol, double z_max) {
    require_kappa(kappa);
    if (!(quad_tol > 0.0)) throw DomainError("weighted_integral: quad_tol must be positive");
    const auto weighted = [&](double z) {
        const double w = z * z * std::exp(-kappa * z * z);
        // Past exp underflow the product is zero whatever f does.
        return w == 0.0 ? 0.0 : w * f(z);
    };
    quad::QuadOptions opt;
    opt.rel_tol = quad_tol;
    opt.initial_panels = kInitialPanels;
    for (int d = 0; d <= kMaxCutoffDoublings; ++d) {
        const auto r = quad::integrate(weighted, 1.0, z_max, opt);
        if (tail_negligible(weighted, z_max, r.l1, quad_tol)) return r.value;
        z_max *= 2.0;
    }
    throw NoConvergence("weighted_integral: integrand not negligible at the cutoff");
}

double weighted_integral(const std::function<double(double)>& f, double kappa, double quad_tol) {
    return weighted_integral(f, kappa, quad_tol, quadrature_cutoff(kappa, 0.0, quad_tol));
}

double normalization(double kappa, double alpha, double quad_tol, double z_max) {
    require_kappa(kappa);
    // Integrate (sqrt(w) U)^2 so large U at the tail cannot overflow.
    quad::QuadOptions opt;
    opt.rel_tol = quad_tol;
    opt.initial_panels = kInitialPanels;
    const auto g = [&](double z) {
        const double x = kappa * z * z;
        const double root_w = z * std::exp(-0.5 * x);
        if (root_w == 0.0) return 0.0;
        const double v = root_w * tricomi(alpha, x);
        return v * v;
    };
    for (int d = 0; d <= kMaxCutoffDoublings; ++d) {
        const auto r = quad::integrate(g, 1.0, z_max, opt);
        if (tail_negligible(g, z_max, r.value, quad_tol)) return std::sqrt(r.value);
        z_max *= 2.0;
    }
    throw NoConvergence("normalization: integrand not negligible at the cutoff");
}

double coefficient(double kappa, const EigenMode& mode, double quad_tol, double z_max) {
    if (!(mode.norm > 0.0)) throw DomainError("coefficient: mode has no normalization");
    return weighted_integral([&](double z) { return tricomi(mode.alpha, kappa * z * z); }, kappa, quad_tol, z_max) /
           mode.norm;
}

EigenSystem build_eigensystem(double kappa, int count, double root_tol, double quad_tol, const EigenCache* cache) {
    require_kappa(kappa);
    if (cache != nullptr) {
        try {
            if (auto hit = cache->load(kappa, count, root_tol, quad_tol)) return *hit;
        } catch (const CacheCorrupt&) {
            // Recomputed and overwritten below.
        }
    }

    EigenSystem sys;
    sys.kappa = kappa;
    sys.root_tol = root_tol;
    sys.quad_tol = quad_tol;
    const auto alphas = find_eigenvalues(kappa, count, root_tol);
    sys.z_max = quadrature_cutoff(kappa, alphas.back(), quad_tol);
    sys.modes.resize(alphas.size());

    // Modes are independent; each iteration writes only its own slot.
    std::vector<std::exception_ptr> failures(alphas.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(alphas.size()); ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            EigenMode m;
            m.n = i + 1;
            m.alpha = alphas[k];
            m.lambda_tau = 2.0 * m.alpha;
            m.norm = normalization(kappa, m.alpha, quad_tol, sys.z_max);
            m.amp = coefficient(kappa, m, quad_tol, sys.z_max);
            sys.modes[k] = m;
        } catch (...) {
            failures[k] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    if (cache != nullptr) cache->store(sys);
    return sys;
}

}  // namespace fpt::spectral
