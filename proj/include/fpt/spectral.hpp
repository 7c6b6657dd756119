#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fpt::spectral {

/// One radial eigenmode of the survival problem in dimensionless form.
struct EigenMode {
    int n = 0;
    double alpha = 0.0;       ///< n-th zero in alpha of U(-alpha, 3/2, kappa)
    double lambda_tau = 0.0;  ///< decay rate in units of 1/tau, always 2 * alpha
    double norm = 0.0;        ///< N_n
    double amp = 0.0;         ///< c_n, projection of the constant 1 onto psi_n

    bool operator==(const EigenMode&) const = default;
};

/// Ordered eigenmodes for one trap stiffness plus the tolerances they were
/// computed with.
struct EigenSystem {
    double kappa = 0.0;
    std::vector<EigenMode> modes;
    double root_tol = 0.0;
    double quad_tol = 0.0;
    double z_max = 0.0;

    std::size_t size() const { return modes.size(); }

    /// psi_n(z) = U(-alpha_n, 3/2, kappa z^2) / N_n, with n starting at 1.
    /// Throws std::out_of_range for a bad index and DomainError for z < 1.
    double psi(int n, double z) const;

    bool operator==(const EigenSystem&) const = default;
};

inline constexpr double kDefaultRootTol = 1e-10;
inline constexpr double kDefaultQuadTol = 1e-10;
inline constexpr double kScanStep = 0.05;

/// U(-alpha, 3/2, kappa). Its zeros in alpha are the eigenvalues.
double boundary_function(double alpha, double kappa);

/// First `count` zeros of boundary_function(., kappa), scanning upward from
/// alpha = 0 in steps of kScanStep and refining each sign change by bisection
/// followed by a safeguarded secant polish.
/// Throws ZeroStiffness for kappa == 0 and BracketExhausted if the scan passes
/// alpha = 5 * count + 20 first.
std::vector<double> find_eigenvalues(double kappa, int count, double root_tol = kDefaultRootTol);

/// Upper truncation point of the weighted integrals over [1, inf).
double quadrature_cutoff(double kappa, double alpha_max, double quad_tol);

/// int_1^inf z^2 exp(-kappa z^2) f(z) dz, truncated at z_max. The relative
/// tolerance is measured against the integral of |w f|. If the last panel
/// before z_max is not negligible the cutoff is doubled and the integral
/// redone.
double weighted_integral(const std::function<double(double)>& f, double kappa, double quad_tol, double z_max);
double weighted_integral(const std::function<double(double)>& f, double kappa, double quad_tol = kDefaultQuadTol);

/// N_n = sqrt(int_1^inf w(z) U(-alpha, 3/2, kappa z^2)^2 dz).
double normalization(double kappa, double alpha, double quad_tol, double z_max);

/// c_n = int_1^inf w(z) psi_n(z) dz for a mode with alpha and norm set.
double coefficient(double kappa, const EigenMode& mode, double quad_tol, double z_max);

/// psi_n(z) for the system; same as system.psi(n, z).
double eigenfunction_eval(const EigenSystem& system, int n, double z);

/// On-disk store of computed eigensystems, one JSON document per key.
/// Writes go to a temporary file that is renamed over the target.
class EigenCache {
public:
    explicit EigenCache(std::filesystem::path dir);

    /// Directory from $FPT_CACHE_DIR, or nullopt when unset.
    static std::optional<EigenCache> from_environment();

    std::filesystem::path path_for(double kappa, int count, double root_tol, double quad_tol) const;

    /// nullopt on a miss. Throws CacheCorrupt when the file exists but does
    /// not parse or does not match the key.
    std::optional<EigenSystem> load(double kappa, int count, double root_tol, double quad_tol) const;
    void store(const EigenSystem& system) const;

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

/// Finds the eigenvalues and the per-mode normalizations and amplitudes.
/// Consults `cache` first when given; a corrupt entry is recomputed and
/// overwritten.
EigenSystem build_eigensystem(double kappa, int count, double root_tol = kDefaultRootTol,
                              double quad_tol = kDefaultQuadTol, const EigenCache* cache = nullptr);

/// JSON (de)serialization in the cache schema.
std::string to_json(const EigenSystem& system);
EigenSystem from_json(const std::string& text);

}  // namespace fpt::spectral
