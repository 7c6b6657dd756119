#include "fpt/oracle.hpp"

#include "fpt/errors.hpp"

#include <json.hpp>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace fpt::oracle {

namespace {

namespace bmp = boost::multiprecision;

template <unsigned Digits>
using Real = bmp::number<bmp::cpp_bin_float<Digits>, bmp::et_off>;

constexpr int kScanDivisions = 20;  // alpha grid step 1/20
constexpr unsigned kModeDigits = 150;
constexpr double kAgreementDigits = 20.0;

// Runs f with a zero of the smallest supported precision covering `digits`,
// then of the next one up.
template <class F>
auto at_precision(int digits, F&& f) {
    if (digits <= 30) return f(Real<30>{});
    if (digits <= 50) return f(Real<50>{});
    if (digits <= 100) return f(Real<100>{});
    return f(Real<130>{});
}

int check_digits(int digits) { return digits <= 30 ? 50 : digits <= 50 ? 100 : 130; }

template <class T>
T rgamma(const T& s) {
    using std::floor;
    const T pi = boost::math::constants::pi<T>();
    if (s <= 0 && floor(s) == s) return T(0);
    if (s < T(0.5)) return sin(pi * s) * boost::math::tgamma(T(1) - s) / pi;
    return T(1) / boost::math::tgamma(s);
}

template <class T>
struct SeriesSum {
    T sum;
    T largest;  // magnitude of the largest term, for cancellation estimates
};

template <class T>
SeriesSum<T> kummer(const T& a, const T& b, const T& x) {
    const T eps = std::numeric_limits<T>::epsilon();
    T term = 1, sum = 1, largest = 1;
    for (int k = 0; k < 1000000; ++k) {
        term *= (a + k) * x / ((b + k) * (k + 1));
        sum += term;
        largest = std::max(largest, T(abs(term)));
        if (term == 0) return {sum, largest};
        if (k > x && k > -a && abs(term) <= eps * abs(sum)) return {sum, largest};
    }
    throw NoConvergence("multiprecision Kummer series did not converge");
}

// U(a, b, x) = G(1-b)/G(a-b+1) M(a,b,x) + G(b-1)/G(a) x^(1-b) M(a-b+1,2-b,x).
template <class T>
class Tricomi {
public:
    Tricomi(const T& a, const T& b) : a_(a), b_(b) {
        using std::floor;
        if (floor(b) == b) throw DomainError("oracle Tricomi evaluation needs non-integer b");
        p1_ = boost::math::tgamma(T(1) - b) * rgamma(T(a - b + 1));
        p2_ = boost::math::tgamma(T(b - 1)) * rgamma(a);
    }

    T operator()(const T& x, T* largest = nullptr) const {
        const auto m1 = kummer(a_, b_, x);
        const T scale = pow(x, T(1) - b_);
        const auto m2 = kummer(T(a_ - b_ + 1), T(T(2) - b_), x);
        const T t1 = p1_ * m1.sum;
        const T t2 = p2_ * scale * m2.sum;
        if (largest != nullptr) {
            *largest = std::max(T(abs(p1_) * m1.largest), T(abs(p2_) * scale * m2.largest));
        }
        return t1 + t2;
    }

private:
    T a_, b_, p1_, p2_;
};

template <class T>
std::string to_text(const T& v, int digits) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

template <class T>
std::vector<T> alpha_roots(const T& kappa, int count) {
    const T b = T(3) / 2;
    const auto f = [&](const T& alpha) { return Tricomi<T>(-alpha, b)(kappa); };
    const T tol = pow(T(10), -(std::numeric_limits<T>::digits10 - 5));
    const int max_steps = kScanDivisions * (5 * count + 20);

    std::vector<T> roots;
    T prev_a = 0;
    T prev_f = f(prev_a);
    for (int i = 1; static_cast<int>(roots.size()) < count; ++i) {
        if (i > max_steps) throw BracketExhausted("oracle: eigenvalue scan exhausted");
        const T a = T(i) / kScanDivisions;
        const T fa = f(a);
        if (fa == 0) {
            roots.push_back(a);
            prev_a = a + tol;
            prev_f = f(prev_a);
            continue;
        }
        if ((fa < 0) != (prev_f < 0)) {
            T lo = prev_a, hi = a, f_lo = prev_f;
            for (int it = 0; hi - lo > tol * std::max(T(1), hi); ++it) {
                if (it > 10000) throw NoConvergence("oracle: bisection did not converge");
                const T mid = (lo + hi) / 2;
                const T fm = f(mid);
                if (fm == 0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0) == (f_lo < 0)) {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back((lo + hi) / 2);
        }
        prev_a = a;
        prev_f = fa;
    }
    return roots;
}

// Working and check precision must share kAgreementDigits significant digits.
template <class A, class B>
void require_agreement_mp(const A& lo, const B& hi, const char* what) {
    const Real<130> x(lo), y(hi);
    const Real<130> scale = std::max(Real<130>(abs(y)), Real<130>(1e-300));
    if (abs(x - y) > scale * pow(Real<130>(10), Real<130>(-kAgreementDigits))) {
        throw PrecisionExhausted(std::string("oracle: ") + what + " differs between working and check precision");
    }
}

double erfcx(double s) { return std::exp(s * s) * std::erfc(s); }

}  // namespace

void OracleConfig::validate() const {
    if (digits < 30 || digits > 100) throw InvalidParams("oracle digits must lie in [30, 100]");
    if (pde_grid.nodes < 200) throw InvalidParams("PDE grid needs at least 200 nodes");
    if (pde_grid.z_max < 0.0 || pde_grid.time_step < 0.0) throw InvalidParams("PDE grid parameters must be >= 0");
    if (quad_points < 20) throw InvalidParams("quad_points must be at least 20");
}

HighPrec highprec_tricomi(double a, double b, double x, const OracleConfig& config) {
    config.validate();
    if (!(x > 0.0)) throw DomainError("oracle Tricomi evaluation needs x > 0");
    const auto eval = [&](auto zero) {
        using T = decltype(zero);
        return Real<130>(Tricomi<T>(T(a), T(b))(T(x)));
    };
    const auto lo = at_precision(config.digits, eval);
    const auto hi = at_precision(check_digits(config.digits), eval);
    require_agreement_mp(lo, hi, "U(a, b, x)");
    return {static_cast<double>(hi), to_text(hi, config.digits)};
}

std::vector<HighPrec> highprec_alphas(double kappa, int count, const OracleConfig& config) {
    config.validate();
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("oracle: kappa must be positive");
    if (count < 1) throw DomainError("oracle: count must be at least 1");
    const auto solve = [&](auto zero) {
        using T = decltype(zero);
        std::vector<Real<130>> out;
        for (const auto& r : alpha_roots(T(kappa), count)) out.emplace_back(r);
        return out;
    };
    const auto lo = at_precision(config.digits, solve);
    const auto hi = at_precision(check_digits(config.digits), solve);
    std::vector<HighPrec> result;
    for (std::size_t i = 0; i < hi.size(); ++i) {
        require_agreement_mp(lo[i], hi[i], "eigenvalue");
        result.push_back({static_cast<double>(hi[i]), to_text(hi[i], config.digits)});
    }
    return result;
}

double highprec_alpha(double kappa, int n, const OracleConfig& config) {
    if (n < 1) throw DomainError("oracle: mode index must be at least 1");
    return highprec_alphas(kappa, n, config).back().value;
}

namespace {

using ModeReal = Real<kModeDigits>;

struct ModeData {
    HighPrec alpha_text;
    ModeReal alpha, norm, amp;
};

ModeData mode_data(double kappa, int n, const OracleConfig& config) {
    using T = ModeReal;
    const auto alphas = highprec_alphas(kappa, n, config);
    const T alpha(alphas.back().text);
    const T k(kappa);
    const Tricomi<T> u(-alpha, T(3) / 2);

    // Integrand ~ x^(2 alpha + 1/2) e^-x; stop where that is e^-80 below the peak.
    const double al = static_cast<double>(alpha);
    const double peak = std::max(2.0 * al + 0.5, 1.0);
    double x_hi = std::max(peak, kappa) + 10.0;
    while ((x_hi - peak) - peak * std::log(x_hi / peak) < 80.0) x_hi += 1.0;
    const T z_hi = sqrt(T(x_hi) / k);

    T largest = 0;
    const T at_edge = u(T(x_hi), &largest);
    const double lost = static_cast<double>(log10(largest / abs(at_edge)));
    if (lost > static_cast<double>(kModeDigits) - 40.0) {
        throw PrecisionExhausted("oracle: hypergeometric cancellation exceeds the mode quadrature precision");
    }

    using Rule = boost::math::quadrature::gauss<T, 20>;
    const auto integrate = [&](int panels, T& norm2, T& proj) {
        norm2 = 0;
        proj = 0;
        const T width = (z_hi - 1) / panels;
        for (int p = 0; p < panels; ++p) {
            const T mid = 1 + (T(p) + T(0.5)) * width;
            const T half = width / 2;
            for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
                const T off = half * Rule::abscissa()[i];
                const T wq = half * Rule::weights()[i];
                for (int sgn : {-1, 1}) {
                    const T z = mid + sgn * off;
                    const T x = k * z * z;
                    const T w = z * z * exp(-x);
                    const T uz = u(x);
                    norm2 += wq * w * uz * uz;
                    proj += wq * w * uz;
                }
            }
        }
    };

    T n_coarse, p_coarse, n_fine, p_fine;
    int panels = 16;
    integrate(panels, n_coarse, p_coarse);
    for (;; panels *= 2) {
        if (panels > 2048) throw NoConvergence("oracle: mode quadrature did not converge");
        integrate(2 * panels, n_fine, p_fine);
        const T tol = pow(T(10), T(-(kAgreementDigits + 5)));
        if (abs(n_fine - n_coarse) <= tol * abs(n_fine) && abs(p_fine - p_coarse) <= tol * abs(p_fine)) break;
        n_coarse = n_fine;
        p_coarse = p_fine;
    }
    const T norm = sqrt(n_fine);
    return {alphas.back(), alpha, norm, p_fine / norm};
}

}  // namespace

HighPrecMode highprec_mode(double kappa, int n, const OracleConfig& config) {
    const auto m = mode_data(kappa, n, config);
    return {m.alpha_text, {static_cast<double>(m.norm), to_text(m.norm, config.digits)},
            {static_cast<double>(m.amp), to_text(m.amp, config.digits)}};
}

HighPrec highprec_eigenfunction(double kappa, int n, double z, const OracleConfig& config) {
    if (!(z >= 1.0)) throw DomainError("oracle: z must be at least 1");
    const auto m = mode_data(kappa, n, config);
    const ModeReal x = ModeReal(kappa) * ModeReal(z) * ModeReal(z);
    const ModeReal psi = Tricomi<ModeReal>(-m.alpha, ModeReal(3) / 2)(x) / m.norm;
    return {static_cast<double>(psi), to_text(psi, config.digits)};
}


double mfpt_slope(double kappa, double z) {
    if (!(kappa > 0.0)) throw DomainError("oracle: kappa must be positive");
    if (!(z >= 1.0)) throw DomainError("oracle: z must be at least 1");
    if (kappa * z * z > kLogOverflowGuard) throw OverflowGuard("oracle: kappa z^2 beyond the log-space guard");
    const double s = std::sqrt(kappa) * z;
    return 1.0 / z + std::sqrt(std::numbers::pi) / (2.0 * std::sqrt(kappa)) * erfcx(s) / (z * z);
}

double mfpt_integral(double kappa, double z, const OracleConfig& config) {
    config.validate();
    if (!(kappa > 0.0)) throw DomainError("oracle: kappa must be positive");
    if (!(z >= 1.0)) throw DomainError("oracle: z must be at least 1");
    if (kappa * z * z > kLogOverflowGuard) throw OverflowGuard("oracle: kappa z^2 beyond the log-space guard");
    if (z == 1.0) return 0.0;
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const int panels = config.quad_points / 20;
    const double width = (z - 1.0) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = 1.0 + p * width;
        sum += Rule::integrate([kappa](double y) { return mfpt_slope(kappa, y); }, a, a + width);
    }
    return sum;
}

std::vector<Fixture> read_fixtures(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture file " + path.string());
    const auto doc = nlohmann::json::parse(in);
    std::vector<Fixture> out;
    for (const auto& e : doc) {
        out.push_back({e.at("quantity").get<std::string>(), e.at("kappa").get<double>(),
                       e.at("z_or_n").get<double>(), e.at("value").get<std::string>(), e.at("digits").get<int>(),
                       e.at("generator_version").get<std::string>()});
    }
    return out;
}

void write_fixtures(const std::filesystem::path& path, const std::vector<Fixture>& fixtures) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& f : fixtures) {
        doc.push_back({{"quantity", f.quantity},
                       {"kappa", f.kappa},
                       {"z_or_n", f.z_or_n},
                       {"value", f.value},
                       {"digits", f.digits},
                       {"generator_version", f.generator_version}});
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write fixture file " + path.string());
    out << doc.dump(2) << '\n';
}

const Fixture& find_fixture(const std::vector<Fixture>& fixtures, const std::string& quantity, double kappa,
                            double z_or_n) {
    for (const auto& f : fixtures) {
        if (f.quantity == quantity && f.kappa == kappa && f.z_or_n == z_or_n) return f;
    }
    throw std::out_of_range("no fixture for " + quantity);
}

}  // namespace fpt::oracle
