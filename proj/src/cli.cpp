#include "fpt/cli.hpp"

#include "fpt/acceptance.hpp"
#include "fpt/errors.hpp"
#include "fpt/montecarlo.hpp"
#include "fpt/oracle.hpp"
#include "fpt/solution.hpp"
#include "fpt/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fpt::cli {

namespace {

constexpr double kTol = 1e-10;

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Physical {
    double stiffness = 0.0;    // fN/nm
    double friction = 0.0;     // nN us/nm
    double diffusivity = 0.0;  // nm^2/us, 0 = Einstein
    double temperature = 300.0;
    double radius = 0.0;  // nm
    double r0 = 0.0;      // nm
    CLI::Option* flag = nullptr;

    void add_to(CLI::App& cmd) {
        flag = cmd.add_option("--stiffness", stiffness, "trap stiffness k, fN/nm");
        auto* f = cmd.add_option("--friction", friction, "friction coefficient zeta, nN us/nm");
        cmd.add_option("--diffusivity", diffusivity, "diffusivity D, nm^2/us (default k_B T / zeta)");
        cmd.add_option("--temperature", temperature, "temperature, K")->capture_default_str();
        auto* l = cmd.add_option("--radius", radius, "contact radius L, nm");
        auto* r = cmd.add_option("--r0", r0, "initial radius r0, nm");
        for (auto* o : {f, l, r}) {
            flag->needs(o);
            o->needs(flag);
        }
    }

    bool given() const { return flag != nullptr && flag->count() > 0; }

    // Converts once and echoes the conversion.
    solution::Dimensionless convert(std::ostream& err) const {
        const auto p = solution::TrapParams::from_lab_units(stiffness, friction, diffusivity, temperature, radius, r0);
        const auto d = solution::to_dimensionless(p);
        err << "# physical input: kappa=" << format_number(d.kappa) << " z=" << format_number(d.z)
            << " tau_s=" << format_number(d.tau) << '\n';
        return d;
    }
};

struct Context {
    std::string cache_dir;
    int threads = 0;
    std::string output;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
    std::optional<spectral::EigenCache> cache;
    std::unique_ptr<std::ofstream> file;

    void prepare() {
        if (!cache_dir.empty()) {
            cache.emplace(cache_dir);
        } else {
            cache = spectral::EigenCache::from_environment();
        }
#ifdef _OPENMP
        if (threads > 0) omp_set_num_threads(threads);
#endif
        if (!output.empty()) {
            file = std::make_unique<std::ofstream>(output, std::ios::trunc | std::ios::binary);
            if (!*file) throw UsageError("cannot write output file " + output);
            out = file.get();
        }
    }

    spectral::EigenSystem system(double kappa, int count) const {
        return spectral::build_eigensystem(kappa, count, kTol, kTol, cache ? &*cache : nullptr);
    }
};

void write_row(std::ostream& os, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << format_number(values[i]);
    os << '\n';
}

void write_header(std::ostream& os, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    os << '\n';
}

std::vector<double> time_grid(double tmin, double tmax, int points) {
    if (!(tmin >= 0.0) || !(tmax > tmin)) throw UsageError("time grid needs 0 <= tmin < tmax");
    if (points < 2) throw UsageError("time grid needs at least 2 points");
    std::vector<double> t(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = tmin + (tmax - tmin) * i / (points - 1);
    return t;
}

struct CurveFlags {
    std::string kappa = "0.012";
    std::string z = "5";
    double tmin = 0.0;
    double tmax = 6.0;
    int points = 301;
    int terms = 25;
    bool keep_early = false;
    Physical physical;
    CLI::Option* kappa_opt = nullptr;
    CLI::Option* z_opt = nullptr;

    void add_to(CLI::App& cmd) {
        kappa_opt = cmd.add_option("--kappa", kappa, "kappa values, comma list")->capture_default_str();
        z_opt = cmd.add_option("--z", z, "initial separations r0/L, comma list")->capture_default_str();
        cmd.add_option("--tmin", tmin, "first time, units of tau")->capture_default_str();
        cmd.add_option("--tmax", tmax, "last time, units of tau")->capture_default_str();
        cmd.add_option("--points", points, "number of time points")->capture_default_str();
        cmd.add_option("--terms", terms, "series terms")->capture_default_str();
        physical.add_to(cmd);
        physical.flag->excludes(kappa_opt)->excludes(z_opt);
    }

    std::vector<std::pair<double, double>> cases(std::ostream& err) const {
        if (physical.given()) {
            const auto d = physical.convert(err);
            return {{d.kappa, d.z}};
        }
        std::vector<std::pair<double, double>> out;
        for (double k : parse_list(kappa)) {
            for (double zz : parse_grid(z)) out.emplace_back(k, zz);
        }
        return out;
    }
};

int cmd_eigen(Context& ctx, double kappa, int count, const std::string& format) {
    if (count < 1) throw UsageError("--count must be at least 1");
    const auto sys = ctx.system(kappa, count);
    auto& os = *ctx.out;
    if (format == "json") {
        nlohmann::json modes = nlohmann::json::array();
        for (const auto& m : sys.modes) {
            modes.push_back(
                {{"n", m.n}, {"alpha_n", m.alpha}, {"lambda_n_tau", m.lambda_tau}, {"N_n", m.norm}, {"c_n", m.amp}});
        }
        os << nlohmann::json{{"kappa", kappa}, {"count", count}, {"modes", modes}}.dump(2) << '\n';
        return kOk;
    }
    write_header(os, {"n", "alpha_n", "lambda_n_tau", "N_n", "c_n"});
    for (const auto& m : sys.modes) write_row(os, {double(m.n), m.alpha, m.lambda_tau, m.norm, m.amp});
    return kOk;
}

int cmd_curves(Context& ctx, const CurveFlags& f, bool density) {
    const auto cases = f.cases(*ctx.err);
    const auto times = time_grid(f.tmin, f.tmax, f.points);
    std::vector<std::string> names{"t_over_tau"};
    std::vector<solution::Curve> curves;
    for (const auto& [kappa, z] : cases) {
        const auto sys = ctx.system(kappa, f.terms);
        names.push_back(std::string(density ? "P" : "S") + "_kappa" + label(kappa) + "_z" + label(z));
        curves.push_back(density ? solution::density_curve(sys, z, times, f.terms)
                                 : solution::survival_curve(sys, z, times, f.terms));
    }
    auto& os = *ctx.out;
    write_header(os, names);
    bool truncated = false, suppressed = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        unsigned flags = 0;
        for (const auto& c : curves) flags |= c.flags[i];
        if (density && (flags & solution::kEarlyTimeUnreliable) && !f.keep_early) {
            suppressed = true;
            continue;
        }
        truncated |= (flags & solution::kTruncationWarning) != 0;
        std::vector<double> row{times[i]};
        for (const auto& c : curves) row.push_back(c.values[i]);
        write_row(os, row);
    }
    if (suppressed) *ctx.err << "# rows with t/tau < 0.03 suppressed (early-time series unreliable)\n";
    if (truncated) *ctx.err << "# warning: t/tau < 0.2 with fewer than 50 terms; truncation error may be visible\n";
    return kOk;
}

int cmd_mfpt(Context& ctx, const std::string& kappas, const std::string& zs, int terms, bool with_oracle) {
    const auto ks = parse_list(kappas);
    const auto grid = parse_grid(zs);
    std::vector<std::string> names{"z"};
    std::vector<solution::Curve> series;
    for (double k : ks) {
        series.push_back(solution::mfpt_curve(ctx.system(k, terms), grid, terms));
        names.push_back("mfpt_kappa" + label(k));
    }
    if (with_oracle) {
        for (double k : ks) names.push_back("mfpt_integral_kappa" + label(k));
    }
    auto& os = *ctx.out;
    write_header(os, names);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (const auto& c : series) row.push_back(c.values[i]);
        if (with_oracle) {
            for (double k : ks) row.push_back(oracle::mfpt_integral(k, grid[i]));
        }
        write_row(os, row);
    }
    return kOk;
}

struct SimulateFlags {
    double kappa = 0.012;
    double z = 5.0;
    double dt = 1e-3;
    double horizon = 5.0;
    std::int64_t n = 100000;
    std::uint64_t seed = 1;
    std::string times = "0.5,1,2,4";
    bool compare = false;
    double tolerance = 0.01;
    int terms = 25;
    std::string samples;
    std::string report;
    Physical physical;
};

int cmd_simulate(Context& ctx, const SimulateFlags& f) {
    montecarlo::SimParams p;
    p.kappa = f.kappa;
    p.z0 = f.z;
    if (f.physical.given()) {
        const auto d = f.physical.convert(*ctx.err);
        p.kappa = d.kappa;
        p.z0 = d.z;
    }
    p.dt_over_tau = f.dt;
    p.horizon_over_tau = f.horizon;
    p.trajectories = f.n;
    p.master_seed = f.seed;
    p.threads = ctx.threads;
    p.validate();
    const auto grid = parse_grid(f.times);

    const auto result = montecarlo::simulate_fpt(p);
    const auto emp = montecarlo::empirical_survival(result, grid);

    if (!f.samples.empty()) {
        std::ofstream s(f.samples, std::ios::trunc | std::ios::binary);
        if (!s) throw UsageError("cannot write samples file " + f.samples);
        montecarlo::write_samples_csv(s, result);
    }

    std::vector<double> theory;
    double max_gap = 0.0;
    if (f.compare) {
        const auto sys = ctx.system(p.kappa, f.terms);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            theory.push_back(solution::survival(sys, p.z0, grid[i], f.terms).reported);
            max_gap = std::max(max_gap, std::abs(theory.back() - emp.values[i]));
        }
    }

    auto& os = *ctx.out;
    if (f.compare) {
        write_header(os, {"t_over_tau", "S_empirical", "std_error", "S_series", "abs_gap"});
    } else {
        write_header(os, {"t_over_tau", "S_empirical", "std_error"});
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i], emp.values[i], emp.std_errors[i]};
        if (f.compare) {
            row.push_back(theory[i]);
            row.push_back(std::abs(theory[i] - emp.values[i]));
        }
        write_row(os, row);
    }

    nlohmann::json rep{{"kappa", p.kappa},
                       {"z", p.z0},
                       {"dt_over_tau", p.dt_over_tau},
                       {"horizon_over_tau", p.horizon_over_tau},
                       {"trajectories", p.trajectories},
                       {"seed", p.master_seed},
                       {"captured", result.fpt_samples.size()},
                       {"censored", result.censored_count}};
    if (f.compare) {
        rep["terms"] = f.terms;
        rep["max_gap"] = max_gap;
        rep["tolerance"] = f.tolerance;
        rep["passed"] = max_gap <= f.tolerance;
    }
    if (!f.report.empty()) {
        std::ofstream r(f.report, std::ios::trunc | std::ios::binary);
        if (!r) throw UsageError("cannot write report file " + f.report);
        r << rep.dump(2) << '\n';
    } else if (f.compare) {
        *ctx.err << rep.dump(2) << '\n';
    }
    return f.compare && max_gap > f.tolerance ? kVerificationFailure : kOk;
}

int cmd_escape(Context& ctx, const std::string& kappas, const std::string& zs, bool gaps) {
    const auto ks = parse_list(kappas);
    const auto grid = parse_grid(zs);
    std::vector<spectral::EigenSystem> systems;
    std::vector<std::string> names{"z", "P_E"};
    for (double k : ks) {
        systems.push_back(ctx.system(k, 1));
        names.push_back("amp_kappa" + label(k));
    }
    if (gaps) {
        for (double k : ks) names.push_back("gap_kappa" + label(k));
    }
    auto& os = *ctx.out;
    write_header(os, names);
    for (double z : grid) {
        const double pe = solution::escape_probability(z);
        std::vector<double> row{z, pe};
        std::vector<double> amps;
        for (const auto& s : systems) amps.push_back(solution::escape_amplitude(s, z));
        row.insert(row.end(), amps.begin(), amps.end());
        if (gaps) {
            for (double a : amps) row.push_back(std::abs(a - pe));
        }
        write_row(os, row);
    }
    return kOk;
}

int cmd_verify(Context& ctx, const std::vector<int>& only, std::int64_t trajectories, std::uint64_t seed) {
    acceptance::Options o;
    o.only = only;
    o.trajectories = trajectories;
    o.seed = seed;
    o.threads = ctx.threads;
    o.cache = ctx.cache ? &*ctx.cache : nullptr;
    for (int id : only) {
        if (id < 1 || id > acceptance::kCriterionCount) throw UsageError("no acceptance criterion " + std::to_string(id));
    }
    const auto results = acceptance::run_all(o, *ctx.out);
    const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    return ok ? kOk : kVerificationFailure;
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& spec) {
    std::vector<double> out;
    std::stringstream items(spec);
    std::string item;
    const auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("not a number: '" + s + "'");
        }
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("not a number: '" + s + "'");
        return v;
    };
    while (std::getline(items, item, ',')) {
        if (item.empty()) throw std::invalid_argument("empty item in list '" + spec + "'");
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(number(item));
            continue;
        }
        const auto colon = item.find(':', dots);
        const double lo = number(item.substr(0, dots));
        const double hi = number(item.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
        const double step = colon == std::string::npos ? 1.0 : number(item.substr(colon + 1));
        if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("bad range '" + item + "'");
        const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        for (long i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::vector<double> parse_grid(const std::string& spec) {
    const auto out = parse_list(spec);
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i] > out[i - 1])) throw std::invalid_argument("list '" + spec + "' is not increasing");
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"First-passage times of a harmonically trapped particle to an absorbing sphere", "fpt"};
    app.require_subcommand(1);
    Context ctx;
    ctx.out = &out;
    ctx.err = &err;
    app.add_option("--cache-dir", ctx.cache_dir, "eigen-system cache directory (default $FPT_CACHE_DIR)");
    app.add_option("--threads", ctx.threads, "worker thread cap (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    app.add_option("-o,--output", ctx.output, "write the table to this file instead of stdout");

    std::function<int()> action;

    double e_kappa = 0.0;
    int e_count = 25;
    std::string e_format = "csv";
    auto* eigen = app.add_subcommand("eigen", "eigenvalues, normalizations and expansion coefficients");
    eigen->add_option("--kappa", e_kappa, "dimensionless stiffness")->required();
    eigen->add_option("--count", e_count, "number of modes")->capture_default_str();
    eigen->add_option("--format", e_format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    eigen->callback([&] { action = [&] { return cmd_eigen(ctx, e_kappa, e_count, e_format); }; });

    CurveFlags s_flags;
    auto* surv = app.add_subcommand("survival", "survival probability curves");
    s_flags.add_to(*surv);
    surv->callback([&] { action = [&] { return cmd_curves(ctx, s_flags, false); }; });

    CurveFlags p_flags;
    p_flags.tmax = 1.0;
    p_flags.terms = 50;
    auto* fpt = app.add_subcommand("fpt", "first-passage time density curves");
    p_flags.add_to(*fpt);
    fpt->add_flag("--keep-early", p_flags.keep_early, "keep rows below 0.03 tau");
    fpt->callback([&] { action = [&] { return cmd_curves(ctx, p_flags, true); }; });

    std::string m_kappa = "0.003,0.006,0.012,0.049", m_z = "1..20";
    int m_terms = 25;
    bool m_oracle = false;
    auto* mf = app.add_subcommand("mfpt", "mean first-passage time against z");
    mf->add_option("--kappa", m_kappa, "kappa values, comma list")->capture_default_str();
    mf->add_option("--z", m_z, "z grid, e.g. 1..20 or 1..20:0.5")->capture_default_str();
    mf->add_option("--terms", m_terms, "series terms")->capture_default_str();
    mf->add_flag("--oracle", m_oracle, "add the double-integral reference columns");
    mf->callback([&] { action = [&] { return cmd_mfpt(ctx, m_kappa, m_z, m_terms, m_oracle); }; });

    SimulateFlags sim;
    auto* sc = app.add_subcommand("simulate", "Monte Carlo first-passage simulation");
    auto* sk = sc->add_option("--kappa", sim.kappa, "dimensionless stiffness")->capture_default_str();
    auto* sz = sc->add_option("--z", sim.z, "initial separation r0/L")->capture_default_str();
    sc->add_option("--dt", sim.dt, "time step, units of tau")->capture_default_str();
    sc->add_option("--horizon", sim.horizon, "censoring horizon, units of tau")->capture_default_str();
    sc->add_option("--n", sim.n, "number of trajectories")->capture_default_str();
    sc->add_option("--seed", sim.seed, "master seed")->capture_default_str();
    sc->add_option("--times", sim.times, "survival grid, comma list")->capture_default_str();
    sc->add_flag("--compare", sim.compare, "compare with the series and report the max gap");
    sc->add_option("--tolerance", sim.tolerance, "max gap allowed with --compare")->capture_default_str();
    sc->add_option("--terms", sim.terms, "series terms for --compare")->capture_default_str();
    sc->add_option("--samples", sim.samples, "write per-trajectory outcomes as CSV");
    sc->add_option("--report", sim.report, "write the JSON report here");
    sim.physical.add_to(*sc);
    sim.physical.flag->excludes(sk)->excludes(sz);
    sc->callback([&] { action = [&] { return cmd_simulate(ctx, sim); }; });

    std::string x_kappa = "0.012,0.003,0.0012,0.00012", x_z = "1..20:0.1";
    bool x_gaps = false;
    auto* esc = app.add_subcommand("escape", "slowest-mode amplitude against the free escape probability");
    esc->add_option("--kappa", x_kappa, "kappa values, comma list")->capture_default_str();
    esc->add_option("--z", x_z, "z grid")->capture_default_str();
    esc->add_flag("--gaps", x_gaps, "add |amplitude - (1 - 1/z)| columns");
    esc->callback([&] { action = [&] { return cmd_escape(ctx, x_kappa, x_z, x_gaps); }; });

    std::vector<int> v_only;
    std::int64_t v_n = 100000;
    std::uint64_t v_seed = acceptance::Options{}.seed;
    auto* ver = app.add_subcommand("verify", "run the acceptance suite");
    ver->add_option("--only", v_only, "criterion ids")->delimiter(',');
    ver->add_option("--trajectories", v_n, "Monte Carlo trajectories per case")->capture_default_str();
    ver->add_option("--seed", v_seed, "Monte Carlo master seed")->capture_default_str();
    ver->callback([&] { action = [&] { return cmd_verify(ctx, v_only, v_n, v_seed); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        ctx.prepare();
        return action();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    }
}

}  // namespace fpt::cli
