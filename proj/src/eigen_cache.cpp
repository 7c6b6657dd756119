#include "fpt/errors.hpp"
#include "fpt/spectral.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fpt::spectral {

using nlohmann::json;

std::string to_json(const EigenSystem& system) {
    json modes = json::array();
    for (const auto& m : system.modes) {
        modes.push_back({{"n", m.n}, {"alpha", m.alpha}, {"N", m.norm}, {"c", m.amp}});
    }
    const json doc = {{"kappa", system.kappa},       {"count", static_cast<int>(system.modes.size())},
                      {"root_tol", system.root_tol}, {"quad_tol", system.quad_tol},
                      {"z_max", system.z_max},       {"modes", modes}};
    return doc.dump(1);
}

EigenSystem from_json(const std::string& text) {
    try {
        const auto doc = json::parse(text);
        EigenSystem sys;
        sys.kappa = doc.at("kappa").get<double>();
        sys.root_tol = doc.at("root_tol").get<double>();
        sys.quad_tol = doc.at("quad_tol").get<double>();
        sys.z_max = doc.at("z_max").get<double>();
        const int count = doc.at("count").get<int>();
        for (const auto& m : doc.at("modes")) {
            EigenMode mode;
            mode.n = m.at("n").get<int>();
            mode.alpha = m.at("alpha").get<double>();
            mode.lambda_tau = 2.0 * mode.alpha;
            mode.norm = m.at("N").get<double>();
            mode.amp = m.at("c").get<double>();
            sys.modes.push_back(mode);
        }
        if (static_cast<int>(sys.modes.size()) != count) throw CacheCorrupt("mode count does not match 'count'");
        for (std::size_t i = 0; i < sys.modes.size(); ++i) {
            const auto& m = sys.modes[i];
            if (m.n != static_cast<int>(i) + 1 || !(m.alpha > 0.0) || !(m.norm > 0.0)) {
                throw CacheCorrupt("mode " + std::to_string(i + 1) + " violates the EigenMode invariants");
            }
            if (i > 0 && !(m.alpha > sys.modes[i - 1].alpha)) throw CacheCorrupt("eigenvalues not increasing");
        }
        return sys;
    } catch (const json::exception& e) {
        throw CacheCorrupt(std::string("eigen cache document: ") + e.what());
    }
}

EigenCache::EigenCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::optional<EigenCache> EigenCache::from_environment() {
    const char* env = std::getenv("FPT_CACHE_DIR");
    if (env == nullptr || *env == '\0') return std::nullopt;
    return EigenCache(env);
}

std::filesystem::path EigenCache::path_for(double kappa, int count, double root_tol, double quad_tol) const {
    char name[160];
    std::snprintf(name, sizeof name, "eigen_k%.12g_n%d_r%.3g_q%.3g.json", kappa, count, root_tol, quad_tol);
    return dir_ / name;
}

std::optional<EigenSystem> EigenCache::load(double kappa, int count, double root_tol, double quad_tol) const {
    const auto path = path_for(kappa, count, root_tol, quad_tol);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    auto sys = from_json(buf.str());
    if (sys.kappa != kappa || static_cast<int>(sys.size()) != count || sys.root_tol != root_tol ||
        sys.quad_tol != quad_tol) {
        throw CacheCorrupt("cache entry " + path.string() + " does not match its key");
    }
    return sys;
}

void EigenCache::store(const EigenSystem& system) const {
    std::filesystem::create_directories(dir_);
    const auto target = path_for(system.kappa, static_cast<int>(system.size()), system.root_tol, system.quad_tol);
    static std::atomic<unsigned> serial{0};
    auto tmp = target;
    tmp += ".tmp" + std::to_string(::getpid()) + "_" + std::to_string(serial++);
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write eigen cache file " + tmp.string());
        out << to_json(system) << '\n';
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace fpt::spectral
