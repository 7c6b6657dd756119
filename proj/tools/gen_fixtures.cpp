// Writes the golden constants used by the test suite.
//   gen_fixtures [output.json]
#include "fpt/oracle.hpp"

#include <cstdio>
#include <iostream>

using fpt::oracle::Fixture;

namespace {

std::string text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : "tests/fixtures/golden.json";
    const fpt::oracle::OracleConfig cfg;
    const std::string ver = fpt::oracle::kGeneratorVersion;
    std::vector<Fixture> out;

    for (double kappa : {0.003, 0.012, 0.024, 0.049}) {
        const auto alphas = fpt::oracle::highprec_alphas(kappa, 25, cfg);
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            out.push_back({"alpha", kappa, double(i + 1), alphas[i].text, cfg.digits, ver});
        }
        std::cerr << "alpha kappa=" << kappa << " done\n";
    }
    out.push_back({"alpha", 1.5, 1, fpt::oracle::highprec_alphas(1.5, 1, cfg).back().text, cfg.digits, ver});
    out.push_back({"tricomi_u(-1,1.5,kappa)", 0.012, 1, fpt::oracle::highprec_tricomi(-1.0, 1.5, 0.012, cfg).text,
                   cfg.digits, ver});

    for (int n = 1; n <= 3; ++n) {
        const auto m = fpt::oracle::highprec_mode(0.012, n, cfg);
        out.push_back({"norm", 0.012, double(n), m.norm.text, cfg.digits, ver});
        out.push_back({"amp", 0.012, double(n), m.amp.text, cfg.digits, ver});
        std::cerr << "mode " << n << " done\n";
    }
    out.push_back({"psi1", 0.012, 5, fpt::oracle::highprec_eigenfunction(0.012, 1, 5.0, cfg).text, cfg.digits, ver});

    {
        const auto m = fpt::oracle::highprec_mode(0.00012, 1, cfg);
        const auto psi = fpt::oracle::highprec_eigenfunction(0.00012, 1, 5.0, cfg);
        out.push_back({"escape_amplitude", 0.00012, 5, text(m.amp.value * psi.value), 15, ver});
    }

    for (double kappa : {0.003, 0.006, 0.012, 0.049}) {
        for (double z : {2.0, 5.0, 10.0, 20.0}) {
            out.push_back({"mfpt_integral", kappa, z, text(fpt::oracle::mfpt_integral(kappa, z, cfg)), 15, ver});
        }
    }

    fpt::oracle::write_fixtures(path, out);
    std::cerr << out.size() << " fixtures written to " << path << '\n';
}
