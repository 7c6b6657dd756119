// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include "fpt/acceptance.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>

int main(int argc, char** argv) {
    fpt::acceptance::Options options;
    for (int i = 1; i < argc; ++i) options.only.push_back(std::atoi(argv[i]));
    const auto cache = fpt::spectral::EigenCache::from_environment();
    if (cache) options.cache = &*cache;

    const auto results = fpt::acceptance::run_all(options, std::cout);
    const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; });
    std::cout << results.size() - failed << " of " << results.size() << " criteria passed\n";
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
