#ifndef TWOWELL_VERIFY_HPP
#define TWOWELL_VERIFY_HPP

#include "twowell/fixtures.hpp"

#include <string>
#include <vector>

namespace twowell {

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    int configs = 200;           // random deformations across the n list
    std::vector<int> n_list{8, 16};
    uint64_t seed = 2024;
    bool with_chain = true;      // include the interval-chain simulation
};

// Runs the inequality suites against the fixture constants: pointwise lower
// bound, two-sided bound, second-difference control, coarea inequality,
// spin edge mechanism / comparison ratio / phase perimeter, the plugin
// density contract, and the worst-case chain bound.
std::vector<SuiteResult> run_verify_suites(const WellSystem& w, const Fixtures& fx,
                                           const VerifyOptions& opts);

} // namespace twowell

#endif
