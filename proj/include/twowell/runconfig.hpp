#ifndef TWOWELL_RUNCONFIG_HPP
#define TWOWELL_RUNCONFIG_HPP

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace twowell {

// Flat key-value run configuration. Flags mirror file keys one to one and
// win over file values; every field remembers where its value came from.
struct RunConfig {
    std::string command;

    std::string out = "out";
    std::string fixtures;

    double a = 1.4142135623730951;
    double lambda = 0.5;
    int n = 16;
    std::vector<int> n_list;

    double d = 4.0, l = 1.0;
    int sign = +1;
    std::string density = "truncated";

    std::string input;          // deformation file; overrides init
    std::string init = "affine";
    std::string init_f = "flambda";
    std::vector<double> interfaces{0.0};
    int lamsign = +1;
    double amplitude = 0.2;

    uint64_t seed = 1;
    int seeds = 10;
    int restarts = 5;

    long max_iters = -1;
    double grad_tol = -1.0;
    double step0 = -1.0;
    std::string method = "qn";

    double m1 = 1.0, m2 = 1.0;
    std::vector<double> m1_list{1.0, 2.0};
    std::vector<double> m2_list{1.0, 2.0};
    std::string kind = "c_minus";

    double theta = 0.25;
    int chain_length = 50;
    int resolution = 1000;
    std::string mode = "worst";

    std::vector<double> x0{-2.0, 0.0}, y0{0.0, 0.0};
    double alpha = 0.1;
    int samples = 10000;
    double tol = 0.15;
    int layers = 0;

    nlohmann::json echo; // per-field {value, source}
};

// args = argv[1..]; the first non-flag token is the command. `--config
// <path>` loads a key-value file first; remaining flags override it.
// Unknown keys and out-of-range values raise ConfigError naming the key
// or the violated bound.
RunConfig parse_config(const std::vector<std::string>& args);

const std::vector<std::string>& known_commands();

} // namespace twowell

#endif
