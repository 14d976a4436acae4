// Command-line frontend: twowell <command> [--key value ...] [--config file]
//
// Commands: wells | energy | minimize | layer | scaling | surface-scaling |
// spin | coarea | rigidity | perturb-grid | verify | calibrate | export.
// Exit codes: 0 success, 1 domain error or failed verification, 2
// configuration error.

#include "twowell/dispatch.hpp"
#include "twowell/errors.hpp"
#include "twowell/runconfig.hpp"

#include <json.hpp>

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        std::cout << "usage: twowell <command> [--key value ...] [--config file]\n  commands:";
        for (const auto& c : twowell::known_commands()) std::cout << " " << c;
        std::cout << "\n";
        return args.empty() ? 2 : 0;
    }
    try {
        twowell::RunConfig cfg = twowell::parse_config(args);
        return twowell::dispatch(cfg, std::cout, std::cerr);
    } catch (const twowell::ConfigError& e) {
        std::cerr << nlohmann::json{{"error", {{"kind", "config"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", {{"kind", "domain"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 1;
    }
}
