#ifndef TWOWELL_ERRORS_HPP
#define TWOWELL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace twowell {

// Invalid parameters / malformed input files. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Valid request that fails on the given data (point outside domain,
// inadmissible state, ...). CLI maps this to exit code 1.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Inconsistent internal state (missing node position, mismatched domains).
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace twowell

#endif
