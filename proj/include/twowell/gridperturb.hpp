#ifndef TWOWELL_GRIDPERTURB_HPP
#define TWOWELL_GRIDPERTURB_HPP

#include <cstdint>
#include <optional>
#include <vector>

namespace twowell {

// Worst-case bad-set recursion x_m = theta / (1 - x_{m-1}), x_0 = theta.
struct RecursionTrace {
    double theta = 0.0;
    std::vector<double> xs; // x_0 .. x_m
    enum class Status { Converged, Diverged, MaxSteps } status = Status::MaxSteps;
    double limit = 0.0; // defined when converged
};

// Iterates until |x_m - x_{m-1}| <= 1e-12, the value leaves [0,1), or
// m_max steps elapse. A value >= 1 makes the next step meaningless as a
// volume fraction and is flagged as divergence.
RecursionTrace recursion_sequence(double theta, long m_max = 2'000'000);

// Closed-form limit (1 - sqrt(1 - 4 theta)) / 2; empty for theta > 1/4.
std::optional<double> recursion_limit(double theta);

enum class PlacementMode { WorstCase, UniformRandom };

struct ChainTrace {
    double theta = 0.0;
    int resolution = 0;
    std::vector<double> feasible_fraction; // per chain step
    bool bound_ok = true;   // stays >= 1 - limit - 2/resolution (worst case)
    bool falsified = false; // feasible set emptied although theta <= 1/4
};

// Interval-chain selection process: each unit interval is split into
// `resolution` cells, each consecutive pair gets a rigid-pair set of
// measure 1 - theta (adversarial placement following the worst-case
// construction, or uniform random cells), and a cell of the next interval
// survives when it forms a rigid pair with a surviving cell of the current
// one. theta is divided by `neighbor_divisor` to model several neighbors.
ChainTrace simulate_chain_selection(double theta, int chain_length, uint64_t seed, int resolution,
                                    PlacementMode mode, int neighbor_divisor = 1);

} // namespace twowell

#endif
