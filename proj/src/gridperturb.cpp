#include "twowell/gridperturb.hpp"

#include "twowell/errors.hpp"
#include "twowell/rng.hpp"

#include <cmath>

namespace twowell {

RecursionTrace recursion_sequence(double theta, long m_max) {
    if (!(theta >= 0.0 && theta < 1.0))
        throw ConfigError("recursion_sequence: theta must lie in [0,1)");
    if (m_max < 1) throw ConfigError("recursion_sequence: m_max must be positive");

    RecursionTrace tr;
    tr.theta = theta;
    tr.xs.push_back(theta);
    for (long m = 1; m <= m_max; ++m) {
        double prev = tr.xs.back();
        if (prev >= 1.0) {
            tr.status = RecursionTrace::Status::Diverged;
            return tr;
        }
        double x = theta / (1.0 - prev);
        tr.xs.push_back(x);
        if (x >= 1.0) {
            tr.status = RecursionTrace::Status::Diverged;
            return tr;
        }
        if (std::abs(x - prev) <= 1e-12) {
            tr.status = RecursionTrace::Status::Converged;
            tr.limit = x;
            return tr;
        }
    }
    tr.status = RecursionTrace::Status::MaxSteps;
    return tr;
}

std::optional<double> recursion_limit(double theta) {
    if (!(theta >= 0.0 && theta < 1.0))
        throw ConfigError("recursion_limit: theta must lie in [0,1)");
    if (theta > 0.25) return std::nullopt;
    return 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * theta));
}

ChainTrace simulate_chain_selection(double theta, int chain_length, uint64_t seed, int resolution,
                                    PlacementMode mode, int neighbor_divisor) {
    if (!(theta > 0.0 && theta <= 0.25))
        throw ConfigError("simulate_chain_selection: theta must lie in (0, 1/4]");
    if (resolution < 1000)
        throw ConfigError("simulate_chain_selection: resolution must be at least 1000");
    if (chain_length < 1 || neighbor_divisor < 1)
        throw ConfigError("simulate_chain_selection: bad chain length or neighbor divisor");

    double th = theta / neighbor_divisor;
    const size_t R = size_t(resolution);
    ChainTrace tr;
    tr.theta = theta;
    tr.resolution = resolution;

    std::vector<char> good(R, 1), next(R);
    std::vector<char> rigid(R * R); // rigid[x*R + y]
    Rng rng(seed);
    const long budget = std::lround(th * double(R) * double(R)); // non-rigid cells per pair

    double limit = recursion_limit(theta).value();
    double tol = 2.0 / resolution;

    for (int step = 1; step <= chain_length; ++step) {
        std::fill(rigid.begin(), rigid.end(), char(1));
        size_t good_count = size_t(std::count(good.begin(), good.end(), char(1)));

        if (mode == PlacementMode::WorstCase) {
            // Adversary: bad cells of I_m pair with everything; the non-rigid
            // budget is stacked over the surviving columns against an initial
            // slab of I_{m+1}, deleting the widest possible slab.
            if (good_count > 0) {
                size_t slab = size_t(std::min<long>(budget / long(good_count), long(R)));
                for (size_t x = 0; x < R; ++x) {
                    if (!good[x]) continue;
                    for (size_t y = 0; y < slab; ++y) rigid[x * R + y] = 0;
                }
            }
        } else {
            // uniform random placement of the non-rigid cells, sampled
            // without replacement
            long placed = 0;
            while (placed < budget) {
                size_t cell = size_t(rng.integer(uint64_t(R * R)));
                if (rigid[cell]) {
                    rigid[cell] = 0;
                    ++placed;
                }
            }
        }

        // possible choices in the next interval: cells with a surviving
        // rigid partner
        std::fill(next.begin(), next.end(), char(0));
        for (size_t x = 0; x < R; ++x) {
            if (!good[x]) continue;
            const char* row = rigid.data() + x * R;
            for (size_t y = 0; y < R; ++y)
                if (row[y]) next[y] = 1;
        }
        good.swap(next);

        size_t alive = size_t(std::count(good.begin(), good.end(), char(1)));
        double frac = double(alive) / double(R);
        tr.feasible_fraction.push_back(frac);
        if (alive == 0) {
            tr.falsified = true; // contradicts the positivity guarantee
            tr.bound_ok = false;
            return tr;
        }
        if (frac < 1.0 - limit - tol) tr.bound_ok = false;
    }
    return tr;
}

} // namespace twowell
