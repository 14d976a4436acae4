#ifndef TWOWELL_OPTIMIZE_HPP
#define TWOWELL_OPTIMIZE_HPP

#include "twowell/hamiltonian.hpp"
#include "twowell/lattice.hpp"

#include <optional>
#include <vector>

namespace twowell {

enum class Method { GradientDescent, QuasiNewton };

struct MinimizeOptions {
    // Negative values pick the documented defaults: max_iters = 50 n^2,
    // grad_tol = 1e-8 n, step0 = 1e-2 / n^2.
    long max_iters = -1;
    double grad_tol = -1.0;
    double step0 = -1.0;
    double backtrack_factor = 0.5;
    double armijo_c = 1e-4;
    uint64_t seed = 0;
    Method method = Method::QuasiNewton;
    int memory = 8; // secant pairs kept by the quasi-Newton update

    // Optional pre-relaxation stages on the angle-smoothed surrogate energy
    // (descending epsilons), each capped at stage_max_iters. The reported
    // trace and termination always come from the final exact-density stage.
    std::vector<double> smoothing_stages{};
    long stage_max_iters = -1; // default: max_iters
};

// Stage schedule that works well when descending from rough states.
MinimizeOptions relaxation_options(int n, const WellSystem& w);

enum class Termination { Converged, MaxIters, StalledByAdmissibility, Stalled };

struct MinimizeResult {
    Deformation final;
    std::vector<double> energy_trace;
    long iterations = 0;
    Termination termination = Termination::Converged;
    bool admissible = true;
};

// u = F x everywhere, then boundary data F_lambda (+ c = 0).
Deformation init_affine(std::shared_ptr<const LatticeDomain> dom, const WellSystem& w,
                        const Eigen::Matrix2d& F, double lambda);

// Continuous piecewise-affine laminate: gradients[k] on the slab between
// interfaces k-1 and k, interfaces at x.(sign,1) = offsets[k] (so normals
// are (+-1,1)). Consecutive gradients must be rank-one connected across the
// interface; the rank-one defect is reported otherwise. The profile is
// anchored to the left boundary data and, when apply_bc is set, the right
// translation c is derived from the profile so the boundary overwrite is
// continuous. Both endpoints gradients must then be compatible with the
// boundary data.
struct LaminateSpec {
    int sign = +1;
    std::vector<double> offsets;
    std::vector<Eigen::Matrix2d> gradients; // offsets.size() + 1 entries
};

Deformation init_laminate(std::shared_ptr<const LatticeDomain> dom, const WellSystem& w,
                          const LaminateSpec& spec, double lambda, bool apply_bc = true);

// Two-piece limiting profile (one interface through the center).
Deformation init_profile(std::shared_ptr<const LatticeDomain> dom, const WellSystem& w,
                         const Eigen::Matrix2d& V1, const Eigen::Matrix2d& V2, int sign,
                         double lambda, bool apply_bc = true);

// Adds a smooth random bump field of the given amplitude on free nodes,
// resampling (at most 100 times) until the result is admissible.
Deformation init_perturbed(const Deformation& base, double amplitude, uint64_t seed);

// Resamples a deformation onto a finer grid over the same polygon; boundary
// layers are rewritten from the coarse translation. Used for warm starts
// across resolutions.
Deformation prolong(const Deformation& coarse, std::shared_ptr<const LatticeDomain> fine,
                    const WellSystem& w);

// Safeguarded descent over the free nodes and the right translation c:
// steps that break a triangle orientation are halved (up to 60 times)
// before rejection, Armijo backtracking controls acceptance, and the
// quasi-Newton memory restarts after any halving.
MinimizeResult minimize(const Deformation& init, const WellSystem& w, Density kind,
                        const MinimizeOptions& opts,
                        const std::vector<DofClass>* classes = nullptr);

} // namespace twowell

#endif
