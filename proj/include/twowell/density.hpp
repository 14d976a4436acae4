#ifndef TWOWELL_DENSITY_HPP
#define TWOWELL_DENSITY_HPP

#include "twowell/lattice.hpp"
#include "twowell/wells.hpp"

#include <Eigen/Dense>
#include <array>

namespace twowell {

// Stencil entry order: d1 = horizontal forward difference at (i,j),
// d1m = horizontal at (i-1,j), d2 = vertical at (i,j), d2m = vertical at
// (i,j-1). Entries whose neighbor is missing (free lateral side) are masked
// and excluded from every sum.
struct Stencil {
    // Eigen vectors do not zero-initialize on value construction.
    std::array<Eigen::Vector2d, 4> v{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                                     Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
    std::array<bool, 4> present{false, false, false, false};

    double squared_norm() const {
        double s = 0.0;
        for (int k = 0; k < 4; ++k)
            if (present[k]) s += v[k].squaredNorm();
        return s;
    }
    double norm() const { return std::sqrt(squared_norm()); }
};

// Gathers the four difference vectors at a domain node, ghosts included.
Stencil stencil_at(const Deformation& def, int32_t id);

enum class Density { Tilde, Truncated, OneWell };

// Bracket with well lengths (a,a,b,b) on (d1,d1m,d2,d2m) plus the four
// absolute inner products between horizontal and vertical entries; vanishes
// exactly on stencils drawn from SO(2)U0.
double bracket_u0(const Stencil& s, const WellSystem& w);
// Role-swapped bracket: bracket_u0(d2,d2m,d1,d1m).
double bracket_u1(const Stencil& s, const WellSystem& w);

double density_tilde(const Stencil& s, const WellSystem& w);
double density_truncated(const Stencil& s, const WellSystem& w);
double density_one_well(const Stencil& s, const WellSystem& w);
double density_value(Density kind, const Stencil& s, const WellSystem& w);

// Smoothed variant used by the solver homotopy: the absolute values of the
// angle terms are replaced by sqrt(t^2 + eps^2) - eps. eps = 0 is the exact
// density.
double density_value(Density kind, const Stencil& s, const WellSystem& w, double angle_eps);

// Value plus derivative with respect to each stencil entry (zero where
// masked). Kinks use a fixed subgradient convention: 0 for |.| at 0, the
// left branch at the min tie.
struct DensityGrad {
    double value = 0.0;
    std::array<Eigen::Vector2d, 4> d{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                                     Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
};

DensityGrad density_grad(Density kind, const Stencil& s, const WellSystem& w,
                         double angle_eps = 0.0);

// C^2 quintic step from 1 (t <= lo) to 0 (t >= hi).
double cutoff(double t, double lo, double hi);
double cutoff_derivative(double t, double lo, double hi);

// Cutoff interval of the truncated density: [10(cbar+1), 20(cbar+1)].
void truncation_interval(const WellSystem& w, double& lo, double& hi);
// Cutoff interval of the one-well density: [10 m, 20 m], m = max(10 cbar, 100).
void one_well_interval(const WellSystem& w, double& lo, double& hi);

// Deformation gradient represented by a stencil: columns d1 and d2, falling
// back to the backward entries where masked.
Eigen::Matrix2d stencil_matrix(const Stencil& s);

// Distance of the whole stencil to the rigid well states (all horizontal
// entries equal to one rotated well column, vertical entries to the other).
// The density is comparable to the square of this quantity from both sides;
// the node-gradient distance only bounds it from below.
double stencil_distance_to_well(const Stencil& s, const Eigen::Matrix2d& U);
double stencil_distance_to_wells(const Stencil& s, const WellSystem& w);

} // namespace twowell

#endif
