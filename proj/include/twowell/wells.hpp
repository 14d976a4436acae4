#ifndef TWOWELL_WELLS_HPP
#define TWOWELL_WELLS_HPP

#include <Eigen/Dense>

namespace twowell {

// The two martensite variants U0 = diag(a,b), U1 = diag(b,a) with ab = 1,
// the rotations Q, Qtilde realizing the two rank-one connections between
// SO(2)U0 and SO(2)U1 (jump normals (1,1)/sqrt2 and (1,-1)/sqrt2), and the
// well separation cbar = dist(SO(2)U0, SO(2)U1).
struct WellSystem {
    double a = 0.0;
    double b = 0.0;
    double cbar = 0.0;
    Eigen::Matrix2d U0, U1, Q, Qtilde;

    // Convex combination along the (1,1)-normal connection.
    Eigen::Matrix2d f_lambda(double lambda) const { return lambda * U0 + (1.0 - lambda) * Q * U1; }
    // Mirror combination along the (1,-1)-normal connection.
    Eigen::Matrix2d f_lambda_minus(double lambda) const { return lambda * U0 + (1.0 - lambda) * Qtilde * U1; }
};

// Builds the well system for stretch a (b = 1/a). Rejects a <= 0 and the
// degenerate case a = 1.
WellSystem make_wells(double a);

Eigen::Matrix2d rotation(double theta);

// min over R in SO(2) of |F - R|_F, via the signed singular value form.
double dist_to_rotations(const Eigen::Matrix2d& F);

// min over R in SO(2) of |F - R U|_F. U must be invertible.
double dist_to_well(const Eigen::Matrix2d& F, const Eigen::Matrix2d& U);

// Distance to the union of the two wells.
double dist_to_wells(const Eigen::Matrix2d& F, const WellSystem& w);

// sigma1 + sigma2 when det M >= 0, sigma1 - sigma2 otherwise.
double signed_singular_sum(const Eigen::Matrix2d& M);

// The rotation maximizing the trace pairing <R, M> over SO(2).
Eigen::Matrix2d closest_rotation_factor(const Eigen::Matrix2d& M);

} // namespace twowell

#endif
