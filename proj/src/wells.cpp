#include "twowell/wells.hpp"

#include "twowell/errors.hpp"

#include <cmath>

namespace twowell {

Eigen::Matrix2d rotation(double theta) {
    Eigen::Matrix2d R;
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return R;
}

double signed_singular_sum(const Eigen::Matrix2d& M) {
    // (s1+s2)^2 = |M|^2 + 2 det M and (s1-s2)^2 = |M|^2 - 2|det M|, so the
    // single expression below covers both signs of the determinant.
    double t = M.squaredNorm() + 2.0 * M.determinant();
    return std::sqrt(std::max(t, 0.0));
}

// The rotation maximizing <R, M>; residuals against it stay fully accurate
// near zero distance because the subtraction happens componentwise.
Eigen::Matrix2d closest_rotation_factor(const Eigen::Matrix2d& M) {
    double alpha = M(0, 0) + M(1, 1), beta = M(1, 0) - M(0, 1);
    double rho = std::hypot(alpha, beta);
    if (rho < 1e-300) return Eigen::Matrix2d::Identity();
    Eigen::Matrix2d R;
    R << alpha / rho, -beta / rho, beta / rho, alpha / rho;
    return R;
}

double dist_to_rotations(const Eigen::Matrix2d& F) {
    return (F - closest_rotation_factor(F)).norm();
}

double dist_to_well(const Eigen::Matrix2d& F, const Eigen::Matrix2d& U) {
    if (std::abs(U.determinant()) < 1e-14)
        throw ConfigError("dist_to_well: singular well matrix");
    // min_R |F - RU| attained at the rotation closest to F U^T in the trace
    // pairing (equivalently, the signed singular sum of F U^T).
    return (F - closest_rotation_factor(F * U.transpose()) * U).norm();
}

double dist_to_wells(const Eigen::Matrix2d& F, const WellSystem& w) {
    return std::min(dist_to_well(F, w.U0), dist_to_well(F, w.U1));
}

WellSystem make_wells(double a) {
    if (!(a > 0.0))
        throw ConfigError("make_wells: a must be positive");
    if (a == 1.0)
        throw ConfigError("make_wells: a = 1 gives coinciding wells");
    WellSystem w;
    w.a = a;
    w.b = 1.0 / a;
    w.U0 << a, 0.0, 0.0, w.b;
    w.U1 << w.b, 0.0, 0.0, a;

    // Solve U0 - Q U1 = rho (a,-b)^T (1,1) for Q, and the mirror connection
    // U0 - Qt U1 = rho (a,b)^T (1,-1) for Qtilde.
    double rho = (a * a - w.b * w.b) / (a * a + w.b * w.b);
    Eigen::Matrix2d N, Nt;
    N << rho * a, rho * a, -rho * w.b, -rho * w.b;
    Nt << rho * a, -rho * a, rho * w.b, -rho * w.b;
    w.Q = (w.U0 - N) * w.U1.inverse();
    w.Qtilde = (w.U0 - Nt) * w.U1.inverse();

    for (const Eigen::Matrix2d& R : {w.Q, w.Qtilde}) {
        if ((R.transpose() * R - Eigen::Matrix2d::Identity()).norm() > 1e-10 ||
            std::abs(R.determinant() - 1.0) > 1e-10)
            throw StructuralError("make_wells: recovered rotation is not in SO(2)");
    }

    // dist(SO(2)U0, SO(2)U1): |U0 - R(t)U1|^2 = 2a^2 + 2b^2 - 4ab cos t is
    // minimal at t = 0, giving 2(a-b)^2.
    w.cbar = std::sqrt(2.0) * std::abs(a - w.b);
    return w;
}

} // namespace twowell
