#include "twowell/density.hpp"

#include "twowell/errors.hpp"

#include <cmath>

namespace twowell {

Stencil stencil_at(const Deformation& def, int32_t id) {
    const LatticeDomain& dom = *def.domain;
    Eigen::Vector2i ij = dom.coord(id);
    double n = dom.n();
    const Eigen::Vector2d& u0 = def.x[size_t(id)];
    Stencil s;

    int32_t nb = dom.node_id(ij.x() + 1, ij.y());
    if (nb >= 0) { s.v[0] = n * (def.x[size_t(nb)] - u0); s.present[0] = true; }
    nb = dom.node_id(ij.x() - 1, ij.y());
    if (nb >= 0) { s.v[1] = n * (u0 - def.x[size_t(nb)]); s.present[1] = true; }
    nb = dom.node_id(ij.x(), ij.y() + 1);
    if (nb >= 0) { s.v[2] = n * (def.x[size_t(nb)] - u0); s.present[2] = true; }
    nb = dom.node_id(ij.x(), ij.y() - 1);
    if (nb >= 0) { s.v[3] = n * (u0 - def.x[size_t(nb)]); s.present[3] = true; }
    return s;
}

double cutoff(double t, double lo, double hi) {
    if (t <= lo) return 1.0;
    if (t >= hi) return 0.0;
    double tau = (t - lo) / (hi - lo);
    return 1.0 - tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
}

double cutoff_derivative(double t, double lo, double hi) {
    if (t <= lo || t >= hi) return 0.0;
    double tau = (t - lo) / (hi - lo);
    return -30.0 * tau * tau * (1.0 - tau) * (1.0 - tau) / (hi - lo);
}

void truncation_interval(const WellSystem& w, double& lo, double& hi) {
    lo = 10.0 * (w.cbar + 1.0);
    hi = 20.0 * (w.cbar + 1.0);
}

void one_well_interval(const WellSystem& w, double& lo, double& hi) {
    double m = std::max(10.0 * w.cbar, 100.0);
    lo = 10.0 * m;
    hi = 20.0 * m;
}

namespace {

inline double sqr(double x) { return x * x; }

// Bracket over a stencil permutation: lengths la on slots (p0,p1), lb on
// (p2,p3), plus sum of |<horizontal, vertical>| over present pairs. The
// angle sum is permutation independent.
struct BracketEval {
    double value = 0.0;
    std::array<Eigen::Vector2d, 4> d{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                                     Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
};

BracketEval bracket_eval(const Stencil& s, double la, double lb, bool swap_roles, bool want_grad,
                         double angle_eps = 0.0) {
    // slot k of the bracket reads stencil entry idx[k]
    const int idx0 = swap_roles ? 2 : 0, idx1 = swap_roles ? 3 : 1;
    const int idx2 = swap_roles ? 0 : 2, idx3 = swap_roles ? 1 : 3;
    const int slots[4] = {idx0, idx1, idx2, idx3};
    const double len2[4] = {la * la, la * la, lb * lb, lb * lb};

    BracketEval out;
    for (int k = 0; k < 4; ++k) {
        int e = slots[k];
        if (!s.present[size_t(e)]) continue;
        double g = s.v[size_t(e)].squaredNorm() - len2[k];
        out.value += sqr(g);
        if (want_grad) out.d[size_t(e)] += 4.0 * g * s.v[size_t(e)];
    }
    // Accumulated as (00 + 11) + (01 + 10) so the value is bitwise invariant
    // under the role swap, matching the exact symmetry of the two brackets.
    double diag_pairs = 0.0, cross_pairs = 0.0;
    for (int h = 0; h < 2; ++h)
        for (int v = 2; v < 4; ++v) {
            if (!s.present[size_t(h)] || !s.present[size_t(v)]) continue;
            double ip = s.v[size_t(h)].dot(s.v[size_t(v)]);
            double eps = angle_eps;
            double mag = eps > 0.0 ? std::sqrt(ip * ip + eps * eps) - eps : std::abs(ip);
            (h == v - 2 ? diag_pairs : cross_pairs) += mag;
            if (want_grad && ip != 0.0) {
                double sg = eps > 0.0 ? ip / std::sqrt(ip * ip + eps * eps)
                                      : (ip > 0.0 ? 1.0 : -1.0);
                out.d[size_t(h)] += sg * s.v[size_t(v)];
                out.d[size_t(v)] += sg * s.v[size_t(h)];
            }
        }
    out.value += diag_pairs + cross_pairs;
    return out;
}

// dist^2(F, SO(2)U0) and its derivative with respect to F.
struct OneWellTail {
    double value = 0.0;
    Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
};

OneWellTail one_well_tail(const Eigen::Matrix2d& F, const WellSystem& w, bool want_grad) {
    OneWellTail out;
    Eigen::Matrix2d M = F * w.U0; // U0 is symmetric
    double sum = signed_singular_sum(M);
    out.value = std::max(F.squaredNorm() + w.U0.squaredNorm() - 2.0 * sum, 0.0);
    if (want_grad) {
        if (sum > 1e-14) {
            Eigen::Matrix2d D;
            D << M(1, 1), -M(1, 0), -M(0, 1), M(0, 0);
            out.d = 2.0 * F - 2.0 / sum * (M + D) * w.U0;
        } else {
            out.d = 2.0 * F;
        }
    }
    return out;
}

} // namespace

Eigen::Matrix2d stencil_matrix(const Stencil& s) {
    Eigen::Matrix2d F;
    if (s.present[0])
        F.col(0) = s.v[0];
    else if (s.present[1])
        F.col(0) = s.v[1];
    else
        throw StructuralError("stencil_matrix: no horizontal entry present");
    if (s.present[2])
        F.col(1) = s.v[2];
    else if (s.present[3])
        F.col(1) = s.v[3];
    else
        throw StructuralError("stencil_matrix: no vertical entry present");
    return F;
}

double stencil_distance_to_well(const Stencil& s, const Eigen::Matrix2d& U) {
    // minimize sum of |p_k - R (U e_k)|^2 over rotations R; the residual is
    // taken componentwise against the optimal rotation so near-zero
    // distances keep full relative accuracy
    Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
    const int col[4] = {0, 0, 1, 1};
    for (int k = 0; k < 4; ++k) {
        if (!s.present[size_t(k)]) continue;
        M += s.v[size_t(k)] * U.col(col[k]).transpose();
    }
    Eigen::Matrix2d R = closest_rotation_factor(M);
    double d2 = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (!s.present[size_t(k)]) continue;
        d2 += (s.v[size_t(k)] - R * U.col(col[k])).squaredNorm();
    }
    return std::sqrt(d2);
}

double stencil_distance_to_wells(const Stencil& s, const WellSystem& w) {
    return std::min(stencil_distance_to_well(s, w.U0), stencil_distance_to_well(s, w.U1));
}

double bracket_u0(const Stencil& s, const WellSystem& w) {
    return bracket_eval(s, w.a, w.b, false, false).value;
}

double bracket_u1(const Stencil& s, const WellSystem& w) {
    return bracket_eval(s, w.a, w.b, true, false).value;
}

double density_tilde(const Stencil& s, const WellSystem& w) {
    return density_value(Density::Tilde, s, w, 0.0);
}

double density_truncated(const Stencil& s, const WellSystem& w) {
    return density_value(Density::Truncated, s, w, 0.0);
}

double density_one_well(const Stencil& s, const WellSystem& w) {
    return density_value(Density::OneWell, s, w, 0.0);
}

double density_value(Density kind, const Stencil& s, const WellSystem& w) {
    return density_value(kind, s, w, 0.0);
}

double density_value(Density kind, const Stencil& s, const WellSystem& w, double angle_eps) {
    if (kind == Density::Tilde)
        return bracket_eval(s, w.a, w.b, false, false, angle_eps).value *
               bracket_eval(s, w.a, w.b, true, false, angle_eps).value;

    if (kind == Density::Truncated) {
        double lo, hi;
        truncation_interval(w, lo, hi);
        double t = s.norm();
        double g = cutoff(t, lo, hi);
        double quad = t * t;
        if (g == 0.0) return quad;
        return g * density_value(Density::Tilde, s, w, angle_eps) + (1.0 - g) * quad;
    }

    double lo, hi;
    one_well_interval(w, lo, hi);
    double t = s.norm();
    double g = cutoff(t, lo, hi);
    double tail = g == 1.0 ? 0.0 : one_well_tail(stencil_matrix(s), w, false).value;
    double head =
        g == 0.0 ? 0.0
                 : std::min(bracket_eval(s, w.a, w.b, false, false, angle_eps).value, w.cbar / 10.0);
    return g * head + (1.0 - g) * tail;
}

DensityGrad density_grad(Density kind, const Stencil& s, const WellSystem& w,
                         double angle_eps) {
    DensityGrad out;

    if (kind == Density::Tilde || kind == Density::Truncated) {
        BracketEval A = bracket_eval(s, w.a, w.b, false, true, angle_eps);
        BracketEval B = bracket_eval(s, w.a, w.b, true, true, angle_eps);
        double tilde = A.value * B.value;
        std::array<Eigen::Vector2d, 4> dtilde{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                                               Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
        for (int k = 0; k < 4; ++k)
            if (s.present[size_t(k)]) dtilde[size_t(k)] = A.value * B.d[size_t(k)] + B.value * A.d[size_t(k)];

        if (kind == Density::Tilde) {
            out.value = tilde;
            out.d = dtilde;
            return out;
        }

        double lo, hi;
        truncation_interval(w, lo, hi);
        double t = s.norm();
        double g = cutoff(t, lo, hi), gp = cutoff_derivative(t, lo, hi);
        double quad = t * t;
        out.value = g * tilde + (1.0 - g) * quad;
        for (int k = 0; k < 4; ++k) {
            if (!s.present[size_t(k)]) continue;
            out.d[size_t(k)] = g * dtilde[size_t(k)] + 2.0 * (1.0 - g) * s.v[size_t(k)];
            if (gp != 0.0 && t > 0.0)
                out.d[size_t(k)] += gp * (tilde - quad) / t * s.v[size_t(k)];
        }
        return out;
    }

    // one-well density
    double lo, hi;
    one_well_interval(w, lo, hi);
    double t = s.norm();
    double g = cutoff(t, lo, hi), gp = cutoff_derivative(t, lo, hi);

    BracketEval A = bracket_eval(s, w.a, w.b, false, true, angle_eps);
    double thresh = w.cbar / 10.0;
    bool head_active = A.value <= thresh; // left branch at the tie
    double head = head_active ? A.value : thresh;

    OneWellTail tail = one_well_tail(stencil_matrix(s), w, true);
    // chain rule of stencil_matrix: column 0 reads entry 0 (fallback 1),
    // column 1 reads entry 2 (fallback 3)
    std::array<Eigen::Vector2d, 4> dtail{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                                         Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
    int c0 = s.present[0] ? 0 : 1, c1 = s.present[2] ? 2 : 3;
    dtail[size_t(c0)] = tail.d.col(0);
    dtail[size_t(c1)] = tail.d.col(1);

    out.value = g * head + (1.0 - g) * tail.value;
    for (int k = 0; k < 4; ++k) {
        if (!s.present[size_t(k)]) continue;
        Eigen::Vector2d dk = Eigen::Vector2d::Zero();
        if (g != 0.0 && head_active) dk += g * A.d[size_t(k)];
        if (g != 1.0) dk += (1.0 - g) * dtail[size_t(k)];
        if (gp != 0.0 && t > 0.0) dk += gp * (head - tail.value) / t * s.v[size_t(k)];
        out.d[size_t(k)] = dk;
    }
    return out;
}

} // namespace twowell
