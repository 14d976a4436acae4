#include "twowell/optimize.hpp"

#include "twowell/errors.hpp"
#include "twowell/rng.hpp"

#include <cmath>
#include <deque>
#include <sstream>

namespace twowell {

namespace {

// The interface coordinate is tau = x1 + sign x2 with gradient (1, sign);
// its level lines run along (sign, -1) (equivalently (1,1) resp. (1,-1) up
// to orientation), matching the two jump-plane normals.
Eigen::Vector2d tau_gradient(int sign) { return {1.0, double(sign)}; }
Eigen::Vector2d lam_tangent(int sign) { return {double(sign), -1.0}; }

// Rank-one defect of a gradient jump across the tau levels: the action on
// the interface direction, which must vanish for a continuous laminate.
double rank_one_defect(const Eigen::Matrix2d& dG, int sign) {
    return (dG * lam_tangent(sign)).norm();
}

} // namespace

Deformation init_affine(std::shared_ptr<const LatticeDomain> dom, const WellSystem& w,
                        const Eigen::Matrix2d& F, double lambda) {
    Deformation def = make_affine(std::move(dom), F);
    apply_boundary(def, w, lambda, Eigen::Vector2d::Zero());
    return def;
}

Deformation init_laminate(std::shared_ptr<const LatticeDomain> dom, const WellSystem& w,
                          const LaminateSpec& spec, double lambda, bool apply_bc) {
    if (spec.sign != +1 && spec.sign != -1)
        throw ConfigError("init_laminate: interface normals must be (+-1,1)");
    if (spec.gradients.size() != spec.offsets.size() + 1)
        throw ConfigError("init_laminate: need one more gradient than interfaces");
    for (size_t k = 0; k + 1 < spec.offsets.size(); ++k)
        if (!(spec.offsets[k] < spec.offsets[k + 1]))
            throw ConfigError("init_laminate: interface offsets must be increasing");

    const int ls = spec.sign;
    std::vector<Eigen::Vector2d> beta(spec.offsets.size());
    for (size_t k = 0; k < spec.offsets.size(); ++k) {
        Eigen::Matrix2d dG = spec.gradients[k + 1] - spec.gradients[k];
        double defect = rank_one_defect(dG, ls);
        if (defect > 1e-9) {
            std::ostringstream msg;
            msg << "init_laminate: gradients across interface " << k
                << " are not rank-one connected for normal (" << ls
                << ",1); defect = " << defect;
            throw ConfigError(msg.str());
        }
        beta[k] = 0.5 * (dG * tau_gradient(ls)); // dG = beta (grad tau)^T
    }

    const ParallelogramShape& sh = dom->shape();
    const int ds = sh.sign;
    Eigen::Matrix2d Fbc = ds > 0 ? w.f_lambda(lambda) : w.f_lambda_minus(lambda);

    // Anchor so the profile matches the left boundary data on the left edge
    // line, then read off the right translation on the right edge line.
    Eigen::Vector2d kappa = Eigen::Vector2d::Zero();
    if (apply_bc) {
        double defect = rank_one_defect(Fbc - spec.gradients.front(), ds);
        if (defect > 1e-9)
            throw ConfigError(
                "init_laminate: first gradient is not compatible with the boundary data "
                "(cannot anchor the profile to the left edge)");
        Eigen::Vector2d xl = sh.center - 0.5 * sh.d * tau_gradient(ds);
        kappa = (Fbc - spec.gradients.front()) * xl;
    }

    auto tau = [&](const Eigen::Vector2d& x) {
        Eigen::Vector2d rel = x - sh.center;
        return ls > 0 ? rel.x() + rel.y() : rel.x() - rel.y();
    };
    auto profile = [&](const Eigen::Vector2d& x) {
        Eigen::Vector2d u = spec.gradients.front() * x + kappa;
        double t = tau(x);
        for (size_t k = 0; k < spec.offsets.size(); ++k)
            if (t > spec.offsets[k]) u += (t - spec.offsets[k]) * beta[k];
        return u;
    };

    Deformation def;
    def.domain = dom;
    def.lambda = lambda;
    def.x.resize(size_t(dom->num_with_ghosts()));
    for (int32_t id = 0; id < dom->num_with_ghosts(); ++id)
        def.x[size_t(id)] = profile(dom->point(id));

    if (apply_bc) {
        double defect = rank_one_defect(spec.gradients.back() - Fbc, ds);
        if (defect > 1e-9)
            throw ConfigError(
                "init_laminate: last gradient is not compatible with the boundary data");
        Eigen::Vector2d xr = sh.center + 0.5 * sh.d * tau_gradient(ds);
        Eigen::Vector2d c = profile(xr) - Fbc * xr;
        apply_boundary(def, w, lambda, c);
    }
    return def;
}

Deformation init_profile(std::shared_ptr<const LatticeDomain> dom, const WellSystem& w,
                         const Eigen::Matrix2d& V1, const Eigen::Matrix2d& V2, int sign,
                         double lambda, bool apply_bc) {
    LaminateSpec spec;
    spec.sign = sign;
    spec.offsets = {0.0};
    spec.gradients = {V1, V2};
    return init_laminate(std::move(dom), w, spec, lambda, apply_bc);
}

Deformation init_perturbed(const Deformation& base, double amplitude, uint64_t seed) {
    const LatticeDomain& dom = *base.domain;
    const ParallelogramShape& sh = dom.shape();
    const int attempts_max = 100;

    for (int attempt = 0; attempt < attempts_max; ++attempt) {
        Rng rng(seed + uint64_t(attempt) * 1000003ULL);
        const int K = 8;
        struct Bump {
            Eigen::Vector2d center, dir;
            double width, amp;
        };
        std::vector<Bump> bumps(K);
        double ext = sh.d + sh.l;
        for (Bump& b : bumps) {
            // centers inside the polygon keep the normalized tails shallow
            do {
                b.center =
                    sh.center + Eigen::Vector2d{rng.uniform(-ext, ext), rng.uniform(-sh.l, sh.l)};
            } while (!dom.contains_point(b.center));
            b.dir = rng.unit_vector();
            b.width = rng.uniform(0.4, std::max(0.8, sh.l));
            b.amp = rng.uniform(0.5, 1.0);
        }
        auto field = [&](const Eigen::Vector2d& p) {
            Eigen::Vector2d v = Eigen::Vector2d::Zero();
            for (const Bump& b : bumps)
                v += b.amp * std::exp(-(p - b.center).squaredNorm() / (2.0 * b.width * b.width)) *
                     b.dir;
            return v;
        };

        double peak = 0.0;
        for (int32_t id = 0; id < dom.num_with_ghosts(); ++id)
            peak = std::max(peak, field(dom.point(id)).norm());
        if (peak <= 0.0) continue;
        double scale = amplitude / peak;

        Deformation out = base;
        std::vector<DofClass> cls = default_dof_classes(dom);
        for (int32_t id = 0; id < dom.num_with_ghosts(); ++id)
            if (cls[size_t(id)] == DofClass::Free)
                out.x[size_t(id)] += scale * field(dom.point(id));
        if (is_admissible(out)) return out;
    }
    throw DomainError("init_perturbed: no admissible perturbation found in 100 attempts");
}

namespace {

MinimizeResult minimize_core(const Deformation& init, const WellSystem& w, Density kind,
                             const MinimizeOptions& opts, const std::vector<DofClass>* classes_in,
                             double angle_eps) {
    const LatticeDomain& dom = *init.domain;
    const int n = dom.n();
    const long max_iters = opts.max_iters >= 0 ? opts.max_iters : long(50) * n * n;
    const double grad_tol = opts.grad_tol >= 0.0 ? opts.grad_tol : 1e-8 * n;
    const double step0 = opts.step0 >= 0.0 ? opts.step0 : 1e-2 / (double(n) * n);

    if (!is_admissible(init))
        throw DomainError("minimize: initial deformation is not admissible");

    std::vector<DofClass> classes = classes_in ? *classes_in : default_dof_classes(dom);
    if (int32_t(classes.size()) != dom.num_with_ghosts())
        throw StructuralError("minimize: dof class vector does not match the domain");

    std::vector<int32_t> free_ids, cnodes;
    for (int32_t id = 0; id < dom.num_with_ghosts(); ++id) {
        if (classes[size_t(id)] == DofClass::Free) free_ids.push_back(id);
        else if (classes[size_t(id)] == DofClass::MovesWithC) cnodes.push_back(id);
    }
    const size_t dim = 2 * free_ids.size() + 2;

    MinimizeResult res;
    res.final = init;
    Deformation& cur = res.final;

    // anchors reproduce the attached nodes exactly from c at every iterate
    std::vector<Eigen::Vector2d> anchor(cnodes.size());
    for (size_t k = 0; k < cnodes.size(); ++k)
        anchor[k] = cur.x[size_t(cnodes[k])] - cur.c;

    std::vector<double> base(dim), trial_dir(dim), g(dim), gprev(dim);
    auto pack_state = [&] {
        for (size_t k = 0; k < free_ids.size(); ++k) {
            base[2 * k] = cur.x[size_t(free_ids[k])].x();
            base[2 * k + 1] = cur.x[size_t(free_ids[k])].y();
        }
        base[dim - 2] = cur.c.x();
        base[dim - 1] = cur.c.y();
    };
    auto set_state = [&](double alpha, const std::vector<double>& p) {
        for (size_t k = 0; k < free_ids.size(); ++k)
            cur.x[size_t(free_ids[k])] = {base[2 * k] + alpha * p[2 * k],
                                          base[2 * k + 1] + alpha * p[2 * k + 1]};
        cur.c = {base[dim - 2] + alpha * p[dim - 2], base[dim - 1] + alpha * p[dim - 1]};
        for (size_t k = 0; k < cnodes.size(); ++k)
            cur.x[size_t(cnodes[k])] = anchor[k] + cur.c;
    };

    EnergyGradient eg;
    auto eval_grad = [&](std::vector<double>& out) {
        energy_gradient_into(cur, w, kind, classes, eg, angle_eps);
        for (size_t k = 0; k < free_ids.size(); ++k) {
            out[2 * k] = eg.d_node[size_t(free_ids[k])].x();
            out[2 * k + 1] = eg.d_node[size_t(free_ids[k])].y();
        }
        out[dim - 2] = eg.d_c.x();
        out[dim - 1] = eg.d_c.y();
        return eg.value;
    };
    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
        return s;
    };

    double E = eval_grad(g);
    res.energy_trace.push_back(E);
    if (!std::isfinite(E)) throw DomainError("minimize: non-finite initial energy");

    std::deque<std::pair<std::vector<double>, std::vector<double>>> mem; // (s, y)
    double last_alpha = step0;
    res.termination = Termination::MaxIters;

    for (long iter = 0; iter < max_iters; ++iter) {
        if (inf_norm(g) <= grad_tol) {
            res.termination = Termination::Converged;
            res.iterations = iter;
            break;
        }

        // search direction
        std::vector<double> p(dim);
        if (opts.method == Method::QuasiNewton && !mem.empty()) {
            // limited-memory two-loop recursion
            p = g;
            std::vector<double> alpha_mem(mem.size());
            for (size_t k = mem.size(); k-- > 0;) {
                const auto& [s, y] = mem[k];
                double rho = 1.0 / dot(y, s);
                alpha_mem[k] = rho * dot(s, p);
                for (size_t t = 0; t < dim; ++t) p[t] -= alpha_mem[k] * y[t];
            }
            const auto& [sl, yl] = mem.back();
            double gamma = dot(sl, yl) / dot(yl, yl);
            for (size_t t = 0; t < dim; ++t) p[t] *= gamma;
            for (size_t k = 0; k < mem.size(); ++k) {
                const auto& [s, y] = mem[k];
                double rho = 1.0 / dot(y, s);
                double betaq = rho * dot(y, p);
                for (size_t t = 0; t < dim; ++t) p[t] += (alpha_mem[k] - betaq) * s[t];
            }
            for (double& x : p) x = -x;
        } else {
            for (size_t t = 0; t < dim; ++t) p[t] = -g[t];
        }

        double gp = dot(g, p);
        if (!(gp < 0.0)) { // not a descent direction; fall back to steepest descent
            for (size_t t = 0; t < dim; ++t) p[t] = -g[t];
            gp = dot(g, p);
            mem.clear();
        }

        pack_state();
        double alpha = (opts.method == Method::QuasiNewton && !mem.empty())
                           ? 1.0
                           : std::max(step0, 2.0 * last_alpha);
        int halvings = 0;
        bool accepted = false, admissibility_fail = false;
        for (int trial = 0; trial < 150; ++trial) {
            set_state(alpha, p);
            if (!is_admissible(cur)) {
                if (++halvings > 60) {
                    admissibility_fail = true;
                    break;
                }
                alpha *= 0.5;
                continue;
            }
            double Et = hamiltonian_total(cur, w, kind, angle_eps);
            if (!std::isfinite(Et)) throw DomainError("minimize: non-finite energy encountered");
            if (Et <= E + opts.armijo_c * alpha * gp) {
                accepted = true;
                E = Et;
                break;
            }
            alpha *= opts.backtrack_factor;
            if (alpha < 1e-20) break;
        }

        if (!accepted) {
            set_state(0.0, p); // restore
            res.termination =
                admissibility_fail ? Termination::StalledByAdmissibility : Termination::Stalled;
            res.iterations = iter;
            break;
        }

        res.energy_trace.push_back(E);
        last_alpha = alpha;
        gprev.swap(g);
        eval_grad(g);

        if (opts.method == Method::QuasiNewton) {
            if (halvings > 0) {
                mem.clear(); // halving invalidates the curvature pairs
            } else {
                std::vector<double> s(dim), y(dim);
                for (size_t t = 0; t < dim; ++t) {
                    s[t] = alpha * p[t];
                    y[t] = g[t] - gprev[t];
                }
                double sy = dot(s, y);
                if (sy > 1e-14 * std::sqrt(dot(s, s)) * std::sqrt(dot(y, y))) {
                    mem.push_back({std::move(s), std::move(y)});
                    if (int(mem.size()) > opts.memory) mem.pop_front();
                }
            }
        }
        res.iterations = iter + 1;
    }

    if (res.termination == Termination::MaxIters) res.iterations = max_iters;
    res.admissible = is_admissible(res.final);
    return res;
}

} // namespace

Deformation prolong(const Deformation& coarse, std::shared_ptr<const LatticeDomain> fine,
                    const WellSystem& w) {
    Deformation out;
    out.domain = fine;
    out.lambda = coarse.lambda;
    out.c = coarse.c;
    out.x.resize(size_t(fine->num_with_ghosts()));
    for (int32_t id = 0; id < fine->num_with_ghosts(); ++id) {
        Eigen::Vector2d p = fine->point(id);
        if (coarse.domain->contains_point(p))
            out.x[size_t(id)] = interpolate(coarse, p);
        else
            out.x[size_t(id)] = p; // ghost, overwritten below
    }
    apply_boundary(out, w, coarse.lambda, coarse.c);
    return out;
}

MinimizeResult minimize(const Deformation& init, const WellSystem& w, Density kind,
                        const MinimizeOptions& opts, const std::vector<DofClass>* classes_in) {
    Deformation cur = init;
    if (!opts.smoothing_stages.empty()) {
        MinimizeOptions stage = opts;
        stage.smoothing_stages.clear();
        stage.max_iters = opts.stage_max_iters >= 0 ? opts.stage_max_iters : opts.max_iters;
        stage.grad_tol = (opts.grad_tol >= 0.0 ? opts.grad_tol : 1e-8 * init.domain->n()) * 100.0;
        for (double eps : opts.smoothing_stages)
            cur = minimize_core(cur, w, kind, stage, classes_in, eps).final;
    }
    return minimize_core(cur, w, kind, opts, classes_in, 0.0);
}

MinimizeOptions relaxation_options(int n, const WellSystem& w) {
    MinimizeOptions o;
    o.smoothing_stages = {0.5 * (w.cbar + 0.1), 0.05 * (w.cbar + 0.1)};
    o.stage_max_iters = 1200;
    o.max_iters = 1500;
    o.grad_tol = 1e-6 * n;
    return o;
}

} // namespace twowell
