#include "twowell/hamiltonian.hpp"

#include "twowell/errors.hpp"

namespace twowell {

double pairwise_sum(const double* v, size_t count) {
    if (count <= 8) {
        double s = 0.0;
        for (size_t k = 0; k < count; ++k) s += v[k];
        return s;
    }
    size_t half = count / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, count - half);
}

std::vector<DofClass> default_dof_classes(const LatticeDomain& dom) {
    std::vector<DofClass> cls(size_t(dom.num_with_ghosts()), DofClass::Free);
    for (int32_t id = 0; id < dom.num_with_ghosts(); ++id) {
        switch (dom.role(id)) {
        case NodeRole::LeftBoundary:
        case NodeRole::GhostLeft:
            cls[size_t(id)] = DofClass::Fixed;
            break;
        case NodeRole::RightBoundary:
        case NodeRole::GhostRight:
            cls[size_t(id)] = DofClass::MovesWithC;
            break;
        default:
            break;
        }
    }
    return cls;
}

namespace {

template <class F>
EnergyReport run_report(const Deformation& def, const WellSystem& w, F&& site_value) {
    const LatticeDomain& dom = *def.domain;
    EnergyReport rep;
    rep.n = dom.n();
    int32_t N = dom.num_nodes();
    rep.site_density.resize(size_t(N));
    rep.dist_wells.resize(size_t(N));
    rep.bracket0.resize(size_t(N));
    rep.bracket1.resize(size_t(N));

    std::vector<double> weighted(size_t(N), 0.0);
    double w2 = 1.0 / (double(dom.n()) * dom.n());
    for (int32_t id = 0; id < N; ++id) {
        Stencil s = stencil_at(def, id);
        double h = site_value(s);
        if (h < 0.0)
            throw DomainError("hamiltonian: density returned a negative value");
        rep.site_density[size_t(id)] = h;
        rep.bracket0[size_t(id)] = bracket_u0(s, w);
        rep.bracket1[size_t(id)] = bracket_u1(s, w);
        rep.dist_wells[size_t(id)] = dist_to_wells(node_gradient(def, id), w);
        weighted[size_t(id)] = w2 * h;
    }
    rep.total = pairwise_sum(weighted.data(), weighted.size());
    rep.rescaled = dom.n() * rep.total;
    return rep;
}

} // namespace

EnergyReport hamiltonian(const Deformation& def, const WellSystem& w, Density kind) {
    return run_report(def, w, [&](const Stencil& s) { return density_value(kind, s, w); });
}

EnergyReport hamiltonian(const Deformation& def, const WellSystem& w, const DensityFn& fn) {
    return run_report(def, w, [&](const Stencil& s) { return fn(s, w); });
}

double hamiltonian_total(const Deformation& def, const WellSystem& w, Density kind,
                         double angle_eps) {
    const LatticeDomain& dom = *def.domain;
    int32_t N = dom.num_nodes();
    std::vector<double> weighted(size_t(N), 0.0);
    double w2 = 1.0 / (double(dom.n()) * dom.n());
    for (int32_t id = 0; id < N; ++id)
        weighted[size_t(id)] = w2 * density_value(kind, stencil_at(def, id), w, angle_eps);
    return pairwise_sum(weighted.data(), weighted.size());
}

void energy_gradient_into(const Deformation& def, const WellSystem& w, Density kind,
                          const std::vector<DofClass>& classes, EnergyGradient& out,
                          double angle_eps) {
    const LatticeDomain& dom = *def.domain;
    int32_t N = dom.num_nodes();
    int32_t NG = dom.num_with_ghosts();
    out.d_node.assign(size_t(NG), Eigen::Vector2d::Zero());
    out.d_c.setZero();

    std::vector<double> weighted(size_t(N), 0.0);
    double w2 = 1.0 / (double(dom.n()) * dom.n());
    double scale = 1.0 / dom.n(); // w2 * n, the chain factor of one difference
    for (int32_t id = 0; id < N; ++id) {
        Eigen::Vector2i ij = dom.coord(id);
        Stencil s = stencil_at(def, id);
        DensityGrad g = density_grad(kind, s, w, angle_eps);
        weighted[size_t(id)] = w2 * g.value;

        // entry k = n*(u[to] - u[from])
        const int32_t di[4] = {1, -1, 0, 0};
        const int32_t dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            if (!s.present[size_t(k)]) continue;
            int32_t nb = dom.node_id(ij.x() + di[k], ij.y() + dj[k]);
            bool forward = (k == 0 || k == 2);
            int32_t to = forward ? nb : id;
            int32_t from = forward ? id : nb;
            out.d_node[size_t(to)] += scale * g.d[size_t(k)];
            out.d_node[size_t(from)] -= scale * g.d[size_t(k)];
        }
    }
    out.value = pairwise_sum(weighted.data(), weighted.size());

    for (int32_t id = 0; id < NG; ++id) {
        if (classes[size_t(id)] == DofClass::MovesWithC) {
            out.d_c += out.d_node[size_t(id)];
            out.d_node[size_t(id)].setZero();
        } else if (classes[size_t(id)] == DofClass::Fixed) {
            out.d_node[size_t(id)].setZero();
        }
    }
}

EnergyGradient energy_gradient(const Deformation& def, const WellSystem& w, Density kind,
                               const std::vector<DofClass>& classes) {
    EnergyGradient out;
    energy_gradient_into(def, w, kind, classes, out);
    return out;
}

EnergyGradient energy_gradient(const Deformation& def, const WellSystem& w, Density kind) {
    return energy_gradient(def, w, kind, default_dof_classes(*def.domain));
}

} // namespace twowell
