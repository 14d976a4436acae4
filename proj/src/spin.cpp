#include "twowell/spin.hpp"

#include "twowell/errors.hpp"

namespace twowell {

SpinField spin_field(const Deformation& def, const WellSystem& w, const EnergyReport& report) {
    const LatticeDomain& dom = *def.domain;
    if (report.n != dom.n() || int32_t(report.site_density.size()) != dom.num_nodes())
        throw StructuralError("spin_field: report does not match the deformation domain");

    SpinField sf;
    sf.domain = def.domain;
    int32_t N = dom.num_nodes();
    sf.sigma.resize(size_t(N));
    double thresh = w.cbar / 10.0;
    for (int32_t id = 0; id < N; ++id) {
        bool close = report.site_density[size_t(id)] <= thresh &&
                     dist_to_well(node_gradient(def, id), w.U0) <= thresh;
        sf.sigma[size_t(id)] = close ? int8_t(1) : int8_t(-1);
    }

    // enumerate each unordered nearest-neighbor pair once (right and up)
    for (int32_t id = 0; id < N; ++id) {
        Eigen::Vector2i ij = dom.coord(id);
        for (int dir = 0; dir < 2; ++dir) {
            int32_t nb = dom.node_id(ij.x() + (dir == 0 ? 1 : 0), ij.y() + (dir == 0 ? 0 : 1));
            if (nb < 0 || nb >= N) continue; // outside or ghost: no spin there
            if (sf.sigma[size_t(id)] != sf.sigma[size_t(nb)])
                sf.mismatch_edges.push_back({id, nb});
        }
    }
    sf.h_spin = spin_hamiltonian(sf);
    return sf;
}

double spin_hamiltonian(const SpinField& sf) {
    double n = sf.domain->n();
    return 8.0 * double(sf.mismatch_edges.size()) / (n * n);
}

ComparisonRecord comparison_check(const Deformation& def, const WellSystem& w,
                                  double ratio_floor) {
    EnergyReport rep = hamiltonian(def, w, Density::Truncated);
    SpinField sf = spin_field(def, w, rep);

    ComparisonRecord rec;
    rec.h_total = rep.total;
    rec.h_spin = sf.h_spin;
    rec.mismatch_count = int64_t(sf.mismatch_edges.size());

    double floor = w.cbar / 100.0;
    for (const auto& [p, q] : sf.mismatch_edges) {
        int32_t minus = sf.sigma[size_t(p)] < 0 ? p : q;
        double h = rep.site_density[size_t(minus)];
        if (!(h > floor)) {
            rec.edge_mechanism_ok = false;
            rec.offending.push_back({{p, q}, h});
        }
    }

    if (rec.mismatch_count > 0) {
        rec.ratio = rec.h_total / rec.h_spin;
        rec.ratio_ok = ratio_floor <= 0.0 || rec.ratio >= ratio_floor;
    } else {
        rec.ratio = std::numeric_limits<double>::infinity();
        rec.ratio_ok = true;
    }
    return rec;
}

} // namespace twowell
