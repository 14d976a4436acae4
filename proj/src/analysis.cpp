#include "twowell/analysis.hpp"

#include "twowell/errors.hpp"
#include "twowell/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace twowell {

DiscreteGradientField discrete_gradient(const ScalarLatticeField& f) {
    const LatticeDomain& dom = *f.domain;
    int32_t N = dom.num_nodes();
    if (int32_t(f.values.size()) != N)
        throw StructuralError("discrete_gradient: field size does not match domain");
    DiscreteGradientField out;
    out.g.assign(size_t(N), Eigen::Vector2d::Zero());
    out.mask.assign(size_t(N), 0);
    double n = dom.n();
    for (int32_t id = 0; id < N; ++id) {
        Eigen::Vector2i ij = dom.coord(id);
        int32_t r = dom.node_id(ij.x() + 1, ij.y());
        int32_t u = dom.node_id(ij.x(), ij.y() + 1);
        if (r >= 0 && r < N) {
            out.g[size_t(id)].x() = n * (f.values[size_t(r)] - f.values[size_t(id)]);
            out.mask[size_t(id)] |= 1;
        }
        if (u >= 0 && u < N) {
            out.g[size_t(id)].y() = n * (f.values[size_t(u)] - f.values[size_t(id)]);
            out.mask[size_t(id)] |= 2;
        }
    }
    return out;
}

double discrete_gradient_norm(const ScalarLatticeField& f, int32_t id) {
    const LatticeDomain& dom = *f.domain;
    int32_t N = dom.num_nodes();
    Eigen::Vector2i ij = dom.coord(id);
    double n = dom.n(), gx = 0.0, gy = 0.0;
    int32_t r = dom.node_id(ij.x() + 1, ij.y());
    int32_t u = dom.node_id(ij.x(), ij.y() + 1);
    if (r >= 0 && r < N) gx = n * (f.values[size_t(r)] - f.values[size_t(id)]);
    if (u >= 0 && u < N) gy = n * (f.values[size_t(u)] - f.values[size_t(id)]);
    return std::hypot(gx, gy);
}

SecondDiffRecord second_diff_check(const Deformation& def, const EnergyReport& report) {
    const LatticeDomain& dom = *def.domain;
    if (report.n != dom.n() || int32_t(report.site_density.size()) != dom.num_nodes())
        throw StructuralError("second_diff_check: report does not match the deformation");
    SecondDiffRecord rec;
    double n = dom.n();
    int32_t N = dom.num_nodes();

    auto pos = [&](int32_t i, int32_t j) { return dom.node_id(i, j); };
    auto ratio_update = [&](double num, double den, double& slot) {
        if (den > 0.0)
            slot = std::max(slot, num / den);
        else if (num > 1e-9)
            rec.unbounded = true;
    };

    for (int32_t id = 0; id < N; ++id) {
        Eigen::Vector2i ij = dom.coord(id);
        double h = report.site_density[size_t(id)];
        int32_t xr = pos(ij.x() + 1, ij.y()), xl = pos(ij.x() - 1, ij.y());
        int32_t yu = pos(ij.x(), ij.y() + 1), yd = pos(ij.x(), ij.y() - 1);
        const auto& u = def.x;

        if (xr >= 0 && xl >= 0) {
            double d = n * n * (u[size_t(xr)] + u[size_t(xl)] - 2.0 * u[size_t(id)]).norm();
            ratio_update(d, n * std::sqrt(h), rec.max_ratio_h);
        }
        if (yu >= 0 && yd >= 0) {
            double d = n * n * (u[size_t(yu)] + u[size_t(yd)] - 2.0 * u[size_t(id)]).norm();
            ratio_update(d, n * std::sqrt(h), rec.max_ratio_v);
        }
        // mixed difference needs h at (i+1,j) and (i-1,j) as well
        int32_t ur = (xr >= 0 && yu >= 0) ? pos(ij.x() + 1, ij.y() + 1) : -1;
        if (ur >= 0 && xr < N && xl >= 0 && xl < N) {
            double d =
                n * n * (u[size_t(ur)] - u[size_t(yu)] - u[size_t(xr)] + u[size_t(id)]).norm();
            double den = n * (std::sqrt(h) + std::sqrt(report.site_density[size_t(xr)]) +
                              std::sqrt(report.site_density[size_t(xl)]));
            ratio_update(d, den, rec.max_ratio_mixed);
        }
    }
    rec.max_ratio = std::max({rec.max_ratio_h, rec.max_ratio_v, rec.max_ratio_mixed});
    return rec;
}

CoareaRecord coarea_check(const ScalarLatticeField& f, const std::vector<int32_t>& subdomain) {
    const LatticeDomain& dom = *f.domain;
    int32_t N = dom.num_nodes();
    std::vector<int32_t> nodes = subdomain;
    if (nodes.empty()) {
        nodes.resize(size_t(N));
        std::iota(nodes.begin(), nodes.end(), 0);
    }
    std::vector<char> in(size_t(N), 0);
    for (int32_t id : nodes) {
        if (id < 0 || id >= N) throw StructuralError("coarea_check: bad subdomain node id");
        if (f.values[size_t(id)] < 0.0)
            throw DomainError("coarea_check: field must be nonnegative on the subdomain");
        in[size_t(id)] = 1;
    }

    // Edges of the lattice graph restricted to the subdomain. The level-set
    // perimeter integral reduces to sum over edges of |f_p - f_q| / n: the
    // edge lies on the boundary of {f >= t} exactly for t between the two
    // endpoint values.
    double n = dom.n();
    double lhs = 0.0, rhs = 0.0;
    for (int32_t id : nodes) {
        Eigen::Vector2i ij = dom.coord(id);
        double gx = 0.0, gy = 0.0;
        int32_t r = dom.node_id(ij.x() + 1, ij.y());
        int32_t u = dom.node_id(ij.x(), ij.y() + 1);
        if (r >= 0 && r < N && in[size_t(r)]) {
            lhs += std::abs(f.values[size_t(r)] - f.values[size_t(id)]) / n;
            gx = n * (f.values[size_t(r)] - f.values[size_t(id)]);
        }
        if (u >= 0 && u < N && in[size_t(u)]) {
            lhs += std::abs(f.values[size_t(u)] - f.values[size_t(id)]) / n;
            gy = n * (f.values[size_t(u)] - f.values[size_t(id)]);
        }
        rhs += std::hypot(gx, gy) / (n * n);
    }
    CoareaRecord rec{lhs, rhs, 0.0};
    rec.ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    return rec;
}

double RigiditySample::fraction_within(double c) const {
    if (ratios.empty()) return 1.0;
    int64_t good = 0;
    for (double r : ratios)
        if (std::abs(r - 1.0) <= c * mu) ++good;
    return double(good) / double(ratios.size());
}

RigiditySample rigidity_sample(const Deformation& def, const WellSystem& w,
                               const Eigen::Vector2d& x0, const Eigen::Vector2d& y0,
                               double alpha, int samples, uint64_t seed) {
    const LatticeDomain& dom = *def.domain;
    if (!(alpha > 0.0 && alpha < 0.125))
        throw ConfigError("rigidity_sample: alpha must lie in (0, 1/8)");
    double r = (x0 - y0).norm();
    if (!(r > 0.0)) throw ConfigError("rigidity_sample: x0 and y0 must differ");

    // both 2*alpha*r balls must fit inside the domain polygon
    for (const Eigen::Vector2d& ctr : {x0, y0})
        for (int k = 0; k < 16; ++k) {
            double t = 2.0 * M_PI * k / 16.0;
            Eigen::Vector2d p = ctr + 2.0 * alpha * r * Eigen::Vector2d{std::cos(t), std::sin(t)};
            if (!dom.contains_point(p))
                throw DomainError("rigidity_sample: sampling balls leave the domain");
        }

    // hull of the two enlarged balls, evaluated by direct membership
    auto in_hull = [&](const Eigen::Vector2d& p) {
        Eigen::Vector2d d = y0 - x0;
        double t = std::clamp((p - x0).dot(d) / d.squaredNorm(), 0.0, 1.0);
        return (p - (x0 + t * d)).norm() <= 2.0 * alpha * r + 1e-12;
    };

    RigiditySample out;
    double n = dom.n();
    ScalarLatticeField phi{def.domain, std::vector<double>(size_t(dom.num_nodes()))};
    for (int32_t id = 0; id < dom.num_nodes(); ++id)
        phi.values[size_t(id)] = density_one_well(stencil_at(def, id), w);

    double eta = 0.0, mu = 0.0;
    for (int32_t id = 0; id < dom.num_nodes(); ++id) {
        if (!in_hull(dom.point(id))) continue;
        double gphi = discrete_gradient_norm(phi, id);
        eta += (phi.values[size_t(id)] / (r * r) + gphi / r) / (n * n);
        mu += dist_to_wells(node_gradient(def, id), w) / (n * n);
    }
    out.eta = eta;
    out.mu = mu / (r * r);

    Rng rng(seed);
    out.ratios.reserve(size_t(samples));
    for (int k = 0; k < samples; ++k) {
        Eigen::Vector2d x = rng.in_disc(x0, alpha * r);
        Eigen::Vector2d y = rng.in_disc(y0, alpha * r);
        double num = (interpolate(def, x) - interpolate(def, y)).norm();
        double den = (w.U0 * (x - y)).norm();
        out.ratios.push_back(num / den);
    }
    return out;
}

namespace {

// Neighbor triangle across each edge of t; every edge of an up triangle
// borders a down triangle and vice versa.
std::array<TriangleRef, 3> triangle_neighbors(const TriangleRef& t) {
    int8_t o = t.orient;
    return {TriangleRef{int32_t(t.i + o), int32_t(t.j + o), int8_t(-o)},
            TriangleRef{t.i, int32_t(t.j + o), int8_t(-o)},
            TriangleRef{int32_t(t.i + o), t.j, int8_t(-o)}};
}

// Shared edge endpoints (lattice units) between t and its k-th neighbor.
std::pair<Eigen::Vector2i, Eigen::Vector2i> shared_edge(const TriangleRef& t, int k) {
    int o = t.orient;
    Eigen::Vector2i a{t.i, t.j}, b{t.i + o, t.j}, c{t.i, t.j + o};
    if (k == 0) return {b, c}; // hypotenuse
    if (k == 1) return {a, b}; // horizontal leg
    return {a, c};             // vertical leg
}

} // namespace

InterfaceSummary interface_extract(const Deformation& def, const WellSystem& w, double tol) {
    const LatticeDomain& dom = *def.domain;
    InterfaceSummary out;

    auto key = [](const TriangleRef& t) {
        return std::pair<int64_t, int64_t>{t.i, t.j * 2 + (t.orient > 0 ? 1 : 0)};
    };

    // Clear classification at tol gates the diagnostic; the boundary itself
    // is traced on the nearest-well labeling so relaxed transition bands do
    // not disconnect it.
    int64_t classified = 0;
    std::map<std::pair<int64_t, int64_t>, int> labels;
    for (const TriangleRef& t : dom.triangles()) {
        Eigen::Matrix2d G = gradient_on_triangle(def, t);
        double d0 = dist_to_well(G, w.U0), d1 = dist_to_well(G, w.U1);
        if ((d0 < tol && d1 > 2.0 * tol) || (d1 < tol && d0 > 2.0 * tol)) ++classified;
        labels[key(t)] = d0 <= d1 ? 0 : 1;
    }
    out.classified_fraction =
        dom.num_triangles() > 0 ? double(classified) / dom.num_triangles() : 0.0;
    if (out.classified_fraction < 0.5) {
        out.classifiable = false;
        return out;
    }

    // collect label-jump edges
    std::map<std::pair<int64_t, int64_t>, std::vector<size_t>> by_endpoint;
    std::vector<std::pair<Eigen::Vector2i, Eigen::Vector2i>> edges;
    std::map<std::pair<std::pair<int64_t, int64_t>, std::pair<int64_t, int64_t>>, char> seen;
    for (const TriangleRef& t : dom.triangles()) {
        int lab = labels[key(t)];
        auto nbs = triangle_neighbors(t);
        for (int k = 0; k < 3; ++k) {
            auto it = labels.find(key(nbs[size_t(k)]));
            if (it == labels.end() || it->second == lab) continue;
            auto [p, q] = shared_edge(t, k);
            auto pk = std::pair<int64_t, int64_t>{p.x(), p.y()};
            auto qk = std::pair<int64_t, int64_t>{q.x(), q.y()};
            auto ek = pk < qk ? std::pair{pk, qk} : std::pair{qk, pk};
            if (seen.count(ek)) continue;
            seen[ek] = 1;
            by_endpoint[pk].push_back(edges.size());
            by_endpoint[qk].push_back(edges.size());
            edges.push_back({p, q});
        }
    }

    // chain edges into connected components
    std::vector<char> used(edges.size(), 0);
    double n = dom.n();
    for (size_t e0 = 0; e0 < edges.size(); ++e0) {
        if (used[e0]) continue;
        std::vector<size_t> comp;
        std::vector<size_t> stack{e0};
        used[e0] = 1;
        while (!stack.empty()) {
            size_t e = stack.back();
            stack.pop_back();
            comp.push_back(e);
            for (const Eigen::Vector2i& v : {edges[e].first, edges[e].second})
                for (size_t e2 : by_endpoint[{v.x(), v.y()}])
                    if (!used[e2]) {
                        used[e2] = 1;
                        stack.push_back(e2);
                    }
        }
        if (comp.size() < 3) continue; // noise

        InterfaceSegment seg;
        seg.edge_count = int(comp.size());
        Eigen::Vector2d mean = Eigen::Vector2d::Zero();
        std::vector<Eigen::Vector2d> pts;
        for (size_t e : comp) {
            for (const Eigen::Vector2i& v : {edges[e].first, edges[e].second}) {
                Eigen::Vector2d p{v.x() / n, v.y() / n};
                pts.push_back(p);
                mean += p;
            }
        }
        mean /= double(pts.size());
        // principal direction of the point cloud
        Eigen::Matrix2d C = Eigen::Matrix2d::Zero();
        for (const Eigen::Vector2d& p : pts) C += (p - mean) * (p - mean).transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(C);
        Eigen::Vector2d dir = es.eigenvectors().col(1); // largest eigenvalue
        seg.normal = Eigen::Vector2d{-dir.y(), dir.x()}.normalized();
        seg.points = {mean - 0.5 * dir, mean + 0.5 * dir};

        auto line_angle_deg = [&](const Eigen::Vector2d& ref) {
            double c = std::abs(seg.normal.dot(ref.normalized()));
            return std::acos(std::clamp(c, 0.0, 1.0)) * 180.0 / M_PI;
        };
        seg.angle_to_plus = line_angle_deg({1.0, 1.0});
        seg.angle_to_minus = line_angle_deg({1.0, -1.0});
        out.segments.push_back(std::move(seg));
    }
    return out;
}

double second_gradient_budget(const Deformation& def) {
    const LatticeDomain& dom = *def.domain;
    double n = dom.n();
    double total = 0.0;
    for (int32_t id = 0; id < dom.num_nodes(); ++id) {
        Eigen::Vector2i ij = dom.coord(id);
        const auto& u = def.x;
        auto at = [&](int32_t i, int32_t j) { return dom.node_id(i, j); };
        double s2 = 0.0;
        int32_t xr = at(ij.x() + 1, ij.y()), xl = at(ij.x() - 1, ij.y());
        int32_t yu = at(ij.x(), ij.y() + 1), yd = at(ij.x(), ij.y() - 1);
        int32_t ur = at(ij.x() + 1, ij.y() + 1);
        if (xr >= 0 && xl >= 0)
            s2 += (u[size_t(xr)] + u[size_t(xl)] - 2.0 * u[size_t(id)]).squaredNorm();
        if (yu >= 0 && yd >= 0)
            s2 += (u[size_t(yu)] + u[size_t(yd)] - 2.0 * u[size_t(id)]).squaredNorm();
        if (xr >= 0 && yu >= 0 && ur >= 0)
            s2 += (u[size_t(ur)] - u[size_t(yu)] - u[size_t(xr)] + u[size_t(id)]).squaredNorm();
        total += n * n * s2; // (n^2 |.|)^2 * n^-2
    }
    return total;
}

double bulk_mean_distance(const Deformation& def, const WellSystem& w, double tol) {
    const LatticeDomain& dom = *def.domain;
    double sum = 0.0;
    int64_t count = 0;
    for (const TriangleRef& t : dom.triangles()) {
        Eigen::Matrix2d G = gradient_on_triangle(def, t);
        double d0 = dist_to_well(G, w.U0), d1 = dist_to_well(G, w.U1);
        bool clear = (d0 < tol && d1 > 2.0 * tol) || (d1 < tol && d0 > 2.0 * tol);
        if (!clear) continue;
        sum += std::min(d0, d1);
        ++count;
    }
    return count > 0 ? sum / double(count) : std::numeric_limits<double>::infinity();
}

} // namespace twowell
