#include "twowell/lattice.hpp"

#include "twowell/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace twowell {

namespace {

bool nearly_integer(double v, double tol = 1e-9) { return std::abs(v - std::llround(v)) <= tol; }

// Closed membership test in lattice index units (i = n x1, j = n x2).
bool inside_shape(const ParallelogramShape& s, int n, int64_t i, int64_t j) {
    int64_t ci = std::llround(s.center.x() * n);
    int64_t cj = std::llround(s.center.y() * n);
    int64_t X = i - ci, Y = j - cj;
    int64_t dn = std::llround(s.d * n), ln = std::llround(s.l * n);
    int64_t t = s.sign > 0 ? X + Y : X - Y;
    return std::llabs(t) <= dn && std::llabs(Y) <= ln;
}

} // namespace

bool LatticeDomain::contains_point(const Eigen::Vector2d& x, double tol) const {
    double X = x.x() - shape_.center.x(), Y = x.y() - shape_.center.y();
    double t = shape_.sign > 0 ? X + Y : X - Y;
    return std::abs(t) <= shape_.d + tol && std::abs(Y) <= shape_.l + tol;
}

LatticeDomain build_domain(double d, double l, int sign, int n, Eigen::Vector2d center) {
    if (d <= 0.0 || l <= 0.0)
        throw ConfigError("build_domain: degenerate shape, d and l must be positive");
    if (n < 2)
        throw ConfigError("build_domain: resolution n must be at least 2");
    if (sign != +1 && sign != -1)
        throw ConfigError("build_domain: sign must be +1 or -1");
    if (!nearly_integer(d * n) || !nearly_integer(l * n))
        throw ConfigError("build_domain: n*d and n*l must be integers");
    if (!nearly_integer(center.x() * n) || !nearly_integer(center.y() * n))
        throw ConfigError("build_domain: n*center must be lattice-aligned");

    LatticeDomain dom;
    dom.n_ = n;
    dom.shape_ = ParallelogramShape{d, l, sign, center};

    int64_t ci = std::llround(center.x() * n), cj = std::llround(center.y() * n);
    int64_t dn = std::llround(d * n), ln = std::llround(l * n);
    // Bounding box with one extra ring for the ghost diagonals.
    dom.imin_ = int32_t(ci - dn - ln - 1);
    dom.imax_ = int32_t(ci + dn + ln + 1);
    dom.jmin_ = int32_t(cj - ln - 1);
    dom.jmax_ = int32_t(cj + ln + 1);
    size_t W = size_t(dom.imax_ - dom.imin_ + 1), H = size_t(dom.jmax_ - dom.jmin_ + 1);
    dom.grid_.assign(W * H, -1);

    auto put = [&](int32_t i, int32_t j, NodeRole role) {
        size_t cell = size_t(j - dom.jmin_) * W + size_t(i - dom.imin_);
        if (dom.grid_[cell] >= 0) return;
        dom.grid_[cell] = int32_t(dom.coords_.size());
        dom.coords_.push_back({i, j});
        dom.roles_.push_back(role);
    };

    for (int32_t j = int32_t(cj - ln); j <= int32_t(cj + ln); ++j)
        for (int32_t i = dom.imin_; i <= dom.imax_; ++i) {
            if (!inside_shape(dom.shape_, n, i, j)) continue;
            int64_t t = dom.diag(i, j);
            NodeRole role = NodeRole::Interior;
            if (t <= -dn)
                role = NodeRole::LeftBoundary;
            else if (t >= dn)
                role = NodeRole::RightBoundary;
            else if (std::llabs(j - cj) == ln)
                role = NodeRole::LateralFree;
            put(i, j, role);
        }
    dom.num_domain_nodes_ = int32_t(dom.coords_.size());

    // One ghost diagonal beyond each boundary side: the outward neighbors of
    // the boundary-layer nodes (the stencil reaches exactly one layer out).
    for (int32_t id = 0; id < dom.num_domain_nodes_; ++id) {
        auto [i, j] = std::pair{dom.coords_[size_t(id)].x(), dom.coords_[size_t(id)].y()};
        if (dom.roles_[size_t(id)] == NodeRole::LeftBoundary) {
            if (sign > 0) {
                put(i - 1, j, NodeRole::GhostLeft);
                put(i, j - 1, NodeRole::GhostLeft);
            } else {
                put(i - 1, j, NodeRole::GhostLeft);
                put(i, j + 1, NodeRole::GhostLeft);
            }
        } else if (dom.roles_[size_t(id)] == NodeRole::RightBoundary) {
            if (sign > 0) {
                put(i + 1, j, NodeRole::GhostRight);
                put(i, j + 1, NodeRole::GhostRight);
            } else {
                put(i + 1, j, NodeRole::GhostRight);
                put(i, j - 1, NodeRole::GhostRight);
            }
        }
    }

    // A triangle's closure lies in the (convex) parallelogram iff all three
    // vertices are domain nodes.
    auto is_node = [&](int32_t i, int32_t j) {
        int32_t id = dom.node_id(i, j);
        return id >= 0 && id < dom.num_domain_nodes_;
    };
    for (int32_t id = 0; id < dom.num_domain_nodes_; ++id) {
        int32_t i = dom.coords_[size_t(id)].x(), j = dom.coords_[size_t(id)].y();
        if (is_node(i + 1, j) && is_node(i, j + 1))
            dom.triangles_.push_back({i, j, +1});
        if (is_node(i - 1, j) && is_node(i, j - 1))
            dom.triangles_.push_back({i, j, -1});
    }
    return dom;
}

Deformation make_affine(std::shared_ptr<const LatticeDomain> domain, const Eigen::Matrix2d& F,
                        const Eigen::Vector2d& b) {
    Deformation def;
    def.domain = std::move(domain);
    def.x.resize(size_t(def.domain->num_with_ghosts()));
    // Extended-precision evaluation keeps the stored positions correctly
    // rounded, which the exact-well energy checks depend on.
    for (int32_t id = 0; id < def.domain->num_with_ghosts(); ++id) {
        Eigen::Vector2d p = def.domain->point(id);
        long double x = (long double)F(0, 0) * p.x() + (long double)F(0, 1) * p.y() + b.x();
        long double y = (long double)F(1, 0) * p.x() + (long double)F(1, 1) * p.y() + b.y();
        def.x[size_t(id)] = {double(x), double(y)};
    }
    return def;
}

void apply_boundary(Deformation& def, const WellSystem& w, double lambda,
                    const Eigen::Vector2d& c) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw ConfigError("apply_boundary: lambda must lie in (0,1]");
    const LatticeDomain& dom = *def.domain;
    Eigen::Matrix2d F = dom.shape().sign > 0 ? w.f_lambda(lambda) : w.f_lambda_minus(lambda);
    for (int32_t id = 0; id < dom.num_with_ghosts(); ++id) {
        switch (dom.role(id)) {
        case NodeRole::LeftBoundary:
        case NodeRole::GhostLeft:
            def.x[size_t(id)] = F * dom.point(id);
            break;
        case NodeRole::RightBoundary:
        case NodeRole::GhostRight:
            def.x[size_t(id)] = F * dom.point(id) + c;
            break;
        default:
            break;
        }
    }
    def.lambda = lambda;
    def.c = c;
}

double triangle_det(const Deformation& def, const TriangleRef& t) {
    const LatticeDomain& dom = *def.domain;
    int32_t v0 = dom.node_id(t.i, t.j);
    int32_t v1 = dom.node_id(t.i + t.orient, t.j);
    int32_t v2 = dom.node_id(t.i, t.j + t.orient);
    if (v0 < 0 || v1 < 0 || v2 < 0)
        throw StructuralError("triangle_det: triangle vertex is not a node of the domain");
    Eigen::Vector2d e1 = def.x[size_t(v1)] - def.x[size_t(v0)];
    Eigen::Vector2d e2 = def.x[size_t(v2)] - def.x[size_t(v0)];
    return e1.x() * e2.y() - e1.y() * e2.x();
}

AdmissibilityReport check_admissible(const Deformation& def) {
    AdmissibilityReport rep;
    for (const TriangleRef& t : def.domain->triangles()) {
        double d = triangle_det(def, t);
        if (!(d > 0.0)) {
            rep.admissible = false;
            rep.violations.push_back({t, d});
        }
    }
    return rep;
}

bool is_admissible(const Deformation& def) {
    for (const TriangleRef& t : def.domain->triangles())
        if (!(triangle_det(def, t) > 0.0)) return false;
    return true;
}

Eigen::Matrix2d gradient_on_triangle(const Deformation& def, const TriangleRef& t) {
    const LatticeDomain& dom = *def.domain;
    int32_t v0 = dom.node_id(t.i, t.j);
    int32_t v1 = dom.node_id(t.i + t.orient, t.j);
    int32_t v2 = dom.node_id(t.i, t.j + t.orient);
    if (v0 < 0 || v1 < 0 || v2 < 0)
        throw StructuralError("gradient_on_triangle: vertex is not a node of the domain");
    double s = double(dom.n()) * t.orient;
    Eigen::Matrix2d G;
    G.col(0) = s * (def.x[size_t(v1)] - def.x[size_t(v0)]);
    G.col(1) = s * (def.x[size_t(v2)] - def.x[size_t(v0)]);
    return G;
}

Eigen::Matrix2d node_gradient(const Deformation& def, int32_t id) {
    const LatticeDomain& dom = *def.domain;
    Eigen::Vector2i ij = dom.coord(id);
    double n = dom.n();
    Eigen::Matrix2d G;
    for (int s = 0; s < 2; ++s) {
        int32_t di = s == 0 ? 1 : 0, dj = s == 0 ? 0 : 1;
        int32_t fwd = dom.node_id(ij.x() + di, ij.y() + dj);
        int32_t bwd = dom.node_id(ij.x() - di, ij.y() - dj);
        if (fwd >= 0)
            G.col(s) = n * (def.x[size_t(fwd)] - def.x[size_t(id)]);
        else if (bwd >= 0)
            G.col(s) = n * (def.x[size_t(id)] - def.x[size_t(bwd)]);
        else
            throw StructuralError("node_gradient: node has no neighbor in a lattice direction");
    }
    return G;
}

Eigen::Vector2d interpolate(const Deformation& def, const Eigen::Vector2d& x) {
    const LatticeDomain& dom = *def.domain;
    if (!dom.contains_point(x))
        throw DomainError("interpolate: point outside the domain polygon");
    double n = dom.n();
    int32_t i0 = int32_t(std::floor(x.x() * n)), j0 = int32_t(std::floor(x.y() * n));

    auto try_triangle = [&](int32_t i, int32_t j, int orient, Eigen::Vector2d& out) {
        int32_t v0 = dom.node_id(i, j), v1 = dom.node_id(i + orient, j), v2 = dom.node_id(i, j + orient);
        if (v0 < 0 || v1 < 0 || v2 < 0) return false;
        // Barycentric coordinates on the reference triangle.
        double u = (x.x() * n - i) * orient;
        double v = (x.y() * n - j) * orient;
        const double tol = 1e-10;
        if (u < -tol || v < -tol || u + v > 1.0 + tol) return false;
        out = (1.0 - u - v) * def.x[size_t(v0)] + u * def.x[size_t(v1)] + v * def.x[size_t(v2)];
        return true;
    };

    Eigen::Vector2d out;
    for (int32_t di = 0; di >= -1; --di)
        for (int32_t dj = 0; dj >= -1; --dj) {
            int32_t i = i0 + di, j = j0 + dj;
            if (try_triangle(i, j, +1, out)) return out;
            if (try_triangle(i + 1, j + 1, -1, out)) return out;
        }
    throw DomainError("interpolate: no covering triangle found for point");
}

namespace {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void save_deformation(const Deformation& def, std::ostream& os) {
    const LatticeDomain& dom = *def.domain;
    const ParallelogramShape& s = dom.shape();
    os << "twowell deformation v1\n";
    os << "n " << dom.n() << "\n";
    os << "shape " << fmt_g17(s.d) << " " << fmt_g17(s.l) << " " << (s.sign > 0 ? "+" : "-") << " "
       << fmt_g17(s.center.x()) << " " << fmt_g17(s.center.y()) << "\n";
    os << "lambda " << fmt_g17(def.lambda) << "\n";
    os << "c " << fmt_g17(def.c.x()) << " " << fmt_g17(def.c.y()) << "\n";
    os << "nodes " << dom.num_with_ghosts() << "\n";
    for (int32_t id = 0; id < dom.num_with_ghosts(); ++id) {
        Eigen::Vector2i ij = dom.coord(id);
        os << ij.x() << " " << ij.y() << " " << fmt_g17(def.x[size_t(id)].x()) << " "
           << fmt_g17(def.x[size_t(id)].y()) << "\n";
    }
}

void save_deformation(const Deformation& def, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("save_deformation: cannot open " + path);
    save_deformation(def, os);
}

Deformation load_deformation(std::istream& is) {
    std::string line;
    auto next = [&]() {
        if (!std::getline(is, line)) throw ConfigError("load_deformation: truncated file");
        return std::istringstream(line);
    };

    if (!std::getline(is, line) || line != "twowell deformation v1")
        throw ConfigError("load_deformation: bad magic line");

    std::string key, signstr;
    int n = 0;
    {
        auto ss = next();
        ss >> key >> n;
        if (key != "n" || !ss) throw ConfigError("load_deformation: bad n line");
    }
    ParallelogramShape shape;
    {
        auto ss = next();
        ss >> key >> shape.d >> shape.l >> signstr >> shape.center.x() >> shape.center.y();
        if (key != "shape" || !ss || (signstr != "+" && signstr != "-"))
            throw ConfigError("load_deformation: bad shape line");
        shape.sign = signstr == "+" ? +1 : -1;
    }
    Deformation def;
    {
        auto ss = next();
        ss >> key >> def.lambda;
        if (key != "lambda" || !ss) throw ConfigError("load_deformation: bad lambda line");
    }
    {
        auto ss = next();
        ss >> key >> def.c.x() >> def.c.y();
        if (key != "c" || !ss) throw ConfigError("load_deformation: bad c line");
    }
    int64_t count = 0;
    {
        auto ss = next();
        ss >> key >> count;
        if (key != "nodes" || !ss) throw ConfigError("load_deformation: bad nodes line");
    }

    auto dom = std::make_shared<LatticeDomain>(
        build_domain(shape.d, shape.l, shape.sign, n, shape.center));
    if (count != dom->num_with_ghosts())
        throw ConfigError("load_deformation: node count does not match the rebuilt domain");
    def.domain = dom;
    def.x.assign(size_t(count), Eigen::Vector2d::Zero());
    std::vector<char> seen(size_t(count), 0);
    for (int64_t k = 0; k < count; ++k) {
        auto ss = next();
        int32_t i, j;
        double ux, uy;
        ss >> i >> j >> ux >> uy;
        if (!ss) throw ConfigError("load_deformation: bad node line");
        int32_t id = dom->node_id(i, j);
        if (id < 0) throw ConfigError("load_deformation: node not in domain");
        if (seen[size_t(id)]) throw ConfigError("load_deformation: duplicate node line");
        seen[size_t(id)] = 1;
        def.x[size_t(id)] = {ux, uy};
    }
    return def;
}

Deformation load_deformation(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("load_deformation: cannot open " + path);
    return load_deformation(is);
}

} // namespace twowell
