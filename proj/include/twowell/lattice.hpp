#ifndef TWOWELL_LATTICE_HPP
#define TWOWELL_LATTICE_HPP

#include "twowell/wells.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace twowell {

enum class NodeRole : uint8_t {
    Interior = 0,
    LeftBoundary,  // carries prescribed data F_lambda x
    RightBoundary, // carries F_lambda x + c
    LateralFree,   // |x2| = l side, no data prescribed
    GhostLeft,     // one diagonal layer beyond the left boundary
    GhostRight,
};

inline bool is_ghost(NodeRole r) { return r == NodeRole::GhostLeft || r == NodeRole::GhostRight; }

struct ParallelogramShape {
    double d = 4.0;
    double l = 1.0;
    int sign = +1; // +1: sides on x1+x2 = +-d, -1: sides on x1-x2 = +-d
    Eigen::Vector2d center{0.0, 0.0};
};

// Grid triangle anchored at node (i,j); orient +1 is the (i,j),(i+1,j),(i,j+1)
// triangle, orient -1 the (i,j),(i-1,j),(i,j-1) one. That vertex order also
// fixes the sign convention of the orientation test.
struct TriangleRef {
    int32_t i = 0, j = 0;
    int8_t orient = +1;
};

// Triangulated lattice sample of a parallelogram, with role tags and one
// ghost diagonal on each boundary-condition side. Immutable after
// construction; safe to share between threads.
class LatticeDomain {
  public:
    int n() const { return n_; }
    double spacing() const { return 1.0 / n_; }
    const ParallelogramShape& shape() const { return shape_; }

    int32_t num_nodes() const { return num_domain_nodes_; } // without ghosts
    int32_t num_with_ghosts() const { return int32_t(coords_.size()); }
    int32_t num_triangles() const { return int32_t(triangles_.size()); }

    const std::vector<Eigen::Vector2i>& coords() const { return coords_; }
    const std::vector<NodeRole>& roles() const { return roles_; }
    const std::vector<TriangleRef>& triangles() const { return triangles_; }

    NodeRole role(int32_t id) const { return roles_[size_t(id)]; }
    Eigen::Vector2i coord(int32_t id) const { return coords_[size_t(id)]; }
    Eigen::Vector2d point(int32_t id) const {
        return {coords_[size_t(id)].x() / double(n_), coords_[size_t(id)].y() / double(n_)};
    }

    // -1 when (i,j) is neither a domain node nor a ghost.
    int32_t node_id(int32_t i, int32_t j) const {
        if (i < imin_ || i > imax_ || j < jmin_ || j > jmax_) return -1;
        return grid_[size_t(j - jmin_) * size_t(imax_ - imin_ + 1) + size_t(i - imin_)];
    }

    bool contains_point(const Eigen::Vector2d& x, double tol = 1e-12) const;

    // Signed diagonal index relative to the boundary sides: i+j (sign +) or
    // i-j (sign -), shifted by the center.
    int64_t diag(int32_t i, int32_t j) const {
        int64_t ci = int64_t(std::llround(shape_.center.x() * n_));
        int64_t cj = int64_t(std::llround(shape_.center.y() * n_));
        return shape_.sign > 0 ? (i - ci) + (j - cj) : (i - ci) - (j - cj);
    }

    friend LatticeDomain build_domain(double d, double l, int sign, int n, Eigen::Vector2d center);

  private:
    int n_ = 0;
    ParallelogramShape shape_;
    int32_t num_domain_nodes_ = 0;
    int32_t imin_ = 0, imax_ = -1, jmin_ = 0, jmax_ = -1;
    std::vector<int32_t> grid_;
    std::vector<Eigen::Vector2i> coords_;
    std::vector<NodeRole> roles_;
    std::vector<TriangleRef> triangles_;
};

// Nodes are the lattice points inside the closed parallelogram; the triangle
// list holds exactly the grid triangles whose closure lies in it. n*d, n*l
// and n*center must be integral.
LatticeDomain build_domain(double d, double l, int sign, int n,
                           Eigen::Vector2d center = Eigen::Vector2d::Zero());

// Node positions over a shared domain, plus the free translation c of the
// right boundary data and the volume fraction lambda in effect.
struct Deformation {
    std::shared_ptr<const LatticeDomain> domain;
    std::vector<Eigen::Vector2d> x; // indexed by node id, ghosts included
    Eigen::Vector2d c{0.0, 0.0};
    double lambda = 1.0;
};

// u = F x + b on every node and ghost.
Deformation make_affine(std::shared_ptr<const LatticeDomain> domain, const Eigen::Matrix2d& F,
                        const Eigen::Vector2d& b = Eigen::Vector2d::Zero());

// Overwrites the boundary nodes and ghost layers with F_lambda x (left) and
// F_lambda x + c (right); all other nodes are untouched.
void apply_boundary(Deformation& def, const WellSystem& w, double lambda,
                    const Eigen::Vector2d& c);

struct AdmissibilityViolation {
    TriangleRef tri;
    double det = 0.0;
};

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<AdmissibilityViolation> violations;
};

// Orientation test det(e1, e2) > 0 on every triangle, in the canonical
// vertex order of TriangleRef.
AdmissibilityReport check_admissible(const Deformation& def);
bool is_admissible(const Deformation& def); // early-exit variant

double triangle_det(const Deformation& def, const TriangleRef& t);

// Piecewise affine interpolation; x must lie in the domain polygon.
Eigen::Vector2d interpolate(const Deformation& def, const Eigen::Vector2d& x);

// Constant gradient of the interpolant on a triangle.
Eigen::Matrix2d gradient_on_triangle(const Deformation& def, const TriangleRef& t);

// Node-level gradient: columns are the forward differences of the (i,j)
// anchored up-triangle; a missing forward neighbor falls back to the
// backward difference in that direction.
Eigen::Matrix2d node_gradient(const Deformation& def, int32_t id);

// Text serialization; round-trips bit-exactly at full decimal precision.
void save_deformation(const Deformation& def, std::ostream& os);
void save_deformation(const Deformation& def, const std::string& path);
Deformation load_deformation(std::istream& is);
Deformation load_deformation(const std::string& path);

} // namespace twowell

#endif
