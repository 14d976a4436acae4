#ifndef TWOWELL_ANALYSIS_HPP
#define TWOWELL_ANALYSIS_HPP

#include "twowell/hamiltonian.hpp"
#include "twowell/lattice.hpp"

#include <optional>
#include <vector>

namespace twowell {

struct ScalarLatticeField {
    std::shared_ptr<const LatticeDomain> domain;
    std::vector<double> values; // per domain node
};

struct DiscreteGradientField {
    std::vector<Eigen::Vector2d> g;
    std::vector<uint8_t> mask; // bit 0: horizontal present, bit 1: vertical present
};

// Forward differences n(f^{i+1,j}-f^{ij}), n(f^{i,j+1}-f^{ij}); a missing
// forward neighbor leaves the component zero and clears its mask bit.
DiscreteGradientField discrete_gradient(const ScalarLatticeField& f);

// Norm of the discrete gradient with absent components omitted.
double discrete_gradient_norm(const ScalarLatticeField& f, int32_t id);

struct SecondDiffRecord {
    double max_ratio_h = 0.0;     // horizontal second difference vs n sqrt(h)
    double max_ratio_v = 0.0;     // vertical
    double max_ratio_mixed = 0.0; // mixed vs n (sqrt h_ij + sqrt h_i+1 + sqrt h_i-1)
    double max_ratio = 0.0;
    bool unbounded = false; // nonzero difference over a zero-density site
};

// Per-site ratios of the three second-difference quantities against the
// density bound; the suite maximum is compared to a calibrated constant.
SecondDiffRecord second_diff_check(const Deformation& def, const EnergyReport& report);

struct CoareaRecord {
    double lhs = 0.0;  // integral of super-level-set perimeters
    double rhs = 0.0;  // sum of n^-2 |grad_n f|
    double ratio = 0.0;
};

// Exact evaluation of both sides over the subdomain (node-id list; empty
// means all domain nodes). f must be nonnegative there.
CoareaRecord coarea_check(const ScalarLatticeField& f, const std::vector<int32_t>& subdomain = {});

struct RigiditySample {
    std::vector<double> ratios; // |u(x)-u(y)| / |U0 (x-y)|
    double eta = 0.0;           // one-well smallness sum over the hull
    double mu = 0.0;            // normalized dist-to-wells mass over the hull
    double fraction_within(double c) const; // fraction with |ratio-1| <= c*mu
};

// Samples point pairs from the two balls and reports the length-ratio
// distribution together with the smallness quantities of the two-well
// rigidity statement.
RigiditySample rigidity_sample(const Deformation& def, const WellSystem& w,
                               const Eigen::Vector2d& x0, const Eigen::Vector2d& y0,
                               double alpha, int samples, uint64_t seed);

struct InterfaceSegment {
    std::vector<Eigen::Vector2d> points; // polyline in reference coordinates
    int edge_count = 0;
    Eigen::Vector2d normal{0.0, 0.0};
    double angle_to_plus = 0.0;  // degrees to (1,1)/sqrt2, as lines
    double angle_to_minus = 0.0; // degrees to (1,-1)/sqrt2
};

struct InterfaceSummary {
    bool classifiable = true;
    double classified_fraction = 0.0;
    std::vector<InterfaceSegment> segments;
};

// Labels triangles by nearest well (within tol, with the other well at
// least 2 tol away), chains the label-jump edges into polylines and fits
// a normal per polyline. Polylines shorter than 3 lattice edges are
// dropped as noise.
InterfaceSummary interface_extract(const Deformation& def, const WellSystem& w, double tol);

// Sum over nodes of n^-2 |second difference tensor|^2; grows linearly in n
// on laminates.
double second_gradient_budget(const Deformation& def);

// Mean dist(grad, K) over triangles whose label is clear at tol.
double bulk_mean_distance(const Deformation& def, const WellSystem& w, double tol);

} // namespace twowell

#endif
