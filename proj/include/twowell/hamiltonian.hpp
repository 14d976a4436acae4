#ifndef TWOWELL_HAMILTONIAN_HPP
#define TWOWELL_HAMILTONIAN_HPP

#include "twowell/density.hpp"
#include "twowell/lattice.hpp"

#include <functional>
#include <vector>

namespace twowell {

struct EnergyReport {
    double total = 0.0;    // sum over nodes of n^-2 times the site density
    double rescaled = 0.0; // n * total
    int n = 0;
    std::vector<double> site_density; // per domain node
    std::vector<double> dist_wells;   // dist of the node gradient to the wells
    std::vector<double> bracket0;     // one-well bracket values
    std::vector<double> bracket1;
};

// How a node participates in the minimization: frozen data, free unknown,
// or rigidly attached to the translation c.
enum class DofClass : uint8_t { Fixed, Free, MovesWithC };

// Boundary and ghost layers frozen (left) or attached to c (right), all
// other nodes free.
std::vector<DofClass> default_dof_classes(const LatticeDomain& dom);

EnergyReport hamiltonian(const Deformation& def, const WellSystem& w, Density kind);

// Plugin density; must be nonnegative (checked) and is expected to dominate
// a multiple of the model density, which the verify suite samples.
using DensityFn = std::function<double(const Stencil&, const WellSystem&)>;
EnergyReport hamiltonian(const Deformation& def, const WellSystem& w, const DensityFn& fn);

// Total only, no per-site allocation. angle_eps > 0 evaluates the solver's
// smoothed surrogate.
double hamiltonian_total(const Deformation& def, const WellSystem& w, Density kind,
                         double angle_eps = 0.0);

struct EnergyGradient {
    double value = 0.0;                  // total energy at the evaluation point
    std::vector<Eigen::Vector2d> d_node; // zero on Fixed and MovesWithC nodes
    Eigen::Vector2d d_c{0.0, 0.0};       // accumulated over MovesWithC nodes
};

EnergyGradient energy_gradient(const Deformation& def, const WellSystem& w, Density kind);
EnergyGradient energy_gradient(const Deformation& def, const WellSystem& w, Density kind,
                               const std::vector<DofClass>& classes);
// Workspace variant used by the solver loop.
void energy_gradient_into(const Deformation& def, const WellSystem& w, Density kind,
                          const std::vector<DofClass>& classes, EnergyGradient& out,
                          double angle_eps = 0.0);

double pairwise_sum(const double* v, size_t count);

} // namespace twowell

#endif
