// Channel capacities and achievable capacity-region points.  Region points
// carry the distributions that achieve them, so every returned rate can be
// re-verified from its witness.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "netcap/grids.hpp"
#include "netcap/prob.hpp"

namespace netcap {

struct CapacityResult {
    double capacity = 0.0;      // midpoint of the final brackets
    Pmf optimal_input;
    double lower_bracket = 0.0; // achievable
    double upper_bracket = 0.0; // converse
    std::size_t iterations = 0;
    bool converged = false;
};

// Alternating-maximization capacity solver for point-to-point channels.
// The bracket gap max_x D_x - log2(sum_x p(x) 2^{D_x}) drives the stopping
// rule; the per-iteration objective I(p_k) is checked to be nondecreasing.
// On hitting the iteration cap, returns converged=false with the best
// brackets.  `objective_trace`, when given, receives I(p_k) per iteration.
CapacityResult blahut_arimoto(const Dmc& channel, double tol = 1e-9,
                              std::size_t max_iterations = 100000,
                              std::vector<double>* objective_trace = nullptr);

// ---------------------------------------------------------------------------
// Region points
// ---------------------------------------------------------------------------

// Time-shared product inputs for a two-transmitter channel: Q ~ weights,
// X1|Q=q ~ x1_dists[q], X2|Q=q ~ x2_dists[q], independent given Q.
struct MacWitness {
    std::vector<double> weights;
    std::vector<Pmf> x1_dists;
    std::vector<Pmf> x2_dists;
};

// Auxiliary-variable witness for a degraded broadcast point: U ~ u,
// X|U=u ~ x_given_u[u].
struct BcWitness {
    Pmf u;
    std::vector<Pmf> x_given_u;
};

struct GaussianBcWitness {
    GaussianChannelSpec spec;
    double alpha;  // power fraction assigned to the weaker receiver
};

struct GaussianMacWitness {
    GaussianChannelSpec spec;
};

using Witness = std::variant<MacWitness, BcWitness, GaussianBcWitness, GaussianMacWitness>;

struct RegionPoint {
    std::vector<std::pair<std::string, double>> rates;
    Witness witness;

    double rate(const std::string& label) const;
};

// Largest constraint violation of the point's rates against the information
// quantities recomputed from its witness (<= tol means self-certified).
double region_point_violation(const Dmc& channel, const RegionPoint& point);
double region_point_violation(const GaussianChannelSpec& spec, const RegionPoint& point);

// Joint (Q,X1,X2,Y) induced by a MAC witness.
JointPmf mac_witness_joint(const Dmc& channel, const MacWitness& w);
// Joint (U,X,Y1,Y2) induced by a BC witness.
JointPmf bc_witness_joint(const Dmc& channel, const BcWitness& w);

// ---------------------------------------------------------------------------
// Point generators
// ---------------------------------------------------------------------------

// Achievable points for a two-user MAC under independent inputs: for each
// pair of gridded input laws, the two corner points of the pentagon plus the
// proportional sum-rate splits alpha from `split_grid` (labels "R1","R2").
std::vector<RegionPoint> mac_lower_points(const Dmc& channel,
                                          const std::vector<double>& split_grid,
                                          std::size_t input_grid_points = 9);

// Explicit time sharing: convex combination of previously produced points'
// witnesses with the given weights.
RegionPoint mac_time_share(const Dmc& channel, const std::vector<RegionPoint>& points,
                           const std::vector<double>& weights);

// Degraded-broadcast points R0 = I(U;Y2), R1 = I(X;Y1|U) with |U| = |X|
// (labels "R0","R1").  For binary inputs the sweep uses the symmetric
// parameterization U ~ uniform, X = U xor Bern(alpha), alpha from `aux_grid`;
// larger alphabets additionally grid p(u) and p(x|u).
std::vector<RegionPoint> degraded_bc_lower_points(const Dmc& channel,
                                                  const std::vector<double>& aux_grid,
                                                  std::size_t input_grid_points = 9);

// Gaussian closed forms (labels "R1","R2").
RegionPoint gaussian_bc_lower_point(const GaussianChannelSpec& spec, double alpha);
RegionPoint gaussian_mac_lower_corner(const GaussianChannelSpec& spec);

}  // namespace netcap
