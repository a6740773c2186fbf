// Lower and upper bounding bit-pipe models for channels: the graph fragments
// that replace a noisy channel, the optimizers that evaluate the sufficient
// conditions behind the upper models, and the Gaussian closed forms.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netcap/capacity.hpp"
#include "netcap/grids.hpp"
#include "netcap/prob.hpp"

namespace netcap {

// Capacity value that may be symbolically infinite (never an IEEE inf).
struct Cap {
    double value = 0.0;
    bool is_inf = false;

    Cap() = default;
    Cap(double v) : value(v) {}
    static Cap inf() {
        Cap c;
        c.is_inf = true;
        return c;
    }
    bool positive() const { return is_inf || value > 0.0; }
    Cap operator+(const Cap& o) const {
        if (is_inf || o.is_inf) return inf();
        return Cap(value + o.value);
    }
    bool operator<(const Cap& o) const {
        if (is_inf) return false;
        if (o.is_inf) return true;
        return value < o.value;
    }
    double finite_or(double sentinel) const { return is_inf ? sentinel : value; }
};

// Hyperedge index (A,B): nonempty transmitter and receiver subsets.
struct EdgeKey {
    std::vector<int> a, b;  // sorted node ids

    EdgeKey() = default;
    EdgeKey(std::vector<int> a_, std::vector<int> b_);
    bool operator<(const EdgeKey& o) const { return std::tie(a, b) < std::tie(o.a, o.b); }
    bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
    std::string to_string() const;
};

struct RateVector {
    std::map<EdgeKey, Cap> entries;

    void set(std::vector<int> a, std::vector<int> b, Cap rate);
    Cap get(const EdgeKey& k) const;  // zero when absent
};

// Terminal layout of a channel inside a network, with the feed capacities
// log2|X_i| (symbolically infinite for continuous inputs).
struct ChannelGeometry {
    std::string id;
    std::vector<int> v1, v2;
    std::vector<Cap> feeds;  // parallel to v1

    Cap feed_for(int node) const;
};

ChannelGeometry geometry_for(const Dmc& ch, std::vector<int> v1, std::vector<int> v2,
                             std::string id = "");
ChannelGeometry geometry_for(const GaussianChannelSpec& spec, std::vector<int> v1,
                             std::vector<int> v2, std::string id = "");

struct NodeRef {
    enum class Kind { Terminal, Internal };
    Kind kind = Kind::Terminal;
    int id = 0;  // terminal: network node id; internal: index into internal_sets

    static NodeRef terminal(int id) { return {Kind::Terminal, id}; }
    static NodeRef internal(int idx) { return {Kind::Internal, idx}; }
    bool operator==(const NodeRef& o) const { return kind == o.kind && id == o.id; }
};

// One broadcast edge: delivers `cap` from src to every destination; a cut
// charges it once when src is on the source side and any dst is not.
struct ModelEdge {
    NodeRef src;
    std::vector<NodeRef> dsts;
    Cap cap;
    bool is_feed = false;
};

struct BitPipeModel {
    std::string channel_id;
    std::vector<int> v1, v2;
    std::vector<std::vector<int>> internal_sets;  // node v^A keyed by sorted A
    std::vector<ModelEdge> edges;
};

// Assemble the bit-pipe graph for a rate vector: one broadcast edge per
// nonzero hyperedge rate, internal nodes v^A for multi-transmitter edges,
// feed edges i -> v^A at the geometry's feed capacities.
BitPipeModel build_model(const ChannelGeometry& g, const RateVector& rates);

// ---------------------------------------------------------------------------
// Lower models
// ---------------------------------------------------------------------------

// Map a region point's labeled rates onto hyperedge keys.
RateVector rates_from_point(ChannelRole role, const ChannelGeometry& g, const RegionPoint& pt);

// Lower models carry single-transmitter rates only; a nonzero rate on a
// multi-transmitter key is rejected.
std::pair<RateVector, BitPipeModel> lower_model(const ChannelGeometry& g,
                                                const RateVector& rates);

// ---------------------------------------------------------------------------
// Condition checking
// ---------------------------------------------------------------------------

// Multi-start settings for the auxiliary-variable searches.
struct AuxSearch {
    std::size_t starts = 16;
    std::size_t iterations = 250;
    std::uint64_t seed = 1729;
    std::size_t eval_budget = 500000;  // cap on objective evaluations per grid point
};

struct CheckLine {
    std::string inequality;
    double min_slack = 0.0;
    std::vector<double> argmin_input;
};

struct CheckReport {
    std::vector<CheckLine> lines;
    std::size_t grid_points = 0;
    double min_slack() const;
    bool ok(double threshold) const { return min_slack() >= threshold; }
};

// Re-verifies the "for all input distributions" conditions of an upper model
// over a simplex grid; negative slack flags invalidity.  For MAC rates,
// `mac_budget` pins the description budget used in the auxiliary search
// (defaults to the direct-edge rate); constructions pass their own budget so
// the re-check matches the optimizer exactly.
CheckReport check_upper_conditions(const Dmc& ch, const ChannelGeometry& g,
                                   const RateVector& rates, std::size_t grid_points,
                                   const AuxSearch& search = {},
                                   std::optional<double> mac_budget = std::nullopt);

// ---------------------------------------------------------------------------
// Upper models
// ---------------------------------------------------------------------------

std::pair<RateVector, BitPipeModel> upper_model_p2p(const ChannelGeometry& g, const Dmc& ch,
                                                    double delta, double tol = 1e-9);

struct BcUpperFamily {
    double c2 = 0.0;   // grid max of I(X;Y2)
    double c12 = 0.0;  // grid max of I(X;Y1,Y2)
    std::vector<std::pair<RateVector, BitPipeModel>> family;  // increasing R0
    CheckReport check;  // refined-grid re-verification of the first member
};

// Pareto family R0 >= c2+delta, R1 = max(0, c12-R0)+delta; the private rate
// toward the second receiver is set to zero.
BcUpperFamily upper_model_bc(const ChannelGeometry& g, const Dmc& ch, std::size_t grid_points,
                             double delta, std::size_t family_size = 9);

// Smallest conditional information rate a receiver-side description must
// carry: min over p(u|x1) with |U| <= |X1| and I(X1;U) <= r1_budget of
// I(X1,X2;Y|U).  `joint_in` is the input law p(x1,x2).  Returns the certified
// value; the minimizing conditional is written to *best_pux when given.
double mac_conditional_info_min(const Dmc& ch, const std::vector<double>& joint_in,
                                double r1_budget, const AuxSearch& search,
                                std::vector<std::vector<double>>* best_pux = nullptr);

struct MacUpperResult {
    double r1_budget = 0.0;
    double merged_rate = 0.0;  // includes +delta
    RateVector rates;
    BitPipeModel model;
    std::vector<double> argmax_input;
    CheckReport check;
};

MacUpperResult upper_model_mac(const ChannelGeometry& g, const Dmc& ch, double r1,
                               std::size_t grid_points, const AuxSearch& search, double delta);

// Sweep over increasing R1 budgets with per-grid-point warm starts, which
// makes the merged rate nonincreasing by construction.
std::vector<MacUpperResult> upper_model_mac_sweep(const ChannelGeometry& g, const Dmc& ch,
                                                  const std::vector<double>& r1_list,
                                                  std::size_t grid_points,
                                                  const AuxSearch& search, double delta);

struct IcUpperResult {
    int variant = 1;
    RateVector rates;
    BitPipeModel model;
    CheckReport check;
    bool budget_exhausted = false;
};

IcUpperResult upper_model_ic(const ChannelGeometry& g, const Dmc& ch, int variant,
                             std::size_t grid_points, const AuxSearch& search, double delta);

// ---------------------------------------------------------------------------
// Model pairs
// ---------------------------------------------------------------------------

struct ModelPair {
    RateVector lower_rates, upper_rates;  // closure values, no slack applied
    BitPipeModel lower_model, upper_model;  // emitted; upper edges carry +slack
    double slack = 0.0;
    std::vector<std::string> notes;
};

// Closed-form Gaussian pairs.  The BC pair shares its private rate between
// the two sides; the MAC pair's merged-edge gap is
// (1/2)log2(((sqrt(P1)+sqrt(P2))^2+N)/(P1+P2+N)).
ModelPair gaussian_bc_models(const ChannelGeometry& g, const GaussianChannelSpec& spec,
                             double delta);
ModelPair gaussian_mac_models(const ChannelGeometry& g, const GaussianChannelSpec& spec,
                              double delta);

// Same construction with the transmitter roles exchanged; widens candidate
// sets for the gap metrics.
RateVector gaussian_mac_upper_rates_swapped(const ChannelGeometry& g,
                                            const GaussianChannelSpec& spec);

inline constexpr double kDefaultSlack = 1e-4;

}  // namespace netcap
