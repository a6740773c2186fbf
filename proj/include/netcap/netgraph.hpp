// Networks of channels and bit-pipe models: channel replacement, cut values
// with internal-node minimization, max-flow min-cut, cut-set feasibility, and
// the per-channel gap metrics rho and Delta.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "netcap/channel_io.hpp"
#include "netcap/models.hpp"
#include "netcap/prob.hpp"

namespace netcap {

struct NoisyComponent {
    ParsedChannel channel;
    std::vector<int> v1, v2;
    std::string id;
};

struct ModelComponent {
    BitPipeModel model;
};

struct PipeComponent {
    int from = 0, to = 0;
    Cap cap;
};

using Component = std::variant<NoisyComponent, ModelComponent, PipeComponent>;

struct UnicastDemand {
    int from = 0, to = 0;
    double rate = 0.0;
};

struct MulticastDemand {
    int from = 0;
    std::vector<int> sinks;
    double rate = 0.0;
};

using Demand = std::variant<UnicastDemand, MulticastDemand>;

struct Network {
    int node_count = 0;  // nodes are 1..node_count
    std::vector<Component> components;
    std::vector<Demand> demands;

    void validate() const;
    bool deterministic() const;  // no noisy components remain
};

// Node subsets are bitmasks over nodes 1..m (bit i-1 for node i).
using NodeSet = std::uint32_t;

// Replace the identified noisy component by a bit-pipe model whose terminals
// match the component's endpoints.
Network replace(const Network& net, const std::string& channel_id, const BitPipeModel& model);

struct CutReport {
    NodeSet s = 0;
    Cap value;
    struct PerComponent {
        std::size_t component_index = 0;
        Cap contribution;
        std::vector<std::size_t> internal_in_s;  // minimizing internal assignment
    };
    std::vector<PerComponent> per_component;
};

// val(N,S): total capacity crossing from S to its complement, with each
// model's internal nodes assigned to whichever side minimizes the crossing.
// Components with no transmitter in S or no receiver outside S contribute 0.
CutReport cut_value(const Network& net, NodeSet s);

// val of a single bit-pipe model in isolation under an S restricted to its
// terminals (used by the Delta metric).
Cap model_cut_value(const BitPipeModel& model, NodeSet s);

// Max-flow min-cut between two nodes on the expanded graph; broadcast edges
// are charged once via a capacity node.  Returns a symbolic infinity when
// only infinite-capacity cuts separate the pair.
Cap min_cut(const Network& net, int u, int v);

// Exhaustive min over S (u in S, v not) of cut_value; small networks only.
Cap min_cut_by_enumeration(const Network& net, int u, int v);

// Min over sinks of min_cut(source, sink).
Cap multicast_capacity(const Network& net, int source, const std::vector<int>& sinks);

struct CutsetReport {
    bool feasible = true;
    struct Violation {
        NodeSet s = 0;
        double demand_rate = 0.0;
        Cap cut;
    };
    std::vector<Violation> binding_cuts;
};

// Outer-bound check: every cut must carry the demand rate crossing it.
// Exhaustive over S; rejects networks with more than `max_nodes` nodes.
CutsetReport cutset_feasibility(const Network& net, const std::vector<Demand>& demands,
                                int max_nodes = 20);

// ---------------------------------------------------------------------------
// Gap metrics
// ---------------------------------------------------------------------------

// Worst-case per-edge ratio estimate: max over candidate pairs of the min,
// over keys with upper >= lower and upper > 0, of lower/upper.
double rho(const std::vector<RateVector>& lower_candidates,
           const std::vector<RateVector>& upper_candidates);

// Per-cut additive gap estimate: min over candidate pairs of
// val(upper model, S) - val(lower model, S).  `s_pattern` holds the channel
// terminals that fall inside S.
double delta_gap(const ChannelGeometry& g, NodeSet s_pattern,
                 const std::vector<RateVector>& lower_candidates,
                 const std::vector<RateVector>& upper_candidates);

// Candidate rate vectors for one channel, used by the network gap report.
struct ChannelCandidates {
    ChannelGeometry geometry;
    std::vector<RateVector> lowers, uppers;          // for Delta (closure values)
    std::vector<RateVector> rho_lowers, rho_uppers;  // matched-topology vectors for rho
};

struct GapReport {
    std::map<std::string, double> rho_per_channel;
    double rho_network = 1.0;
    std::vector<std::pair<NodeSet, double>> delta_per_cut;  // recorded when m small
    double additive_gap = 0.0;
    NodeSet additive_argmax = 0;
};

GapReport network_gaps(const Network& net, const std::vector<ChannelCandidates>& candidates,
                       int max_nodes = 20);

}  // namespace netcap
