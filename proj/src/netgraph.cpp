#include "netcap/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "netcap/errors.hpp"

namespace netcap {

// ---------------------------------------------------------------------------
// Network basics
// ---------------------------------------------------------------------------

static bool in_set(NodeSet s, int node) { return (s >> (node - 1)) & 1u; }

void Network::validate() const {
    if (node_count < 1 || node_count > 31) throw ParseError("network: node count out of range");
    auto check_node = [&](int v, const char* what) {
        if (v < 1 || v > node_count)
            throw ParseError(std::string("network: ") + what + " node " + std::to_string(v) +
                             " outside 1.." + std::to_string(node_count));
    };
    for (const auto& c : components) {
        if (const auto* n = std::get_if<NoisyComponent>(&c)) {
            for (int v : n->v1) check_node(v, "transmitter");
            for (int v : n->v2) check_node(v, "receiver");
            for (int a : n->v1)
                for (int b : n->v2)
                    if (a == b) throw ParseError("network: component V1 and V2 overlap");
        } else if (const auto* m = std::get_if<ModelComponent>(&c)) {
            for (int v : m->model.v1) check_node(v, "transmitter");
            for (int v : m->model.v2) check_node(v, "receiver");
        } else {
            const auto& p = std::get<PipeComponent>(c);
            check_node(p.from, "pipe source");
            check_node(p.to, "pipe destination");
        }
    }
    for (const auto& d : demands) {
        if (const auto* u = std::get_if<UnicastDemand>(&d)) {
            check_node(u->from, "demand source");
            check_node(u->to, "demand sink");
            if (u->from == u->to) throw ParseError("network: demand endpoints must differ");
        } else {
            const auto& md = std::get<MulticastDemand>(d);
            check_node(md.from, "demand source");
            if (md.sinks.empty()) throw ParseError("network: multicast without sinks");
            for (int v : md.sinks) {
                check_node(v, "demand sink");
                if (v == md.from) throw ParseError("network: multicast source among sinks");
            }
        }
    }
}

bool Network::deterministic() const {
    for (const auto& c : components)
        if (std::holds_alternative<NoisyComponent>(c)) return false;
    return true;
}

Network replace(const Network& net, const std::string& channel_id, const BitPipeModel& model) {
    Network out = net;
    for (auto& c : out.components) {
        const auto* n = std::get_if<NoisyComponent>(&c);
        if (!n || n->id != channel_id) continue;
        if (n->v1 != model.v1 || n->v2 != model.v2)
            throw ParseError("replace: model terminals do not match component " + channel_id);
        c = ModelComponent{model};
        return out;
    }
    throw ParseError("replace: no noisy component named " + channel_id);
}

// ---------------------------------------------------------------------------
// Cut values
// ---------------------------------------------------------------------------

// Crossing capacity of a model for a fixed internal assignment: an edge is
// charged when its source lies on the S side and any destination does not.
static Cap model_crossing(const BitPipeModel& m, NodeSet s, std::uint32_t internal_in_s) {
    Cap total(0.0);
    for (const ModelEdge& e : m.edges) {
        const bool src_in = e.src.kind == NodeRef::Kind::Terminal
                                ? in_set(s, e.src.id)
                                : ((internal_in_s >> e.src.id) & 1u);
        if (!src_in) continue;
        bool any_out = false;
        for (const NodeRef& d : e.dsts) {
            const bool dst_in = d.kind == NodeRef::Kind::Terminal
                                    ? in_set(s, d.id)
                                    : ((internal_in_s >> d.id) & 1u);
            if (!dst_in) {
                any_out = true;
                break;
            }
        }
        if (any_out) total = total + e.cap;
    }
    return total;
}

static std::pair<Cap, std::uint32_t> model_min_assignment(const BitPipeModel& m, NodeSet s) {
    const std::size_t k = m.internal_sets.size();
    Cap best = model_crossing(m, s, 0);
    std::uint32_t best_t = 0;
    for (std::uint32_t t = 1; t < (1u << k); ++t) {
        Cap v = model_crossing(m, s, t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    return {best, best_t};
}

Cap model_cut_value(const BitPipeModel& m, NodeSet s) {
    bool tx_in = false, rx_out = false;
    for (int v : m.v1) tx_in = tx_in || in_set(s, v);
    for (int v : m.v2) rx_out = rx_out || !in_set(s, v);
    if (!tx_in || !rx_out) return Cap(0.0);
    return model_min_assignment(m, s).first;
}

CutReport cut_value(const Network& net, NodeSet s) {
    CutReport rep;
    rep.s = s;
    rep.value = Cap(0.0);
    for (std::size_t i = 0; i < net.components.size(); ++i) {
        const auto& c = net.components[i];
        if (std::holds_alternative<NoisyComponent>(c))
            throw ParseError("cut_value: network still contains noisy channel \"" +
                             std::get<NoisyComponent>(c).id + "\"; replace it with a model first");
        CutReport::PerComponent pc;
        pc.component_index = i;
        if (const auto* p = std::get_if<PipeComponent>(&c)) {
            pc.contribution = (in_set(s, p->from) && !in_set(s, p->to)) ? p->cap : Cap(0.0);
        } else {
            const auto& m = std::get<ModelComponent>(c).model;
            bool tx_in = false, rx_out = false;
            for (int v : m.v1) tx_in = tx_in || in_set(s, v);
            for (int v : m.v2) rx_out = rx_out || !in_set(s, v);
            if (!tx_in || !rx_out) {
                pc.contribution = Cap(0.0);
            } else {
                auto [val, assign] = model_min_assignment(m, s);
                pc.contribution = val;
                for (std::size_t k = 0; k < m.internal_sets.size(); ++k)
                    if ((assign >> k) & 1u) pc.internal_in_s.push_back(k);
            }
        }
        rep.value = rep.value + pc.contribution;
        rep.per_component.push_back(std::move(pc));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Max-flow min-cut on the expanded graph
// ---------------------------------------------------------------------------

namespace {

struct MaxFlow {
    struct Arc {
        int to;
        double cap;
        std::size_t rev;
    };
    std::vector<std::vector<Arc>> adj;
    std::vector<int> level;
    std::vector<std::size_t> iter;
    static constexpr double kEps = 1e-12;

    explicit MaxFlow(std::size_t n) : adj(n) {}

    void add_arc(int a, int b, double cap) {
        adj[a].push_back({b, cap, adj[b].size()});
        adj[b].push_back({a, 0.0, adj[a].size() - 1});
    }

    bool bfs(int s, int t) {
        level.assign(adj.size(), -1);
        std::queue<int> q;
        level[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (const Arc& a : adj[v])
                if (a.cap > kEps && level[a.to] < 0) {
                    level[a.to] = level[v] + 1;
                    q.push(a.to);
                }
        }
        return level[t] >= 0;
    }

    double dfs(int v, int t, double f) {
        if (v == t) return f;
        for (std::size_t& i = iter[v]; i < adj[v].size(); ++i) {
            Arc& a = adj[v][i];
            if (a.cap > kEps && level[a.to] == level[v] + 1) {
                double d = dfs(a.to, t, std::min(f, a.cap));
                if (d > kEps) {
                    a.cap -= d;
                    adj[a.to][a.rev].cap += d;
                    return d;
                }
            }
        }
        return 0.0;
    }

    double run(int s, int t) {
        double flow = 0.0;
        while (bfs(s, t)) {
            iter.assign(adj.size(), 0);
            double f;
            while ((f = dfs(s, t, std::numeric_limits<double>::infinity())) > kEps) flow += f;
        }
        return flow;
    }
};

// Expanded directed graph: network nodes, per-model internal nodes, and one
// capacity node per multi-destination broadcast edge so its rate is charged
// once per cut.
struct Expanded {
    MaxFlow flow;
    double finite_sum;
    double sentinel;

    Expanded(const Network& net) : flow(count_nodes(net)), finite_sum(0.0), sentinel(0.0) {
        // Pass 1: sentinel strictly greater than the sum of finite capacities plus 1.
        for_each_edge(net, [&](int, const std::vector<int>&, Cap cap) {
            if (!cap.is_inf) finite_sum += cap.value;
        });
        sentinel = finite_sum + 2.0;
        next_aux_ = first_aux_;
        for_each_edge(net, [&](int src, const std::vector<int>& dsts, Cap cap) {
            const double c = cap.is_inf ? sentinel : cap.value;
            if (dsts.size() == 1) {
                flow.add_arc(src, dsts[0], c);
            } else {
                const int aux = next_aux_++;
                flow.add_arc(src, aux, c);
                for (int d : dsts) flow.add_arc(aux, d, sentinel);
            }
        });
    }

    // Dinic mutates arc capacities, so each query builds a fresh Expanded.
    Cap min_cut(int u, int v) {
        const double f = flow.run(u - 1, v - 1);
        if (f > finite_sum + 0.5) return Cap::inf();
        return Cap(f);
    }

private:
    int first_aux_ = 0;
    int next_aux_ = 0;

    // Enumerate directed (possibly broadcast) edges with expanded node ids.
    template <typename F>
    void for_each_edge(const Network& net, F&& f) {
        int internal_base = net.node_count;
        // Internal node ids must be stable across both passes.
        for (const auto& c : net.components) {
            if (const auto* p = std::get_if<PipeComponent>(&c)) {
                f(p->from - 1, std::vector<int>{p->to - 1}, p->cap);
            } else if (const auto* mc = std::get_if<ModelComponent>(&c)) {
                const auto& m = mc->model;
                auto node_id = [&](const NodeRef& r) {
                    return r.kind == NodeRef::Kind::Terminal ? r.id - 1 : internal_base + r.id;
                };
                for (const ModelEdge& e : m.edges) {
                    std::vector<int> dsts;
                    for (const NodeRef& d : e.dsts) dsts.push_back(node_id(d));
                    f(node_id(e.src), dsts, e.cap);
                }
                internal_base += static_cast<int>(m.internal_sets.size());
            } else {
                throw ParseError("min_cut: network still contains a noisy channel");
            }
        }
        first_aux_ = std::max(first_aux_, internal_base);
    }

    static std::size_t count_nodes(const Network& net) {
        std::size_t n = net.node_count;
        std::size_t aux = 0;
        for (const auto& c : net.components)
            if (const auto* mc = std::get_if<ModelComponent>(&c)) {
                n += mc->model.internal_sets.size();
                for (const ModelEdge& e : mc->model.edges)
                    if (e.dsts.size() > 1) ++aux;
            }
        return n + aux;
    }
};

}  // namespace

Cap min_cut(const Network& net, int u, int v) {
    net.validate();
    if (u == v) throw ParseError("min_cut: endpoints must differ");
    Expanded ex(net);
    return ex.min_cut(u, v);
}

Cap min_cut_by_enumeration(const Network& net, int u, int v) {
    net.validate();
    if (u == v) throw ParseError("min_cut: endpoints must differ");
    if (net.node_count > 20) throw EnumerationError("min_cut_by_enumeration: too many nodes");
    Cap best = Cap::inf();
    const NodeSet all = (net.node_count == 31) ? 0x7fffffffu
                                               : ((1u << net.node_count) - 1u);
    for (NodeSet s = 0; s <= all; ++s) {
        if (!in_set(s, u) || in_set(s, v)) continue;
        Cap val = cut_value(net, s).value;
        if (val < best) best = val;
    }
    return best;
}

Cap multicast_capacity(const Network& net, int source, const std::vector<int>& sinks) {
    if (sinks.empty()) throw ParseError("multicast_capacity: no sinks");
    for (int t : sinks)
        if (t == source) throw ParseError("multicast_capacity: source among sinks");
    Cap best = Cap::inf();
    for (int t : sinks) {
        Cap c = min_cut(net, source, t);
        if (c < best) best = c;
    }
    return best;
}

CutsetReport cutset_feasibility(const Network& net, const std::vector<Demand>& demands,
                                int max_nodes) {
    net.validate();
    if (net.node_count > max_nodes)
        throw EnumerationError(
            "cutset_feasibility: network too large for exhaustive cut enumeration; "
            "use min_cut per demand instead");
    CutsetReport rep;
    const NodeSet all = (1u << net.node_count) - 1u;
    for (NodeSet s = 1; s < all; ++s) {
        double crossing = 0.0;
        for (const auto& d : demands) {
            if (const auto* u = std::get_if<UnicastDemand>(&d)) {
                if (in_set(s, u->from) && !in_set(s, u->to)) crossing += u->rate;
            } else {
                const auto& m = std::get<MulticastDemand>(d);
                bool any_out = false;
                for (int t : m.sinks) any_out = any_out || !in_set(s, t);
                if (in_set(s, m.from) && any_out) crossing += m.rate;
            }
        }
        if (crossing <= 0.0) continue;
        Cap val = cut_value(net, s).value;
        if (!val.is_inf && crossing > val.value + 1e-12) {
            rep.feasible = false;
            rep.binding_cuts.push_back({s, crossing, val});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// rho and Delta
// ---------------------------------------------------------------------------

double rho(const std::vector<RateVector>& lower_candidates,
           const std::vector<RateVector>& upper_candidates) {
    if (lower_candidates.empty() || upper_candidates.empty())
        throw ParseError("rho: candidate lists must be nonempty");
    double best = 0.0;
    for (const RateVector& lo : lower_candidates)
        for (const RateVector& up : upper_candidates) {
            double pair_min = std::numeric_limits<double>::infinity();
            bool any = false;
            // Keys qualify when the upper rate is positive and at least the lower.
            auto visit = [&](const EdgeKey& k) {
                const Cap u = up.get(k), l = lo.get(k);
                if (!u.positive()) return;
                if (!u.is_inf && !l.is_inf && u.value < l.value) return;
                if (l.is_inf && !u.is_inf) return;
                any = true;
                const double ratio = u.is_inf ? (l.is_inf ? 1.0 : 0.0)
                                              : (l.is_inf ? 1.0 : l.value / u.value);
                pair_min = std::min(pair_min, ratio);
            };
            for (const auto& [k, cap] : up.entries) visit(k);
            for (const auto& [k, cap] : lo.entries)
                if (!up.entries.count(k)) visit(k);
            if (any) best = std::max(best, pair_min);
        }
    return std::min(best, 1.0);
}

double delta_gap(const ChannelGeometry& g, NodeSet s_pattern,
                 const std::vector<RateVector>& lower_candidates,
                 const std::vector<RateVector>& upper_candidates) {
    if (lower_candidates.empty() || upper_candidates.empty())
        throw ParseError("delta_gap: candidate lists must be nonempty");
    double best = std::numeric_limits<double>::infinity();
    for (const RateVector& lo : lower_candidates) {
        const BitPipeModel ml = build_model(g, lo);
        const Cap vl = model_cut_value(ml, s_pattern);
        for (const RateVector& up : upper_candidates) {
            const BitPipeModel mu = build_model(g, up);
            const Cap vu = model_cut_value(mu, s_pattern);
            double d;
            if (vu.is_inf) {
                d = std::numeric_limits<double>::infinity();
            } else if (vl.is_inf) {
                throw CheckError("delta_gap: lower model cut value is infinite");
            } else {
                d = vu.value - vl.value;
            }
            if (d < -1e-9)
                throw CheckError("delta_gap: upper cut value below lower (bad candidate pair)");
            best = std::min(best, std::max(0.0, d));
        }
    }
    return best;
}

GapReport network_gaps(const Network& net, const std::vector<ChannelCandidates>& candidates,
                       int max_nodes) {
    net.validate();
    if (net.node_count > max_nodes)
        throw EnumerationError("network_gaps: too many nodes for exhaustive cut enumeration");

    GapReport rep;
    rep.rho_network = 1.0;
    for (const auto& cc : candidates) {
        if (cc.lowers.empty() || cc.uppers.empty())
            throw CandidateError("network_gaps: channel " + cc.geometry.id +
                                 " lacks model candidates");
        const auto& rl = cc.rho_lowers.empty() ? cc.lowers : cc.rho_lowers;
        const auto& ru = cc.rho_uppers.empty() ? cc.uppers : cc.rho_uppers;
        const double r = rho(rl, ru);
        rep.rho_per_channel[cc.geometry.id] = r;
        rep.rho_network = std::min(rep.rho_network, r);
    }

    // Delta depends on S only through the channel's terminal pattern; cache
    // each channel's per-pattern values before sweeping cuts.
    struct PatternCache {
        const ChannelCandidates* cc;
        std::vector<int> terminals;
        std::vector<double> value;  // indexed by local pattern bits
    };
    std::vector<PatternCache> caches;
    for (const auto& cc : candidates) {
        PatternCache pc;
        pc.cc = &cc;
        pc.terminals = cc.geometry.v1;
        pc.terminals.insert(pc.terminals.end(), cc.geometry.v2.begin(), cc.geometry.v2.end());
        const std::size_t n = pc.terminals.size();
        pc.value.resize(1u << n);
        for (std::uint32_t pat = 0; pat < (1u << n); ++pat) {
            NodeSet s = 0;
            for (std::size_t i = 0; i < n; ++i)
                if ((pat >> i) & 1u) s |= (1u << (pc.terminals[i] - 1));
            pc.value[pat] = delta_gap(cc.geometry, s, cc.lowers, cc.uppers);
        }
        caches.push_back(std::move(pc));
    }

    const NodeSet all = (1u << net.node_count) - 1u;
    const bool record = net.node_count <= 12;
    for (NodeSet s = 0; s <= all; ++s) {
        double total = 0.0;
        for (const auto& pc : caches) {
            std::uint32_t pat = 0;
            for (std::size_t i = 0; i < pc.terminals.size(); ++i)
                if (in_set(s, pc.terminals[i])) pat |= (1u << i);
            total += pc.value[pat];
        }
        if (record) rep.delta_per_cut.emplace_back(s, total);
        if (total > rep.additive_gap) {
            rep.additive_gap = total;
            rep.additive_argmax = s;
        }
    }
    return rep;
}

}  // namespace netcap
