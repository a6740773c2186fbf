#include "netcap/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "netcap/errors.hpp"
#include "netcap/rng.hpp"

namespace netcap {

// ---------------------------------------------------------------------------
// Keys, rate vectors, geometry
// ---------------------------------------------------------------------------

EdgeKey::EdgeKey(std::vector<int> a_, std::vector<int> b_) : a(std::move(a_)), b(std::move(b_)) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.empty() || b.empty()) throw ParseError("EdgeKey: A and B must be nonempty");
    if (std::adjacent_find(a.begin(), a.end()) != a.end() ||
        std::adjacent_find(b.begin(), b.end()) != b.end())
        throw ParseError("EdgeKey: repeated node");
}

std::string EdgeKey::to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
    s += "}->{";
    for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + std::to_string(b[i]);
    return s + "}";
}

void RateVector::set(std::vector<int> a, std::vector<int> b, Cap rate) {
    if (!rate.is_inf && rate.value < 0.0) throw ParseError("RateVector: negative rate");
    entries[EdgeKey(std::move(a), std::move(b))] = rate;
}

Cap RateVector::get(const EdgeKey& k) const {
    auto it = entries.find(k);
    return it == entries.end() ? Cap(0.0) : it->second;
}

Cap ChannelGeometry::feed_for(int node) const {
    for (std::size_t i = 0; i < v1.size(); ++i)
        if (v1[i] == node) return feeds[i];
    throw ParseError("ChannelGeometry: node " + std::to_string(node) + " is not a transmitter");
}

static void check_disjoint_terminals(const std::vector<int>& v1, const std::vector<int>& v2) {
    for (int a : v1)
        for (int b : v2)
            if (a == b)
                throw ParseError("geometry: transmitter and receiver sets overlap on node " +
                                 std::to_string(a));
}

ChannelGeometry geometry_for(const Dmc& ch, std::vector<int> v1, std::vector<int> v2,
                             std::string id) {
    if (v1.size() != role_input_count(ch.role) || v2.size() != role_output_count(ch.role))
        throw ParseError("geometry_for: endpoint counts do not match role");
    check_disjoint_terminals(v1, v2);
    ChannelGeometry g;
    g.id = id.empty() ? ch.name : std::move(id);
    g.v1 = std::move(v1);
    g.v2 = std::move(v2);
    for (std::size_t i = 0; i < g.v1.size(); ++i)
        g.feeds.push_back(Cap(std::log2(static_cast<double>(ch.input_alphabets[i].size()))));
    return g;
}

ChannelGeometry geometry_for(const GaussianChannelSpec& spec, std::vector<int> v1,
                             std::vector<int> v2, std::string id) {
    const bool bc = spec.kind == GaussianChannelSpec::Kind::BC;
    if (v1.size() != (bc ? 1u : 2u) || v2.size() != (bc ? 2u : 1u))
        throw ParseError("geometry_for: endpoint counts do not match Gaussian kind");
    check_disjoint_terminals(v1, v2);
    ChannelGeometry g;
    g.id = id.empty() ? spec.name : std::move(id);
    g.v1 = std::move(v1);
    g.v2 = std::move(v2);
    g.feeds.assign(g.v1.size(), Cap::inf());  // continuous input alphabets
    return g;
}

// ---------------------------------------------------------------------------
// Model assembly
// ---------------------------------------------------------------------------

static void validate_key(const ChannelGeometry& g, const EdgeKey& k) {
    auto subset = [](const std::vector<int>& sub, const std::vector<int>& of) {
        for (int x : sub)
            if (std::find(of.begin(), of.end(), x) == of.end()) return false;
        return true;
    };
    if (!subset(k.a, g.v1) || !subset(k.b, g.v2))
        throw ParseError("RateVector: key " + k.to_string() + " lies outside the channel's M");
}

BitPipeModel build_model(const ChannelGeometry& g, const RateVector& rates) {
    for (const auto& [k, cap] : rates.entries) validate_key(g, k);

    BitPipeModel m;
    m.channel_id = g.id;
    m.v1 = g.v1;
    m.v2 = g.v2;

    // Internal node v^A for every multi-transmitter set carrying positive rate.
    std::set<std::vector<int>> sets;
    for (const auto& [k, cap] : rates.entries)
        if (k.a.size() > 1 && cap.positive()) sets.insert(k.a);
    m.internal_sets.assign(sets.begin(), sets.end());

    auto internal_index = [&](const std::vector<int>& a) {
        for (std::size_t i = 0; i < m.internal_sets.size(); ++i)
            if (m.internal_sets[i] == a) return static_cast<int>(i);
        throw ParseError("build_model: missing internal node");
    };

    for (std::size_t idx = 0; idx < m.internal_sets.size(); ++idx)
        for (int i : m.internal_sets[idx])
            m.edges.push_back({NodeRef::terminal(i),
                               {NodeRef::internal(static_cast<int>(idx))},
                               g.feed_for(i),
                               true});

    for (const auto& [k, cap] : rates.entries) {
        if (!cap.positive()) continue;  // zero-rate hyperedges can carry no bits
        ModelEdge e;
        e.src = k.a.size() == 1 ? NodeRef::terminal(k.a[0]) : NodeRef::internal(internal_index(k.a));
        for (int j : k.b) e.dsts.push_back(NodeRef::terminal(j));
        e.cap = cap;
        m.edges.push_back(std::move(e));
    }
    return m;
}

RateVector rates_from_point(ChannelRole role, const ChannelGeometry& g, const RegionPoint& pt) {
    RateVector r;
    switch (role) {
        case ChannelRole::P2P:
            r.set({g.v1[0]}, {g.v2[0]}, Cap(pt.rate("C")));
            break;
        case ChannelRole::MAC2:
            r.set({g.v1[0]}, {g.v2[0]}, Cap(pt.rate("R1")));
            r.set({g.v1[1]}, {g.v2[0]}, Cap(pt.rate("R2")));
            break;
        case ChannelRole::BC2:
            if (std::holds_alternative<GaussianBcWitness>(pt.witness)) {
                // R2 is the weaker receiver's rate, delivered as common information.
                r.set({g.v1[0]}, {g.v2[0], g.v2[1]}, Cap(pt.rate("R2")));
                r.set({g.v1[0]}, {g.v2[0]}, Cap(pt.rate("R1")));
            } else {
                r.set({g.v1[0]}, {g.v2[0], g.v2[1]}, Cap(pt.rate("R0")));
                r.set({g.v1[0]}, {g.v2[0]}, Cap(pt.rate("R1")));
            }
            break;
        default:
            throw ParseError("rates_from_point: no mapping for this role");
    }
    return r;
}

std::pair<RateVector, BitPipeModel> lower_model(const ChannelGeometry& g,
                                                const RateVector& rates) {
    for (const auto& [k, cap] : rates.entries)
        if (k.a.size() > 1 && cap.positive())
            throw ParseError("lower_model: multi-transmitter rate " + k.to_string() +
                             " must be zero (channel codes carry single-transmitter messages)");
    return {rates, build_model(g, rates)};
}

// ---------------------------------------------------------------------------
// P2P upper model
// ---------------------------------------------------------------------------

std::pair<RateVector, BitPipeModel> upper_model_p2p(const ChannelGeometry& g, const Dmc& ch,
                                                    double delta, double tol) {
    if (delta <= 0.0) throw ParseError("upper_model_p2p: delta must be > 0");
    CapacityResult c = blahut_arimoto(ch, tol);
    RateVector r;
    r.set({g.v1[0]}, {g.v2[0]}, Cap(c.capacity + delta));
    return {r, build_model(g, r)};
}

// ---------------------------------------------------------------------------
// Condition checking
// ---------------------------------------------------------------------------

double CheckReport::min_slack() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& l : lines) m = std::min(m, l.min_slack);
    return m;
}

namespace {

// Subset-entropy helper over a small dense joint (used by the IC search).
struct SmallJoint {
    std::vector<std::size_t> dims;
    std::vector<double> p;  // row-major

    double H(unsigned mask) const {
        std::size_t out_size = 1;
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (mask & (1u << i)) out_size *= dims[i];
        std::vector<double> acc(out_size, 0.0);
        std::vector<std::size_t> coord(dims.size(), 0);
        for (std::size_t flat = 0; flat < p.size(); ++flat) {
            std::size_t pos = 0;
            for (std::size_t i = 0; i < dims.size(); ++i)
                if (mask & (1u << i)) pos = pos * dims[i] + coord[i];
            acc[pos] += p[flat];
            for (std::size_t i = dims.size(); i-- > 0;) {
                if (++coord[i] < dims[i]) break;
                coord[i] = 0;
            }
        }
        double h = 0.0;
        for (double v : acc) h += nlog2(v);
        return h;
    }

    // I(A;B|C) from subset masks.
    double cmi(unsigned a, unsigned b, unsigned c) const {
        return H(a | c) + H(b | c) - H(a | b | c) - (c ? H(c) : 0.0);
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// MAC auxiliary search: minimize I(X1,X2;Y|U) = H(Y|U) - H(Y|X1,X2) over
// p(u|x1) with |U| <= |X1| and I(X1;U) <= budget.  Every candidate is
// evaluated exactly, so returned values are always achieved by a feasible U.
// ---------------------------------------------------------------------------

namespace {

struct MacInnerTables {
    std::size_t n1 = 0, n2 = 0, ny = 0;
    std::vector<double> px1;          // p(x1)
    std::vector<double> out_given_x1; // [x1*ny+y] = p(y|x1)
    double h_y_given_x1x2 = 0.0;
    double h_x1 = 0.0;
    double h_y = 0.0;

    MacInnerTables(const Dmc& ch, const std::vector<double>& joint_in) {
        n1 = ch.input_alphabets[0].size();
        n2 = ch.input_alphabets[1].size();
        ny = ch.out_size();
        px1.assign(n1, 0.0);
        out_given_x1.assign(n1 * ny, 0.0);
        std::vector<double> py(ny, 0.0);
        for (std::size_t x1 = 0; x1 < n1; ++x1)
            for (std::size_t x2 = 0; x2 < n2; ++x2) {
                const double q = joint_in[x1 * n2 + x2];
                px1[x1] += q;
                double hrow = 0.0;
                for (std::size_t y = 0; y < ny; ++y) {
                    const double w = ch.p(x1 * n2 + x2, y);
                    out_given_x1[x1 * ny + y] += q * w;
                    py[y] += q * w;
                    hrow += nlog2(w);
                }
                h_y_given_x1x2 += q * hrow;
            }
        for (std::size_t x1 = 0; x1 < n1; ++x1) {
            h_x1 += nlog2(px1[x1]);
            if (px1[x1] > 0.0)
                for (std::size_t y = 0; y < ny; ++y) out_given_x1[x1 * ny + y] /= px1[x1];
        }
        for (double v : py) h_y += nlog2(v);
    }

    mutable std::vector<double> pu_scratch, pyu_scratch;

    // Returns {I(X1;U), I(X1,X2;Y|U)} for a conditional pux[x1][u].
    std::pair<double, double> evaluate(const std::vector<std::vector<double>>& pux) const {
        const std::size_t nu = pux[0].size();
        pu_scratch.assign(nu, 0.0);
        pyu_scratch.assign(nu * ny, 0.0);  // joint p(u,y)
        double h_ux1 = 0.0;
        for (std::size_t x1 = 0; x1 < n1; ++x1)
            for (std::size_t u = 0; u < nu; ++u) {
                const double m = px1[x1] * pux[x1][u];
                pu_scratch[u] += m;
                h_ux1 += nlog2(m);
                for (std::size_t y = 0; y < ny; ++y)
                    pyu_scratch[u * ny + y] += m * out_given_x1[x1 * ny + y];
            }
        double h_u = 0.0, h_uy = 0.0;
        for (double v : pu_scratch) h_u += nlog2(v);
        for (double v : pyu_scratch) h_uy += nlog2(v);
        const double i_x1u = h_u + h_x1 - h_ux1;
        const double h_y_u = h_uy - h_u;
        return {std::max(0.0, i_x1u), std::max(0.0, h_y_u - h_y_given_x1x2)};
    }
};

// Blend a conditional toward its own marginal until I(X1;U) <= budget.
void project_to_budget(const MacInnerTables& t, std::vector<std::vector<double>>& pux,
                       double budget) {
    auto [i0, v0] = t.evaluate(pux);
    if (i0 <= budget) return;
    const std::size_t nu = pux[0].size();
    std::vector<double> pu(nu, 0.0);
    for (std::size_t x1 = 0; x1 < t.n1; ++x1)
        for (std::size_t u = 0; u < nu; ++u) pu[u] += t.px1[x1] * pux[x1][u];
    double lo = 0.0, hi = 1.0;  // hi = full blend, I = 0
    std::vector<std::vector<double>> cand = pux;
    for (int it = 0; it < 24; ++it) {
        const double theta = 0.5 * (lo + hi);
        for (std::size_t x1 = 0; x1 < t.n1; ++x1)
            for (std::size_t u = 0; u < nu; ++u)
                cand[x1][u] = (1.0 - theta) * pux[x1][u] + theta * pu[u];
        if (t.evaluate(cand).first <= budget) hi = theta; else lo = theta;
    }
    for (std::size_t x1 = 0; x1 < t.n1; ++x1)
        for (std::size_t u = 0; u < nu; ++u)
            pux[x1][u] = (1.0 - hi) * pux[x1][u] + hi * pu[u];
}

// One run of the alternating self-consistent update at tradeoff beta.
void alternating_run(const MacInnerTables& t, double beta, std::size_t iterations,
                     std::vector<std::vector<double>>& pux) {
    const std::size_t nu = pux[0].size();
    std::vector<double> pu(nu), pyu(nu * t.ny), logw(nu);
    for (std::size_t it = 0; it < iterations; ++it) {
        std::fill(pu.begin(), pu.end(), 0.0);
        std::fill(pyu.begin(), pyu.end(), 0.0);
        for (std::size_t x1 = 0; x1 < t.n1; ++x1)
            for (std::size_t u = 0; u < nu; ++u) {
                const double m = t.px1[x1] * pux[x1][u];
                pu[u] += m;
                for (std::size_t y = 0; y < t.ny; ++y)
                    pyu[u * t.ny + y] += m * t.out_given_x1[x1 * t.ny + y];
            }
        for (std::size_t u = 0; u < nu; ++u)
            if (pu[u] > 1e-300)
                for (std::size_t y = 0; y < t.ny; ++y) pyu[u * t.ny + y] /= pu[u];

        double change = 0.0;
        for (std::size_t x1 = 0; x1 < t.n1; ++x1) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t u = 0; u < nu; ++u) {
                double kl = 0.0;
                for (std::size_t y = 0; y < t.ny; ++y) {
                    const double r = t.out_given_x1[x1 * t.ny + y];
                    if (r > 0.0) kl += r * std::log2(r / std::max(pyu[u * t.ny + y], 1e-300));
                }
                logw[u] = (pu[u] > 1e-300 ? std::log2(pu[u]) : -1e6) - beta * kl;
                best = std::max(best, logw[u]);
            }
            double z = 0.0;
            for (std::size_t u = 0; u < nu; ++u) z += std::exp2(logw[u] - best);
            for (std::size_t u = 0; u < nu; ++u) {
                const double nv = std::exp2(logw[u] - best) / z;
                change = std::max(change, std::abs(nv - pux[x1][u]));
                pux[x1][u] = nv;
            }
        }
        if (change < 1e-13) break;
    }
}

}  // namespace

double mac_conditional_info_min(const Dmc& ch, const std::vector<double>& joint_in,
                                double r1_budget, const AuxSearch& search,
                                std::vector<std::vector<double>>* best_pux) {
    if (ch.role != ChannelRole::MAC2)
        throw ParseError("mac_conditional_info_min: channel is not a two-user MAC");
    MacInnerTables t(ch, joint_in);
    const std::size_t nu = t.n1;  // |U| = |X1| suffices

    // U independent of X1: always feasible.
    double best = t.h_y - t.h_y_given_x1x2;
    std::vector<std::vector<double>> best_cond(t.n1, std::vector<double>(nu, 1.0 / nu));

    if (r1_budget <= 1e-12) {
        if (best_pux) *best_pux = best_cond;
        return std::max(0.0, best);
    }

    auto consider = [&](std::vector<std::vector<double>> pux) {
        project_to_budget(t, pux, r1_budget);
        auto [i, v] = t.evaluate(pux);
        if (i <= r1_budget + 1e-9 && v < best) {
            best = v;
            best_cond = std::move(pux);
        }
    };

    // U = X1 is optimal whenever the budget allows a full description.
    {
        std::vector<std::vector<double>> ident(t.n1, std::vector<double>(nu, 0.0));
        for (std::size_t x1 = 0; x1 < t.n1; ++x1) ident[x1][x1] = 1.0;
        auto [i, v] = t.evaluate(ident);
        if (i <= r1_budget + 1e-12) {
            if (best_pux) *best_pux = ident;
            return std::max(0.0, v);
        }
        consider(std::move(ident));
    }

    if (best_pux && !best_pux->empty() && (*best_pux)[0].size() == nu) consider(*best_pux);

    // Deterministic grid plus zoom passes for the binary case.  A description
    // budget of b bits improves on the constant auxiliary by at most b, so
    // tiny budgets get a reduced sweep.
    if (t.n1 == 2) {
        auto sweep = [&](double s_lo, double s_hi, double t_lo, double t_hi, std::size_t pts) {
            for (std::size_t i = 0; i < pts; ++i)
                for (std::size_t k = 0; k < pts; ++k) {
                    const double s = s_lo + (s_hi - s_lo) * i / (pts - 1);
                    const double u = t_lo + (t_hi - t_lo) * k / (pts - 1);
                    consider({{s, 1.0 - s}, {u, 1.0 - u}});
                }
        };
        const bool tiny = r1_budget <= 0.02;
        sweep(0.0, 1.0, 0.0, 1.0, tiny ? 9 : 21);
        double cs = best_cond[0][0], ct = best_cond[1][0], w = tiny ? 0.12 : 0.06;
        const int passes = tiny ? 1 : 2;
        for (int pass = 0; pass < passes; ++pass) {
            sweep(std::max(0.0, cs - w), std::min(1.0, cs + w), std::max(0.0, ct - w),
                  std::min(1.0, ct + w), tiny ? 7 : 9);
            cs = best_cond[0][0];
            ct = best_cond[1][0];
            w /= 4.0;
        }
    }

    // Seeded multi-start alternating optimization over a tradeoff ladder.
    static const double kBetas[] = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0};
    for (std::size_t s = 0; s < search.starts; ++s) {
        Rng rng(derive_seed(search.seed, {0x6d6163u, s}));
        std::vector<std::vector<double>> init(t.n1, std::vector<double>(nu));
        for (auto& row : init) {
            double sum = 0.0;
            for (double& v : row) {
                v = -std::log(std::max(rng.next_unit(), 1e-12));
                sum += v;
            }
            for (double& v : row) v /= sum;
        }
        for (double beta : kBetas) {
            auto pux = init;
            alternating_run(t, beta, search.iterations, pux);
            consider(std::move(pux));
        }
    }

    if (best_pux) *best_pux = best_cond;
    return std::max(0.0, best);
}

// ---------------------------------------------------------------------------
// BC upper models
// ---------------------------------------------------------------------------

static void bc_grid_maxima(const Dmc& ch, std::size_t grid_points, double& c2, double& c12) {
    const auto grid = simplex_grid(ch.input_alphabets[0].size(), grid_points);
    c2 = 0.0;
    c12 = 0.0;
    for (const auto& v : grid) {
        JointPmf j = ch.joint(Pmf::from_probs(v));
        c2 = std::max(c2, mutual_information(j, {"X"}, {"Y2"}));
        c12 = std::max(c12, mutual_information(j, {"X"}, {"Y1", "Y2"}));
    }
}

BcUpperFamily upper_model_bc(const ChannelGeometry& g, const Dmc& ch, std::size_t grid_points,
                             double delta, std::size_t family_size) {
    if (ch.role != ChannelRole::BC2) throw ParseError("upper_model_bc: channel is not a BC");
    if (delta <= 0.0) throw ParseError("upper_model_bc: delta must be > 0");
    if (family_size < 1) family_size = 1;

    BcUpperFamily out;
    bc_grid_maxima(ch, grid_points, out.c2, out.c12);

    for (std::size_t k = 0; k < family_size; ++k) {
        const double frac = family_size == 1 ? 0.0
                                             : static_cast<double>(k) /
                                                   static_cast<double>(family_size - 1);
        const double r0 = out.c2 + delta + frac * (out.c12 - out.c2);
        const double r1 = std::max(0.0, out.c12 - r0) + delta;
        RateVector r;
        r.set({g.v1[0]}, {g.v2[0], g.v2[1]}, Cap(r0));
        r.set({g.v1[0]}, {g.v2[0]}, Cap(r1));
        // The private rate toward the weaker receiver is unconstrained from
        // below and set to zero.
        out.family.emplace_back(r, build_model(g, r));
    }
    out.check = check_upper_conditions(ch, g, out.family.front().first, refined(grid_points));
    return out;
}

// ---------------------------------------------------------------------------
// MAC upper models
// ---------------------------------------------------------------------------

std::vector<MacUpperResult> upper_model_mac_sweep(const ChannelGeometry& g, const Dmc& ch,
                                                  const std::vector<double>& r1_list,
                                                  std::size_t grid_points,
                                                  const AuxSearch& search, double delta) {
    if (ch.role != ChannelRole::MAC2) throw ParseError("upper_model_mac: channel is not a MAC");
    if (delta <= 0.0) throw ParseError("upper_model_mac: delta must be > 0");
    for (double r1 : r1_list)
        if (r1 < 0.0) throw ParseError("upper_model_mac: R1 must be >= 0");

    const std::size_t dim = ch.in_size();
    const auto grid = simplex_grid(dim, grid_points);

    // Warm starts make the merged rate nonincreasing across increasing R1.
    std::vector<std::vector<std::vector<double>>> warm(grid.size());
    std::vector<double> values(grid.size());
    std::vector<MacUpperResult> results;

    AuxSearch cheap = search;
    cheap.starts = 0;

    for (double r1 : r1_list) {
        // Pass 1: deterministic cheap search everywhere.
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::vector<std::vector<double>> pux = warm[i];
            values[i] = mac_conditional_info_min(ch, grid[i], r1, cheap, &pux);
            warm[i] = std::move(pux);
        }
        // Pass 2: multi-start refinement of the points that drive the max.
        if (search.starts > 0) {
            std::vector<std::size_t> order(grid.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
            double refined_max = -1.0;
            std::size_t refined_count = 0;
            for (std::size_t i : order) {
                if (values[i] <= refined_max || refined_count >= 64) break;
                std::vector<std::vector<double>> pux = warm[i];
                values[i] = mac_conditional_info_min(ch, grid[i], r1, search, &pux);
                warm[i] = std::move(pux);
                refined_max = std::max(refined_max, values[i]);
                ++refined_count;
            }
        }

        std::size_t argmax = 0;
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (values[i] > values[argmax]) argmax = i;

        MacUpperResult res;
        res.r1_budget = r1;
        res.merged_rate = values[argmax] + delta;
        res.argmax_input = grid[argmax];
        res.rates.set({g.v1[0]}, {g.v2[0]}, Cap(r1 + delta));
        res.rates.set({g.v1[0], g.v1[1]}, {g.v2[0]}, Cap(res.merged_rate));
        res.model = build_model(g, res.rates);
        res.check = check_upper_conditions(ch, g, res.rates, refined(grid_points), cheap, r1);
        results.push_back(std::move(res));
    }
    return results;
}

MacUpperResult upper_model_mac(const ChannelGeometry& g, const Dmc& ch, double r1,
                               std::size_t grid_points, const AuxSearch& search, double delta) {
    return upper_model_mac_sweep(g, ch, {r1}, grid_points, search, delta).front();
}

// ---------------------------------------------------------------------------
// IC upper models
// ---------------------------------------------------------------------------

namespace {

// Auxiliary pair (U1,U2) realized as one variable W with |W| <= |X1| split as
// a c1 x c2 grid; p(w|x1) is the free conditional.
struct IcShape {
    std::size_t c1, c2;
    std::size_t w() const { return c1 * c2; }
};

struct IcQuantities {
    double t1, t2, t3, t4;  // rate-condition right-hand sides, in declaration order
};

IcQuantities ic_eval(const Dmc& ch, const std::vector<double>& joint_in, const IcShape& shape,
                     const std::vector<std::vector<double>>& pwx1, int variant) {
    const std::size_t n1 = ch.input_alphabets[0].size();
    const std::size_t n2 = ch.input_alphabets[1].size();
    const std::size_t m1 = ch.output_alphabets[0].size();
    const std::size_t m2 = ch.output_alphabets[1].size();

    SmallJoint j;
    j.dims = {shape.c1, shape.c2, n1, n2, m1, m2};  // (U1,U2,X1,X2,Y1,Y2)
    j.p.assign(shape.c1 * shape.c2 * n1 * n2 * m1 * m2, 0.0);
    for (std::size_t w = 0; w < shape.w(); ++w) {
        const std::size_t u1 = w / shape.c2, u2 = w % shape.c2;
        for (std::size_t x1 = 0; x1 < n1; ++x1) {
            const double pw = pwx1[x1][w];
            if (pw == 0.0) continue;
            for (std::size_t x2 = 0; x2 < n2; ++x2) {
                const double base = pw * joint_in[x1 * n2 + x2];
                if (base == 0.0) continue;
                for (std::size_t y1 = 0; y1 < m1; ++y1)
                    for (std::size_t y2 = 0; y2 < m2; ++y2)
                        j.p[((((u1 * shape.c2 + u2) * n1 + x1) * n2 + x2) * m1 + y1) * m2 + y2] =
                            base * ch.p(x1 * n2 + x2, y1 * m2 + y2);
            }
        }
    }
    constexpr unsigned U1 = 1u << 0, U2 = 1u << 1, X1 = 1u << 2, X2 = 1u << 3, Y1 = 1u << 4,
                       Y2 = 1u << 5;
    IcQuantities q{};
    if (variant == 1) {
        q.t1 = j.cmi(X1, U1 | U2, 0);
        q.t2 = j.cmi(X1, U2, 0);
        q.t3 = j.cmi(X1 | X2, Y1, U1 | U2 | Y2) + j.cmi(X1 | X2, Y2, U2);
        q.t4 = j.cmi(X1 | X2, Y2, U2);
    } else {
        q.t1 = j.cmi(X1, U1, 0);
        q.t2 = j.cmi(X1, U1 | U2, 0);
        q.t3 = j.cmi(X1 | X2, Y1, U1);
        q.t4 = j.cmi(X1 | X2, Y2, U1 | U2 | Y1);
    }
    return q;
}

// Induced minimal per-point rates for each variant, in key order
// (direct-a, direct-b, merged-a, merged-b); see ic_keys below.
std::array<double, 4> ic_induced(const IcQuantities& q, int variant) {
    if (variant == 1)
        return {std::max(0.0, q.t1 - q.t2), q.t2, std::max(0.0, q.t3 - q.t4), q.t4};
    return {q.t1, std::max(0.0, q.t2 - q.t1), q.t3, q.t4};
}

double ic_scalar(const IcQuantities& q, int variant) {
    if (variant == 1) return std::max(q.t1, q.t2) + std::max(q.t3, q.t4);
    return std::max(q.t1, q.t2) + q.t3 + q.t4;
}

std::array<EdgeKey, 4> ic_keys(const ChannelGeometry& g, int variant) {
    const int i1 = g.v1[0], i2 = g.v1[1], j1 = g.v2[0], j2 = g.v2[1];
    if (variant == 1)
        return {EdgeKey({i1}, {j1}), EdgeKey({i1}, {j1, j2}), EdgeKey({i1, i2}, {j1}),
                EdgeKey({i1, i2}, {j1, j2})};
    return {EdgeKey({i1}, {j1, j2}), EdgeKey({i1}, {j2}), EdgeKey({i1, i2}, {j1, j2}),
            EdgeKey({i1, i2}, {j2})};
}

// Best auxiliary for one input law: enumerate shapes, search each conditional.
struct IcPointSearch {
    IcQuantities best_q{};
    double best_scalar = std::numeric_limits<double>::infinity();
    bool exhausted = false;
};

IcPointSearch ic_search_point(const Dmc& ch, const std::vector<double>& joint_in, int variant,
                              const AuxSearch& search) {
    const std::size_t n1 = ch.input_alphabets[0].size();
    IcPointSearch out;
    std::size_t evals = 0;

    // Evaluates one conditional, tracks the best, and returns its scalar.
    auto consider = [&](const IcShape& shape, const std::vector<std::vector<double>>& pwx1) {
        ++evals;
        IcQuantities q = ic_eval(ch, joint_in, shape, pwx1, variant);
        const double s = ic_scalar(q, variant);
        if (s < out.best_scalar) {
            out.best_scalar = s;
            out.best_q = q;
        }
        return s;
    };

    std::vector<IcShape> shapes;
    for (std::size_t c1 = 1; c1 <= n1; ++c1)
        for (std::size_t c2 = 1; c1 * c2 <= n1; ++c2) shapes.push_back({c1, c2});

    for (const IcShape& shape : shapes) {
        const std::size_t w = shape.w();
        if (w == 1) {
            consider(shape, std::vector<std::vector<double>>(n1, {1.0}));
            continue;
        }
        if (n1 == 2 && w == 2) {
            // Two free parameters: deterministic grid with two zoom passes.
            double bs = 0.5, bt = 0.5;
            auto sweep = [&](double slo, double shi, double tlo, double thi, std::size_t pts) {
                for (std::size_t i = 0; i < pts; ++i)
                    for (std::size_t k = 0; k < pts; ++k) {
                        if (evals >= search.eval_budget) { out.exhausted = true; return; }
                        const double s = slo + (shi - slo) * i / (pts - 1);
                        const double u = tlo + (thi - tlo) * k / (pts - 1);
                        const double before = out.best_scalar;
                        consider(shape, {{s, 1.0 - s}, {u, 1.0 - u}});
                        if (out.best_scalar < before) {
                            bs = s;
                            bt = u;
                        }
                    }
            };
            sweep(0.0, 1.0, 0.0, 1.0, 17);
            double width = 0.07;
            for (int pass = 0; pass < 2 && !out.exhausted; ++pass) {
                sweep(std::max(0.0, bs - width), std::min(1.0, bs + width),
                      std::max(0.0, bt - width), std::min(1.0, bt + width), 9);
                width /= 4.0;
            }
            continue;
        }
        // Larger alphabets: seeded random starts plus greedy coordinate steps.
        for (std::size_t s = 0; s < std::max<std::size_t>(search.starts, 4); ++s) {
            Rng rng(derive_seed(search.seed, {0x6963u, s, shape.c1, shape.c2}));
            std::vector<std::vector<double>> pwx1(n1, std::vector<double>(w));
            for (auto& row : pwx1) {
                double sum = 0.0;
                for (double& v : row) {
                    v = -std::log(std::max(rng.next_unit(), 1e-12));
                    sum += v;
                }
                for (double& v : row) v /= sum;
            }
            double step = 0.25;
            double cur = consider(shape, pwx1);
            while (step > 1e-3 && evals < search.eval_budget) {
                bool improved = false;
                for (std::size_t x1 = 0; x1 < n1 && evals < search.eval_budget; ++x1)
                    for (std::size_t a = 0; a < w; ++a)
                        for (std::size_t b = 0; b < w; ++b) {
                            if (a == b || pwx1[x1][a] < step) continue;
                            pwx1[x1][a] -= step;
                            pwx1[x1][b] += step;
                            const double v = consider(shape, pwx1);
                            if (v < cur - 1e-12) {
                                cur = v;
                                improved = true;
                            } else {
                                pwx1[x1][a] += step;
                                pwx1[x1][b] -= step;
                            }
                        }
                if (!improved) step /= 2.0;
            }
            if (evals >= search.eval_budget) out.exhausted = true;
        }
    }
    return out;
}

}  // namespace

IcUpperResult upper_model_ic(const ChannelGeometry& g, const Dmc& ch, int variant,
                             std::size_t grid_points, const AuxSearch& search, double delta) {
    if (ch.role != ChannelRole::IC22) throw ParseError("upper_model_ic: channel is not an IC");
    if (variant != 1 && variant != 2) throw ParseError("upper_model_ic: variant must be 1 or 2");
    if (delta <= 0.0) throw ParseError("upper_model_ic: delta must be > 0");

    const auto grid = simplex_grid(ch.in_size(), grid_points);
    std::array<double, 4> need{0.0, 0.0, 0.0, 0.0};
    bool exhausted = false;
    for (const auto& p : grid) {
        IcPointSearch ps = ic_search_point(ch, p, variant, search);
        exhausted = exhausted || ps.exhausted;
        const auto induced = ic_induced(ps.best_q, variant);
        for (std::size_t k = 0; k < 4; ++k) need[k] = std::max(need[k], induced[k]);
    }

    IcUpperResult res;
    res.variant = variant;
    res.budget_exhausted = exhausted;
    const auto keys = ic_keys(g, variant);
    for (std::size_t k = 0; k < 4; ++k)
        res.rates.entries[keys[k]] = Cap(need[k] + delta);
    res.model = build_model(g, res.rates);
    res.check = check_upper_conditions(ch, g, res.rates, refined(grid_points), search);
    return res;
}

// ---------------------------------------------------------------------------
// check_upper_conditions
// ---------------------------------------------------------------------------

CheckReport check_upper_conditions(const Dmc& ch, const ChannelGeometry& g,
                                   const RateVector& rates, std::size_t grid_points,
                                   const AuxSearch& search, std::optional<double> mac_budget) {
    CheckReport rep;
    rep.grid_points = grid_points;
    const double kBig = 1e18;

    if (ch.role == ChannelRole::P2P) {
        const double r = rates.get(EdgeKey({g.v1[0]}, {g.v2[0]})).finite_or(kBig);
        CheckLine line{"R >= I(X;Y)", std::numeric_limits<double>::infinity(), {}};
        for (const auto& p : simplex_grid(ch.in_size(), grid_points)) {
            JointPmf j = ch.joint(Pmf::from_probs(p));
            const double s = r - mutual_information(j, {"X"}, {"Y"});
            if (s < line.min_slack) {
                line.min_slack = s;
                line.argmin_input = p;
            }
        }
        rep.lines.push_back(std::move(line));
        return rep;
    }

    if (ch.role == ChannelRole::BC2) {
        const double r0 = rates.get(EdgeKey({g.v1[0]}, {g.v2[0], g.v2[1]})).finite_or(kBig);
        const double r1 = rates.get(EdgeKey({g.v1[0]}, {g.v2[0]})).finite_or(kBig);
        CheckLine l0{"R_common >= I(X;Y2)", std::numeric_limits<double>::infinity(), {}};
        CheckLine l1{"R_common + R_private >= I(X;Y1,Y2)",
                     std::numeric_limits<double>::infinity(),
                     {}};
        for (const auto& p : simplex_grid(ch.in_size(), grid_points)) {
            JointPmf j = ch.joint(Pmf::from_probs(p));
            const double s0 = r0 - mutual_information(j, {"X"}, {"Y2"});
            const double s1 = r0 + r1 - mutual_information(j, {"X"}, {"Y1", "Y2"});
            if (s0 < l0.min_slack) { l0.min_slack = s0; l0.argmin_input = p; }
            if (s1 < l1.min_slack) { l1.min_slack = s1; l1.argmin_input = p; }
        }
        rep.lines.push_back(std::move(l0));
        rep.lines.push_back(std::move(l1));
        return rep;
    }

    if (ch.role == ChannelRole::MAC2) {
        const double r1 = rates.get(EdgeKey({g.v1[0]}, {g.v2[0]})).finite_or(kBig);
        const double budget = mac_budget.value_or(r1);
        const double rm =
            rates.get(EdgeKey({g.v1[0], g.v1[1]}, {g.v2[0]})).finite_or(kBig);
        CheckLine line{"R_merged >= I(X1,X2;Y|U) with I(X1;U) <= R_direct",
                       std::numeric_limits<double>::infinity(),
                       {}};
        for (const auto& p : simplex_grid(ch.in_size(), grid_points)) {
            const double v = mac_conditional_info_min(ch, p, budget, search);
            const double s = rm - v;
            if (s < line.min_slack) {
                line.min_slack = s;
                line.argmin_input = p;
            }
        }
        rep.lines.push_back(std::move(line));
        return rep;
    }

    // Interference channel: detect the variant from which keys are present.
    const int i1 = g.v1[0], i2 = g.v1[1], j2 = g.v2[1];
    int variant = 1;
    if (rates.entries.count(EdgeKey({i1}, {j2})) || rates.entries.count(EdgeKey({i1, i2}, {j2})))
        variant = 2;
    const auto keys = ic_keys(g, variant);
    std::array<double, 4> rv{};
    for (std::size_t k = 0; k < 4; ++k) rv[k] = rates.get(keys[k]).finite_or(kBig);

    static const char* kV1Names[4] = {"R_a + R_b >= I(X1;U1,U2)", "R_b >= I(X1;U2)",
                                      "R_c + R_d >= I(..Y1|U,Y2) + I(..Y2|U2)",
                                      "R_d >= I(X1,X2;Y2|U2)"};
    static const char* kV2Names[4] = {"R_b >= I(X1;U1)", "R_b + R_e >= I(X1;U1,U2)",
                                      "R_d >= I(X1,X2;Y1|U1)",
                                      "R_d + R_f >= I(..Y1|U1) + I(..Y2|U1,U2,Y1)"};
    std::array<CheckLine, 4> lines;
    for (std::size_t k = 0; k < 4; ++k)
        lines[k] = {variant == 1 ? kV1Names[k] : kV2Names[k],
                    std::numeric_limits<double>::infinity(),
                    {}};
    for (const auto& p : simplex_grid(ch.in_size(), grid_points)) {
        IcPointSearch ps = ic_search_point(ch, p, variant, search);
        const IcQuantities& q = ps.best_q;
        std::array<double, 4> slack;
        if (variant == 1) {
            slack = {rv[0] + rv[1] - q.t1, rv[1] - q.t2, rv[2] + rv[3] - q.t3, rv[3] - q.t4};
        } else {
            slack = {rv[0] - q.t1, rv[0] + rv[1] - q.t2, rv[2] - q.t3,
                     rv[2] + rv[3] - (q.t3 + q.t4)};
        }
        for (std::size_t k = 0; k < 4; ++k)
            if (slack[k] < lines[k].min_slack) {
                lines[k].min_slack = slack[k];
                lines[k].argmin_input = p;
            }
    }
    for (auto& l : lines) rep.lines.push_back(std::move(l));
    return rep;
}

// ---------------------------------------------------------------------------
// Gaussian closed forms
// ---------------------------------------------------------------------------

static RateVector with_slack(const RateVector& r, double delta) {
    RateVector out;
    for (const auto& [k, cap] : r.entries)
        out.entries[k] = cap.is_inf ? cap : Cap(cap.value + delta);
    return out;
}

static void reject_if_upper_below_lower(const ModelPair& mp) {
    for (const auto& [k, lo] : mp.lower_rates.entries) {
        auto it = mp.upper_rates.entries.find(k);
        if (it == mp.upper_rates.entries.end()) continue;
        if (it->second < lo)
            throw CheckError("model pair rejected: upper rate below lower on " + k.to_string());
    }
}

ModelPair gaussian_bc_models(const ChannelGeometry& g, const GaussianChannelSpec& spec,
                             double delta) {
    if (spec.kind != GaussianChannelSpec::Kind::BC)
        throw ParseError("gaussian_bc_models: spec is not a Gaussian BC");
    if (delta <= 0.0) throw ParseError("gaussian_bc_models: delta must be > 0");

    const double m1 = spec.N1 / (spec.a1 * spec.a1);
    const double m2 = spec.N2 / (spec.a2 * spec.a2);
    const double num = std::pow(std::sqrt(m2) - spec.rho * std::sqrt(m1), 2);
    const double den = std::pow(1.0 - spec.rho, 2) * (spec.P + m2);
    if (den < 1e-300)
        throw ParseError("gaussian_bc_models: rho = 1 with equal input-referred noises "
                         "(division by zero in the power split)");
    const double k = num / den;  // k = 1 - alpha, the stronger receiver's power share
    if (k > 1.0 + 1e-12)
        throw ParseError("gaussian_bc_models: power split outside [0,1]; no closed-form model "
                         "for this correlation");

    const double kc = std::min(k, 1.0);
    const double r1 = 0.5 * std::log2(1.0 + kc * spec.P / m1);
    const double r0 = 0.5 * std::log2(1.0 + (1.0 - kc) * spec.P / (kc * spec.P + m2));
    const double r0u = 0.5 * std::log2(1.0 + spec.P / m2);

    ModelPair mp;
    mp.slack = delta;
    mp.lower_rates.set({g.v1[0]}, {g.v2[0], g.v2[1]}, Cap(r0));
    mp.lower_rates.set({g.v1[0]}, {g.v2[0]}, Cap(r1));
    mp.upper_rates.set({g.v1[0]}, {g.v2[0], g.v2[1]}, Cap(r0u));
    mp.upper_rates.set({g.v1[0]}, {g.v2[0]}, Cap(r1));  // private rates coincide
    reject_if_upper_below_lower(mp);
    mp.lower_model = build_model(g, mp.lower_rates);
    mp.upper_model = build_model(g, with_slack(mp.upper_rates, delta));
    mp.notes.push_back("superposition power split with matched private rates");
    mp.notes.push_back("common-rate gap = (1/2)log2(1 + kP/m2), k = stronger share");
    return mp;
}

ModelPair gaussian_mac_models(const ChannelGeometry& g, const GaussianChannelSpec& spec,
                              double delta) {
    if (spec.kind != GaussianChannelSpec::Kind::MAC)
        throw ParseError("gaussian_mac_models: spec is not a Gaussian MAC");
    if (delta <= 0.0) throw ParseError("gaussian_mac_models: delta must be > 0");

    const double r1 = 0.5 * std::log2(1.0 + spec.P1 / spec.N);
    const double r2 = 0.5 * std::log2(1.0 + spec.P2 / (spec.P1 + spec.N));
    const double merged =
        0.5 * std::log2((std::pow(std::sqrt(spec.P1) + std::sqrt(spec.P2), 2) + spec.N) /
                        (spec.P1 + spec.N));

    ModelPair mp;
    mp.slack = delta;
    mp.lower_rates.set({g.v1[0]}, {g.v2[0]}, Cap(r1));
    mp.lower_rates.set({g.v1[1]}, {g.v2[0]}, Cap(r2));
    mp.upper_rates.set({g.v1[0]}, {g.v2[0]}, Cap(r1));
    mp.upper_rates.set({g.v1[0], g.v1[1]}, {g.v2[0]}, Cap(merged));
    reject_if_upper_below_lower(mp);
    mp.lower_model = build_model(g, mp.lower_rates);
    mp.upper_model = build_model(g, with_slack(mp.upper_rates, delta));
    mp.notes.push_back("corner-point lower model; dependent-description upper model");
    mp.notes.push_back("merged-edge gap = (1/2)log2(((sqrt(P1)+sqrt(P2))^2+N)/(P1+P2+N))");
    return mp;
}

RateVector gaussian_mac_upper_rates_swapped(const ChannelGeometry& g,
                                            const GaussianChannelSpec& spec) {
    if (spec.kind != GaussianChannelSpec::Kind::MAC)
        throw ParseError("gaussian_mac_upper_rates_swapped: spec is not a Gaussian MAC");
    RateVector r;
    r.set({g.v1[1]}, {g.v2[0]}, Cap(0.5 * std::log2(1.0 + spec.P2 / spec.N)));
    r.set({g.v1[0], g.v1[1]}, {g.v2[0]},
          Cap(0.5 * std::log2((std::pow(std::sqrt(spec.P1) + std::sqrt(spec.P2), 2) + spec.N) /
                              (spec.P2 + spec.N))));
    return r;
}

}  // namespace netcap
