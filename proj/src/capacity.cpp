#include "netcap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "netcap/errors.hpp"

namespace netcap {

// ---------------------------------------------------------------------------
// Blahut-Arimoto
// ---------------------------------------------------------------------------

CapacityResult blahut_arimoto(const Dmc& channel, double tol, std::size_t max_iterations,
                              std::vector<double>* objective_trace) {
    if (channel.role != ChannelRole::P2P)
        throw ParseError("blahut_arimoto: requires a p2p channel, got role " +
                         role_name(channel.role));
    if (tol <= 0.0) throw ParseError("blahut_arimoto: tolerance must be > 0");

    const std::size_t nx = channel.in_size(), ny = channel.out_size();
    std::vector<double> p(nx, 1.0 / static_cast<double>(nx));
    std::vector<double> q(ny), d(nx);

    CapacityResult res;
    double prev_objective = -1.0;

    for (std::size_t it = 1; it <= max_iterations; ++it) {
        std::fill(q.begin(), q.end(), 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) q[y] += p[x] * channel.p(x, y);

        // D_x = D(W(.|x) || q), the per-letter divergence of row x from the
        // current output law.
        double upper = 0.0, objective = 0.0, z = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            double dx = 0.0;
            for (std::size_t y = 0; y < ny; ++y) {
                const double w = channel.p(x, y);
                if (w > 0.0) dx += w * std::log2(w / q[y]);
            }
            d[x] = dx;
            upper = std::max(upper, dx);
            objective += p[x] * dx;
            z += p[x] * std::exp2(dx);
        }
        const double lower = std::log2(z);

        if (objective_trace) objective_trace->push_back(objective);
        if (objective + 1e-12 < prev_objective)
            throw ConvergenceError("blahut_arimoto: objective decreased");
        prev_objective = objective;

        res.lower_bracket = lower;
        res.upper_bracket = upper;
        res.iterations = it;

        if (upper - lower <= tol) {
            res.converged = true;
            break;
        }
        for (std::size_t x = 0; x < nx; ++x) p[x] *= std::exp2(d[x]) / z;
        // Renormalize drift.
        double sum = 0.0;
        for (double v : p) sum += v;
        for (double& v : p) v /= sum;
    }

    res.capacity = 0.5 * (res.lower_bracket + res.upper_bracket);
    std::vector<std::string> labels;
    if (channel.input_alphabets.size() == 1) labels = channel.input_alphabets[0];
    res.optimal_input = Pmf(std::move(labels), std::move(p));
    return res;
}

// ---------------------------------------------------------------------------
// Witness joints and verification
// ---------------------------------------------------------------------------

double RegionPoint::rate(const std::string& label) const {
    for (const auto& [l, r] : rates)
        if (l == label) return r;
    throw ParseError("RegionPoint: no rate labeled " + label);
}

JointPmf mac_witness_joint(const Dmc& channel, const MacWitness& w) {
    if (channel.role != ChannelRole::MAC2)
        throw ParseError("mac_witness_joint: channel is not a two-user MAC");
    const std::size_t nq = w.weights.size();
    if (nq == 0 || w.x1_dists.size() != nq || w.x2_dists.size() != nq)
        throw ParseError("mac_witness_joint: inconsistent witness");
    const std::size_t n1 = channel.input_alphabets[0].size();
    const std::size_t n2 = channel.input_alphabets[1].size();
    const std::size_t ny = channel.out_size();

    std::vector<std::string> q_labels(nq);
    for (std::size_t i = 0; i < nq; ++i) q_labels[i] = std::to_string(i);
    std::vector<Axis> axes{{"Q", q_labels},
                           {"X1", channel.input_alphabets[0]},
                           {"X2", channel.input_alphabets[1]},
                           {"Y", channel.output_alphabets[0]}};
    std::vector<double> probs(nq * n1 * n2 * ny, 0.0);
    for (std::size_t q = 0; q < nq; ++q)
        for (std::size_t x1 = 0; x1 < n1; ++x1)
            for (std::size_t x2 = 0; x2 < n2; ++x2) {
                const double base = w.weights[q] * w.x1_dists[q].probs[x1] *
                                    w.x2_dists[q].probs[x2];
                for (std::size_t y = 0; y < ny; ++y)
                    probs[((q * n1 + x1) * n2 + x2) * ny + y] =
                        base * channel.p(x1 * n2 + x2, y);
            }
    return JointPmf(std::move(axes), std::move(probs));
}

JointPmf bc_witness_joint(const Dmc& channel, const BcWitness& w) {
    if (channel.role != ChannelRole::BC2)
        throw ParseError("bc_witness_joint: channel is not a two-receiver BC");
    const std::size_t nu = w.u.size();
    if (w.x_given_u.size() != nu) throw ParseError("bc_witness_joint: inconsistent witness");
    const std::size_t nx = channel.input_alphabets[0].size();
    const std::size_t n1 = channel.output_alphabets[0].size();
    const std::size_t n2 = channel.output_alphabets[1].size();

    std::vector<std::string> u_labels(nu);
    for (std::size_t i = 0; i < nu; ++i) u_labels[i] = std::to_string(i);
    std::vector<Axis> axes{{"U", u_labels},
                           {"X", channel.input_alphabets[0]},
                           {"Y1", channel.output_alphabets[0]},
                           {"Y2", channel.output_alphabets[1]}};
    std::vector<double> probs(nu * nx * n1 * n2, 0.0);
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t x = 0; x < nx; ++x) {
            const double base = w.u.probs[u] * w.x_given_u[u].probs[x];
            for (std::size_t y1 = 0; y1 < n1; ++y1)
                for (std::size_t y2 = 0; y2 < n2; ++y2)
                    probs[((u * nx + x) * n1 + y1) * n2 + y2] =
                        base * channel.p(x, y1 * n2 + y2);
        }
    return JointPmf(std::move(axes), std::move(probs));
}

static double gaussian_bc_r1(const GaussianChannelSpec& s, double alpha) {
    const double m1 = s.N1 / (s.a1 * s.a1);
    return 0.5 * std::log2(1.0 + (1.0 - alpha) * s.P / m1);
}

static double gaussian_bc_r2(const GaussianChannelSpec& s, double alpha) {
    const double m2 = s.N2 / (s.a2 * s.a2);
    return 0.5 * std::log2(1.0 + alpha * s.P / ((1.0 - alpha) * s.P + m2));
}

double region_point_violation(const Dmc& channel, const RegionPoint& point) {
    if (const auto* mw = std::get_if<MacWitness>(&point.witness)) {
        JointPmf j = mac_witness_joint(channel, *mw);
        const double i1 = conditional_mi(j, {"X1"}, {"Y"}, {"X2", "Q"});
        const double i2 = conditional_mi(j, {"X2"}, {"Y"}, {"X1", "Q"});
        const double is = conditional_mi(j, {"X1", "X2"}, {"Y"}, {"Q"});
        const double r1 = point.rate("R1"), r2 = point.rate("R2");
        double v = 0.0;
        v = std::max(v, r1 - i1);
        v = std::max(v, r2 - i2);
        v = std::max(v, r1 + r2 - is);
        v = std::max(v, -std::min(r1, r2));  // rates must be nonnegative
        return v;
    }
    if (const auto* bw = std::get_if<BcWitness>(&point.witness)) {
        JointPmf j = bc_witness_joint(channel, *bw);
        const double r0 = mutual_information(j, {"U"}, {"Y2"});
        const double r1 = conditional_mi(j, {"X"}, {"Y1"}, {"U"});
        return std::max(std::abs(point.rate("R0") - r0), std::abs(point.rate("R1") - r1));
    }
    throw ParseError("region_point_violation: witness does not match a finite channel");
}

double region_point_violation(const GaussianChannelSpec& spec, const RegionPoint& point) {
    if (const auto* gw = std::get_if<GaussianBcWitness>(&point.witness)) {
        return std::max(std::abs(point.rate("R1") - gaussian_bc_r1(spec, gw->alpha)),
                        std::abs(point.rate("R2") - gaussian_bc_r2(spec, gw->alpha)));
    }
    if (std::get_if<GaussianMacWitness>(&point.witness)) {
        const double r1 = 0.5 * std::log2(1.0 + spec.P1 / spec.N);
        const double r2 = 0.5 * std::log2(1.0 + spec.P2 / (spec.P1 + spec.N));
        return std::max(std::abs(point.rate("R1") - r1), std::abs(point.rate("R2") - r2));
    }
    throw ParseError("region_point_violation: witness does not match a Gaussian spec");
}

// ---------------------------------------------------------------------------
// MAC points
// ---------------------------------------------------------------------------

static double clamp0(double v) { return v < 0.0 ? 0.0 : v; }

std::vector<RegionPoint> mac_lower_points(const Dmc& channel,
                                          const std::vector<double>& split_grid,
                                          std::size_t input_grid_points) {
    if (channel.role != ChannelRole::MAC2)
        throw ParseError("mac_lower_points: channel is not a two-user MAC");
    if (split_grid.empty()) throw ParseError("mac_lower_points: empty split grid");

    const auto g1 = simplex_grid(channel.input_alphabets[0].size(), input_grid_points);
    const auto g2 = simplex_grid(channel.input_alphabets[1].size(), input_grid_points);

    std::vector<RegionPoint> out;
    std::set<std::pair<long long, long long>> seen;
    auto emit = [&](double r1, double r2, const Pmf& p1, const Pmf& p2) {
        r1 = clamp0(r1);
        r2 = clamp0(r2);
        const auto key = std::make_pair(static_cast<long long>(std::llround(r1 * 1e10)),
                                        static_cast<long long>(std::llround(r2 * 1e10)));
        if (!seen.insert(key).second) return;
        RegionPoint pt;
        pt.rates = {{"R1", r1}, {"R2", r2}};
        pt.witness = MacWitness{{1.0}, {p1}, {p2}};
        out.push_back(std::move(pt));
    };

    for (const auto& v1 : g1)
        for (const auto& v2 : g2) {
            const Pmf p1 = Pmf::from_probs(v1), p2 = Pmf::from_probs(v2);
            JointPmf j = channel.joint_product(p1, p2);
            const double i1c = conditional_mi(j, {"X1"}, {"Y"}, {"X2"});
            const double i2c = conditional_mi(j, {"X2"}, {"Y"}, {"X1"});
            const double is = mutual_information(j, {"X1", "X2"}, {"Y"});
            emit(i1c, clamp0(is - i1c), p1, p2);
            emit(clamp0(is - i2c), i2c, p1, p2);
            for (double a : split_grid) {
                if (a < 0.0 || a > 1.0) throw ParseError("mac_lower_points: split outside [0,1]");
                const double r1 = a * is, r2 = (1.0 - a) * is;
                if (r1 <= i1c + 1e-12 && r2 <= i2c + 1e-12) emit(r1, r2, p1, p2);
            }
        }
    std::sort(out.begin(), out.end(), [](const RegionPoint& a, const RegionPoint& b) {
        return a.rates[0].second != b.rates[0].second ? a.rates[0].second < b.rates[0].second
                                                      : a.rates[1].second < b.rates[1].second;
    });
    return out;
}

RegionPoint mac_time_share(const Dmc& channel, const std::vector<RegionPoint>& points,
                           const std::vector<double>& weights) {
    if (points.empty() || points.size() != weights.size())
        throw ParseError("mac_time_share: points/weights mismatch");
    MacWitness combined;
    double r1 = 0.0, r2 = 0.0, wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ParseError("mac_time_share: negative weight");
        wsum += w;
    }
    if (wsum <= 0.0) throw ParseError("mac_time_share: zero total weight");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto* mw = std::get_if<MacWitness>(&points[i].witness);
        if (!mw) throw ParseError("mac_time_share: point has no MAC witness");
        const double w = weights[i] / wsum;
        for (std::size_t q = 0; q < mw->weights.size(); ++q) {
            combined.weights.push_back(w * mw->weights[q]);
            combined.x1_dists.push_back(mw->x1_dists[q]);
            combined.x2_dists.push_back(mw->x2_dists[q]);
        }
        r1 += w * points[i].rate("R1");
        r2 += w * points[i].rate("R2");
    }
    RegionPoint pt;
    pt.rates = {{"R1", r1}, {"R2", r2}};
    pt.witness = std::move(combined);
    const double viol = region_point_violation(channel, pt);
    if (viol > 1e-9)
        throw ParseError("mac_time_share: combined point violates constraints by " +
                         std::to_string(viol));
    return pt;
}

// ---------------------------------------------------------------------------
// Broadcast points
// ---------------------------------------------------------------------------

std::vector<RegionPoint> degraded_bc_lower_points(const Dmc& channel,
                                                  const std::vector<double>& aux_grid,
                                                  std::size_t input_grid_points) {
    if (channel.role != ChannelRole::BC2)
        throw ParseError("degraded_bc_lower_points: channel is not a two-receiver BC");
    const std::size_t nx = channel.input_alphabets[0].size();

    std::vector<RegionPoint> out;
    auto emit = [&](BcWitness w) {
        JointPmf j = bc_witness_joint(channel, w);
        RegionPoint pt;
        pt.rates = {{"R0", mutual_information(j, {"U"}, {"Y2"})},
                    {"R1", conditional_mi(j, {"X"}, {"Y1"}, {"U"})}};
        pt.witness = std::move(w);
        out.push_back(std::move(pt));
    };

    if (nx == 2) {
        // Symmetric binary parameterization: U uniform, X = U xor Bern(alpha).
        for (double a : aux_grid) {
            if (a < 0.0 || a > 1.0)
                throw ParseError("degraded_bc_lower_points: alpha outside [0,1]");
            BcWitness w;
            w.u = Pmf::uniform(2);
            w.x_given_u = {Pmf::from_probs({1.0 - a, a}), Pmf::from_probs({a, 1.0 - a})};
            emit(std::move(w));
        }
    } else {
        // General search: grid p(u) and each p(x|u) with |U| = |X|.
        const auto grid = simplex_grid(nx, input_grid_points);
        const std::size_t g = grid.size();
        std::vector<std::size_t> pick(nx + 1, 0);  // odometer over grid assignments
        bool done = false;
        while (!done) {
            BcWitness w;
            w.u = Pmf::from_probs(grid[pick[0]]);
            for (std::size_t u = 0; u < nx; ++u)
                w.x_given_u.push_back(Pmf::from_probs(grid[pick[u + 1]]));
            emit(std::move(w));
            done = true;
            for (std::size_t i = pick.size(); i-- > 0;) {
                if (++pick[i] < g) {
                    done = false;
                    break;
                }
                pick[i] = 0;
            }
        }
    }
    return out;
}

RegionPoint gaussian_bc_lower_point(const GaussianChannelSpec& spec, double alpha) {
    if (spec.kind != GaussianChannelSpec::Kind::BC)
        throw ParseError("gaussian_bc_lower_point: spec is not a Gaussian BC");
    if (alpha < 0.0 || alpha > 1.0) throw ParseError("gaussian_bc_lower_point: alpha in [0,1]");
    RegionPoint pt;
    pt.rates = {{"R1", gaussian_bc_r1(spec, alpha)}, {"R2", gaussian_bc_r2(spec, alpha)}};
    pt.witness = GaussianBcWitness{spec, alpha};
    return pt;
}

RegionPoint gaussian_mac_lower_corner(const GaussianChannelSpec& spec) {
    if (spec.kind != GaussianChannelSpec::Kind::MAC)
        throw ParseError("gaussian_mac_lower_corner: spec is not a Gaussian MAC");
    RegionPoint pt;
    pt.rates = {{"R1", 0.5 * std::log2(1.0 + spec.P1 / spec.N)},
                {"R2", 0.5 * std::log2(1.0 + spec.P2 / (spec.P1 + spec.N))}};
    pt.witness = GaussianMacWitness{spec};
    return pt;
}

}  // namespace netcap
