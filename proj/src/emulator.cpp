#include "netcap/emulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "netcap/errors.hpp"
#include "netcap/rng.hpp"

namespace netcap {

static constexpr double kInf = std::numeric_limits<double>::infinity();

static double safe_log2(double p) { return p < kZeroProb ? -kInf : std::log2(p); }

static double f_stat(double log_sum, int n, double h) {
    if (log_sum == -kInf) return kInf;
    return std::abs(-log_sum / static_cast<double>(n) - h);
}

double typicality_stat(const std::vector<int>& block, const Pmf& dist) {
    double h = entropy(dist), s = 0.0;
    for (int v : block) {
        if (v < 0 || static_cast<std::size_t>(v) >= dist.size())
            throw ParseError("typicality_stat: symbol outside alphabet");
        s += safe_log2(dist.probs[v]);
    }
    return f_stat(s, static_cast<int>(block.size()), h);
}

double typicality_stat(const std::vector<int>& a, const std::vector<int>& b,
                       const JointPmf& joint) {
    if (joint.axes.size() != 2) throw ParseError("typicality_stat: joint must have two axes");
    if (a.size() != b.size()) throw ParseError("typicality_stat: block length mismatch");
    const std::size_t nb = joint.axes[1].labels.size();
    double h = entropy(joint), s = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l)
        s += safe_log2(joint.probs[a[l] * nb + b[l]]);
    return f_stat(s, static_cast<int>(a.size()), h);
}

// ---------------------------------------------------------------------------
// Empirical stand-ins for the typicality radius a(eps): the
// (1 - 2^(-6 N eps)) empirical quantile of the relevant f-statistics, scaled
// by (1 + eps).  Cached per (channel, dist, N, eps, stat set); the sampling
// stream is derived from the cache key itself, so estimates do not depend on
// the caller's seed or on call order.
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv_bytes(std::uint64_t h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_doubles(std::uint64_t h, const std::vector<double>& v) {
    return fnv_bytes(h, v.data(), v.size() * sizeof(double));
}

std::map<std::uint64_t, double>& a_cache() {
    static std::map<std::uint64_t, double> cache;
    return cache;
}
std::mutex& a_cache_mutex() {
    static std::mutex m;
    return m;
}

double empirical_quantile(std::vector<double> samples, double level) {
    std::sort(samples.begin(), samples.end());
    const double pos = std::ceil(level * static_cast<double>(samples.size())) - 1.0;
    const std::size_t idx =
        static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(samples.size() - 1)));
    return samples[idx];
}

std::vector<double> cum_of(const std::vector<double>& probs) {
    std::vector<double> c(probs.size());
    double s = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        s += probs[i];
        c[i] = s;
    }
    return c;
}

// Draw a length-n block of symbol indices from per-symbol cumulative `cum`.
std::vector<int> draw_block(Rng& rng, const std::vector<double>& cum, int n) {
    std::vector<int> b(n);
    for (int l = 0; l < n; ++l) b[l] = static_cast<int>(rng.categorical_from_cum(cum));
    return b;
}

std::size_t codeword_count_for(double rate, int n) {
    const double bits = rate * static_cast<double>(n);
    if (bits > 60.0)
        throw BudgetError("emulator: codebook of 2^" + std::to_string(bits) +
                              " codewords is far beyond any memory budget",
                          static_cast<std::size_t>(-1), 0);
    return static_cast<std::size_t>(std::floor(std::exp2(bits) + 1e-9));
}

}  // namespace

// ---------------------------------------------------------------------------
// Point-to-point emulator
// ---------------------------------------------------------------------------

P2pEmulator build_p2p_emulator(const Dmc& channel, const Pmf& input, double rate,
                               const TypicalityParams& params, std::uint64_t seed) {
    if (channel.role != ChannelRole::P2P)
        throw ParseError("build_p2p_emulator: channel is not point-to-point");
    if (input.size() != channel.in_size())
        throw ParseError("build_p2p_emulator: input distribution size mismatch");
    if (rate <= 0.0) throw ParseError("build_p2p_emulator: rate must be > 0");
    if (params.N < 1) throw ParseError("build_p2p_emulator: block length must be >= 1");

    P2pEmulator em;
    em.channel = channel;
    em.input = input;
    em.params = params;

    const std::size_t nx = channel.in_size(), ny = channel.out_size();
    const int n = params.N;

    const std::size_t count = codeword_count_for(rate, n);
    const std::size_t required = count * static_cast<std::size_t>(n);
    if (required > params.mem_budget)
        throw BudgetError("build_p2p_emulator: codebook needs " + std::to_string(required) +
                              " symbols but the budget is " + std::to_string(params.mem_budget),
                          required, params.mem_budget);

    // Per-symbol log tables.
    Pmf q = channel.output_marginal(input);
    em.log_px.resize(nx);
    em.log_qy.resize(ny);
    em.log_pxy.resize(nx * ny);
    em.log_w.resize(nx * ny);
    for (std::size_t x = 0; x < nx; ++x) em.log_px[x] = safe_log2(input.probs[x]);
    for (std::size_t y = 0; y < ny; ++y) em.log_qy[y] = safe_log2(q.probs[y]);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) {
            em.log_pxy[x * ny + y] = safe_log2(input.probs[x] * channel.p(x, y));
            em.log_w[x * ny + y] = safe_log2(channel.p(x, y));
        }
    em.h_x = entropy(input);
    em.h_y = entropy(q);
    double h_xy = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) h_xy += nlog2(input.probs[x] * channel.p(x, y));
    em.h_xy = h_xy;

    // Empirical typicality radius, cached and seeded from the key.
    std::uint64_t key = 0xcbf29ce484222325ULL;
    key = hash_doubles(key, channel.transition);
    key = hash_doubles(key, input.probs);
    key = fnv_bytes(key, &n, sizeof(n));
    key = fnv_bytes(key, &params.eps, sizeof(params.eps));
    const char tag[] = "p2p";
    key = fnv_bytes(key, tag, sizeof(tag));
    {
        std::lock_guard<std::mutex> lock(a_cache_mutex());
        auto it = a_cache().find(key);
        if (it != a_cache().end()) em.a1 = it->second;
    }
    if (em.a1 == 0.0) {
        Rng rng(mix64(key));
        const auto cx = cum_of(input.probs);
        std::vector<std::vector<double>> cw(nx);
        for (std::size_t x = 0; x < nx; ++x) {
            std::vector<double> row(ny);
            for (std::size_t y = 0; y < ny; ++y) row[y] = channel.p(x, y);
            cw[x] = cum_of(row);
        }
        std::vector<double> g(params.a_samples);
        for (std::size_t s = 0; s < params.a_samples; ++s) {
            double sy = 0.0, sxy = 0.0;
            for (int l = 0; l < n; ++l) {
                const int x = static_cast<int>(rng.categorical_from_cum(cx));
                const int y = static_cast<int>(rng.categorical_from_cum(cw[x]));
                sy += em.log_qy[y];
                sxy += em.log_pxy[x * ny + y];
            }
            g[s] = std::max(f_stat(sy, n, em.h_y), f_stat(sxy, n, em.h_xy));
        }
        const double level = 1.0 - std::exp2(-6.0 * n * params.eps);
        em.a1 = (1.0 + params.eps) * empirical_quantile(std::move(g), level);
        std::lock_guard<std::mutex> lock(a_cache_mutex());
        a_cache()[key] = em.a1;
    }
    em.params.a1 = em.a1;

    // Decoder codebook: i.i.d. draws from the output marginal, one derived
    // stream per codeword.
    em.book.rate = rate;
    em.book.codeword_count = count;
    em.book.stage = EmulatorCodebook::Stage::Single;
    em.book.seed = seed;
    em.book.codewords.reserve(count);
    const auto cq = cum_of(q.probs);
    for (std::size_t k = 0; k < count; ++k) {
        Rng rng(derive_seed(seed, {0x6377u, k}));
        em.book.codewords.push_back(draw_block(rng, cq, n));
    }
    return em;
}

EmulateResult emulate(const P2pEmulator& em, const std::vector<int>& x_block,
                      std::uint64_t seed) {
    const int n = em.params.N;
    if (static_cast<int>(x_block.size()) != n)
        throw ParseError("emulate: input block has wrong length");
    const std::size_t ny = em.channel.out_size();

    EmulateResult res;
    double sx = 0.0;
    for (int v : x_block) sx += em.log_px[v];
    const bool x_typical = f_stat(sx, n, em.h_x) <= em.params.eps;

    std::vector<std::size_t> matches;
    if (x_typical) {
        for (std::size_t k = 0; k < em.book.codewords.size(); ++k) {
            const auto& y = em.book.codewords[k];
            double sy = 0.0, sxy = 0.0;
            for (int l = 0; l < n; ++l) {
                sy += em.log_qy[y[l]];
                sxy += em.log_pxy[x_block[l] * ny + y[l]];
            }
            if (f_stat(sy, n, em.h_y) <= em.a1 && f_stat(sxy, n, em.h_xy) <= em.a1)
                matches.push_back(k);
        }
    }

    res.match_count = matches.size();
    if (matches.empty()) {
        res.failure = true;
        res.chosen_index = 0;  // fallback: the first codeword
        res.y = em.book.codewords[0];
        res.log_ratio_stat = kInf;
        return res;
    }
    Rng rng(derive_seed(seed, {0x7069636bu}));
    res.chosen_index = matches[rng.uniform_index(matches.size())];
    res.y = em.book.codewords[res.chosen_index];

    std::size_t equal = 0;
    for (std::size_t k : matches)
        if (em.book.codewords[k] == res.y) ++equal;
    double sw = 0.0;
    for (int l = 0; l < n; ++l) sw += em.log_w[x_block[l] * ny + res.y[l]];
    res.log_ratio_stat =
        (std::log2(static_cast<double>(equal)) - std::log2(static_cast<double>(matches.size())) -
         sw) /
        static_cast<double>(n);
    return res;
}

// ---------------------------------------------------------------------------
// Broadcast emulator
// ---------------------------------------------------------------------------

BcEmulator build_bc_emulator(const Dmc& channel, const Pmf& input, double r0, double r1,
                             const TypicalityParams& params, std::uint64_t seed) {
    if (channel.role != ChannelRole::BC2)
        throw ParseError("build_bc_emulator: channel is not a two-receiver BC");
    if (input.size() != channel.in_size())
        throw ParseError("build_bc_emulator: input distribution size mismatch");
    if (r0 <= 0.0 || r1 <= 0.0) throw ParseError("build_bc_emulator: rates must be > 0");

    BcEmulator em;
    em.channel = channel;
    em.input = input;
    em.params = params;

    const int n = params.N;
    const std::size_t nx = channel.in_size();
    const std::size_t n1 = channel.output_alphabets[0].size();
    const std::size_t n2 = channel.output_alphabets[1].size();

    em.count0 = codeword_count_for(r0, n);
    em.count1 = codeword_count_for(r1, n);
    const std::size_t required = (em.count0 + em.count0 * em.count1) * static_cast<std::size_t>(n);
    if (required > params.mem_budget)
        throw BudgetError("build_bc_emulator: codebooks need " + std::to_string(required) +
                              " symbols but the budget is " + std::to_string(params.mem_budget),
                          required, params.mem_budget);

    // Joint tables p(x,y1,y2) and the marginals the two stages test against.
    std::vector<double> p_y2(n2, 0.0), p_xy2(nx * n2, 0.0), p_y1y2(n1 * n2, 0.0);
    em.log_w.resize(nx * n1 * n2);
    double h_xy2 = 0.0, h_y1y2 = 0.0, h_xy1y2 = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y1 = 0; y1 < n1; ++y1)
            for (std::size_t y2 = 0; y2 < n2; ++y2) {
                const double w = channel.p(x, y1 * n2 + y2);
                const double j = input.probs[x] * w;
                em.log_w[(x * n1 + y1) * n2 + y2] = safe_log2(w);
                p_y2[y2] += j;
                p_xy2[x * n2 + y2] += j;
                p_y1y2[y1 * n2 + y2] += j;
                h_xy1y2 += nlog2(j);
            }
    for (double v : p_xy2) h_xy2 += nlog2(v);
    for (double v : p_y1y2) h_y1y2 += nlog2(v);

    em.log_px.resize(nx);
    for (std::size_t x = 0; x < nx; ++x) em.log_px[x] = safe_log2(input.probs[x]);
    em.log_py2.resize(n2);
    for (std::size_t y2 = 0; y2 < n2; ++y2) em.log_py2[y2] = safe_log2(p_y2[y2]);
    em.log_pxy2.resize(nx * n2);
    for (std::size_t i = 0; i < nx * n2; ++i) em.log_pxy2[i] = safe_log2(p_xy2[i]);
    em.log_py1y2.resize(n1 * n2);
    for (std::size_t i = 0; i < n1 * n2; ++i) em.log_py1y2[i] = safe_log2(p_y1y2[i]);
    em.log_pxy1y2.resize(nx * n1 * n2);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y1 = 0; y1 < n1; ++y1)
            for (std::size_t y2 = 0; y2 < n2; ++y2)
                em.log_pxy1y2[(x * n1 + y1) * n2 + y2] =
                    safe_log2(input.probs[x] * channel.p(x, y1 * n2 + y2));
    em.h_x = entropy(input);
    double h_y2 = 0.0;
    for (double v : p_y2) h_y2 += nlog2(v);
    em.h_y2 = h_y2;
    em.h_xy2 = h_xy2;
    em.h_y1y2 = h_y1y2;
    em.h_xy1y2 = h_xy1y2;

    // Empirical radii for the two stages (cached, key-seeded).
    std::uint64_t key = 0xcbf29ce484222325ULL;
    key = hash_doubles(key, channel.transition);
    key = hash_doubles(key, input.probs);
    key = fnv_bytes(key, &n, sizeof(n));
    key = fnv_bytes(key, &params.eps, sizeof(params.eps));
    key = fnv_bytes(key, &params.eps2, sizeof(params.eps2));
    const char tag[] = "bc";
    key = fnv_bytes(key, tag, sizeof(tag));
    bool cached = false;
    {
        std::lock_guard<std::mutex> lock(a_cache_mutex());
        auto it1 = a_cache().find(key);
        auto it2 = a_cache().find(key ^ 1ULL);
        if (it1 != a_cache().end() && it2 != a_cache().end()) {
            em.a1 = it1->second;
            em.a2 = it2->second;
            cached = true;
        }
    }
    if (!cached) {
        Rng rng(mix64(key));
        const auto cx = cum_of(input.probs);
        std::vector<std::vector<double>> cw(nx);
        for (std::size_t x = 0; x < nx; ++x) {
            std::vector<double> row(n1 * n2);
            for (std::size_t i = 0; i < n1 * n2; ++i) row[i] = channel.p(x, i);
            cw[x] = cum_of(row);
        }
        std::vector<double> g1(params.a_samples), g2(params.a_samples);
        for (std::size_t s = 0; s < params.a_samples; ++s) {
            double sy2 = 0.0, sxy2 = 0.0, sy1y2 = 0.0, sxy1y2 = 0.0;
            for (int l = 0; l < n; ++l) {
                const int x = static_cast<int>(rng.categorical_from_cum(cx));
                const int pair = static_cast<int>(rng.categorical_from_cum(cw[x]));
                const int y1 = pair / static_cast<int>(n2), y2 = pair % static_cast<int>(n2);
                sy2 += em.log_py2[y2];
                sxy2 += em.log_pxy2[x * n2 + y2];
                sy1y2 += em.log_py1y2[y1 * n2 + y2];
                sxy1y2 += em.log_pxy1y2[(x * n1 + y1) * n2 + y2];
            }
            g1[s] = std::max(f_stat(sy2, n, em.h_y2), f_stat(sxy2, n, em.h_xy2));
            g2[s] = std::max({f_stat(sy2, n, em.h_y2), f_stat(sy1y2, n, em.h_y1y2),
                              f_stat(sxy2, n, em.h_xy2), f_stat(sxy1y2, n, em.h_xy1y2)});
        }
        em.a1 = (1.0 + params.eps) *
                empirical_quantile(std::move(g1), 1.0 - std::exp2(-6.0 * n * params.eps));
        em.a2 = (1.0 + params.eps2) *
                empirical_quantile(std::move(g2), 1.0 - std::exp2(-6.0 * n * params.eps2));
        std::lock_guard<std::mutex> lock(a_cache_mutex());
        a_cache()[key] = em.a1;
        a_cache()[key ^ 1ULL] = em.a2;
    }
    em.params.a1 = em.a1;
    em.params.a2 = em.a2;

    // Stage-1 codebook over Y2.
    em.common.rate = r0;
    em.common.codeword_count = em.count0;
    em.common.stage = EmulatorCodebook::Stage::BcCommon;
    em.common.seed = seed;
    const auto cq2 = cum_of(p_y2);
    for (std::size_t k = 0; k < em.count0; ++k) {
        Rng rng(derive_seed(seed, {0x626330u, k}));
        em.common.codewords.push_back(draw_block(rng, cq2, n));
    }

    // Stage-2 codebooks: p(y1 | y2) along each common codeword.
    std::vector<std::vector<double>> c_y1_given_y2(n2);
    for (std::size_t y2 = 0; y2 < n2; ++y2) {
        std::vector<double> row(n1, 0.0);
        for (std::size_t y1 = 0; y1 < n1; ++y1)
            row[y1] = p_y2[y2] > 0.0 ? p_y1y2[y1 * n2 + y2] / p_y2[y2] : 0.0;
        if (p_y2[y2] == 0.0) row.assign(n1, 1.0 / static_cast<double>(n1));
        c_y1_given_y2[y2] = cum_of(row);
    }
    em.privates.resize(em.count0 * em.count1);
    for (std::size_t w0 = 0; w0 < em.count0; ++w0)
        for (std::size_t w1 = 0; w1 < em.count1; ++w1) {
            Rng rng(derive_seed(seed, {0x626331u, w0, w1}));
            std::vector<int> y1(n);
            for (int l = 0; l < n; ++l)
                y1[l] = static_cast<int>(
                    rng.categorical_from_cum(c_y1_given_y2[em.common.codewords[w0][l]]));
            em.privates[w0 * em.count1 + w1] = std::move(y1);
        }
    return em;
}

BcEmulateResult bc_emulate(const BcEmulator& em, const std::vector<int>& x_block,
                           std::uint64_t seed) {
    const int n = em.params.N;
    if (static_cast<int>(x_block.size()) != n)
        throw ParseError("bc_emulate: input block has wrong length");
    const std::size_t n1 = em.channel.output_alphabets[0].size();
    const std::size_t n2 = em.channel.output_alphabets[1].size();

    BcEmulateResult res;
    double sx = 0.0;
    for (int v : x_block) sx += em.log_px[v];
    const bool x_typical = f_stat(sx, n, em.h_x) <= em.params.eps;

    // Stage 1: pick a common codeword jointly typical with x under (X,Y2).
    std::vector<std::size_t> matches0;
    if (x_typical) {
        for (std::size_t k = 0; k < em.common.codewords.size(); ++k) {
            const auto& y2 = em.common.codewords[k];
            double sy2 = 0.0, sxy2 = 0.0;
            for (int l = 0; l < n; ++l) {
                sy2 += em.log_py2[y2[l]];
                sxy2 += em.log_pxy2[x_block[l] * n2 + y2[l]];
            }
            if (f_stat(sy2, n, em.h_y2) <= em.a1 && f_stat(sxy2, n, em.h_xy2) <= em.a1)
                matches0.push_back(k);
        }
    }
    res.stage1_matches = matches0.size();
    if (matches0.empty()) {
        res.stage1_failure = true;
        res.w0 = 0;
    } else {
        Rng rng(derive_seed(seed, {0x73316bu}));
        res.w0 = matches0[rng.uniform_index(matches0.size())];
    }
    const auto& y2 = em.common.codewords[res.w0];

    // Stage 2: pick a private codeword jointly typical under (X,Y1,Y2).
    std::vector<std::size_t> matches1;
    for (std::size_t w1 = 0; w1 < em.count1; ++w1) {
        const auto& y1 = em.privates[res.w0 * em.count1 + w1];
        double sy1y2 = 0.0, sxy1y2 = 0.0, sy2s = 0.0, sxy2 = 0.0;
        for (int l = 0; l < n; ++l) {
            sy2s += em.log_py2[y2[l]];
            sxy2 += em.log_pxy2[x_block[l] * n2 + y2[l]];
            sy1y2 += em.log_py1y2[y1[l] * n2 + y2[l]];
            sxy1y2 += em.log_pxy1y2[(x_block[l] * n1 + y1[l]) * n2 + y2[l]];
        }
        if (f_stat(sy2s, n, em.h_y2) <= em.a2 && f_stat(sy1y2, n, em.h_y1y2) <= em.a2 &&
            f_stat(sxy2, n, em.h_xy2) <= em.a2 && f_stat(sxy1y2, n, em.h_xy1y2) <= em.a2)
            matches1.push_back(w1);
    }
    res.stage2_matches = matches1.size();
    if (matches1.empty()) {
        res.stage2_failure = true;
        res.w1 = 0;
    } else {
        Rng rng(derive_seed(seed, {0x73326bu}));
        res.w1 = matches1[rng.uniform_index(matches1.size())];
    }
    res.y1 = em.privates[res.w0 * em.count1 + res.w1];
    res.y2 = y2;
    return res;
}

// ---------------------------------------------------------------------------
// Threshold experiments
// ---------------------------------------------------------------------------

std::vector<ExperimentRow> threshold_experiment(const Dmc& channel, const Pmf& input,
                                                const std::vector<double>& rate_list,
                                                const std::vector<int>& n_list,
                                                std::size_t trials, std::uint64_t seed,
                                                const std::vector<double>& nu_list,
                                                TypicalityParams params) {
    if (trials < 100) throw ParseError("threshold_experiment: need at least 100 trials");
    if (rate_list.empty() || n_list.empty())
        throw ParseError("threshold_experiment: empty rate or blocklength list");

    const std::size_t nx = channel.in_size(), ny = channel.out_size();
    const auto cx = cum_of(input.probs);
    std::vector<std::vector<double>> cw(nx);
    for (std::size_t x = 0; x < nx; ++x) {
        std::vector<double> row(ny);
        for (std::size_t y = 0; y < ny; ++y) row[y] = channel.p(x, y);
        cw[x] = cum_of(row);
    }

    std::vector<ExperimentRow> rows;
    for (std::size_t i = 0; i < rate_list.size(); ++i)
        for (std::size_t j = 0; j < n_list.size(); ++j) {
            params.N = n_list[j];
            P2pEmulator em = build_p2p_emulator(channel, input, rate_list[i], params,
                                                derive_seed(seed, {0x636264u, i, j}));
            const int n = params.N;

            ExperimentRow row;
            row.rate = rate_list[i];
            row.block_length = n;
            row.stats.trials = trials;
            row.stats.exceed_rates.reserve(nu_list.size());

            std::size_t failures = 0, restricted = 0;
            std::vector<std::size_t> exceed(nu_list.size(), 0);
            std::vector<double> pooled(nx * ny, 0.0);
            const double restrict_cut =
                std::exp2(-params.restriction_threshold * n * params.eps);

            for (std::size_t t = 0; t < trials; ++t) {
                Rng xr(derive_seed(seed, {0x78u, i, j, t}));
                std::vector<int> x = draw_block(xr, cx, n);
                EmulateResult res = emulate(em, x, derive_seed(seed, {0x70u, i, j, t}));
                if (res.failure) {
                    ++failures;
                } else {
                    ++row.stats.successes;
                    for (int l = 0; l < n; ++l) pooled[x[l] * ny + res.y[l]] += 1.0;
                }
                for (std::size_t k = 0; k < nu_list.size(); ++k)
                    if (res.log_ratio_stat > nu_list[k]) ++exceed[k];

                // Restricted-set diagnostic: estimate the channel's atypicality
                // mass conditioned on this input block.
                Rng rr(derive_seed(seed, {0x72u, i, j, t}));
                int atypical = 0;
                const int kDraws = 64;
                for (int d = 0; d < kDraws; ++d) {
                    double sy = 0.0, sxy = 0.0;
                    for (int l = 0; l < n; ++l) {
                        const int y = static_cast<int>(rr.categorical_from_cum(cw[x[l]]));
                        sy += em.log_qy[y];
                        sxy += em.log_pxy[x[l] * ny + y];
                    }
                    if (!(f_stat(sy, n, em.h_y) <= em.a1 && f_stat(sxy, n, em.h_xy) <= em.a1))
                        ++atypical;
                }
                if (static_cast<double>(atypical) / kDraws <= restrict_cut) ++restricted;
            }

            row.stats.encoder_failure_rate =
                static_cast<double>(failures) / static_cast<double>(trials);
            row.stats.restricted_frac =
                static_cast<double>(restricted) / static_cast<double>(trials);
            for (std::size_t k = 0; k < nu_list.size(); ++k)
                row.stats.exceed_rates.emplace_back(
                    nu_list[k], static_cast<double>(exceed[k]) / static_cast<double>(trials));

            if (row.stats.successes > 0) {
                const double total = static_cast<double>(row.stats.successes) * n;
                double tv = 0.0;
                for (std::size_t x = 0; x < nx; ++x)
                    for (std::size_t y = 0; y < ny; ++y)
                        tv += std::abs(pooled[x * ny + y] / total -
                                       input.probs[x] * channel.p(x, y));
                row.stats.joint_type_tv = tv;
            } else {
                row.stats.joint_type_tv = 2.0;  // no mass observed at all
            }
            rows.push_back(std::move(row));
        }
    return rows;
}

}  // namespace netcap
