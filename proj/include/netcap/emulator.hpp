// Seeded Monte-Carlo realization of typical-set channel-emulation codes for
// point-to-point and two-receiver broadcast channels, plus the experiment
// driver that sweeps (rate, blocklength) and reports failure statistics.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netcap/prob.hpp"

namespace netcap {

struct TypicalityParams {
    int N = 8;                          // block length
    double eps = 0.0125;                // input-typicality slack (stage 1)
    double eps2 = 0.0125;               // second-stage slack for the BC code
    double restriction_threshold = 3.0; // exponent multiplier for the restricted-set diagnostic
    std::size_t a_samples = 10000;      // draws behind each empirical quantile
    std::size_t mem_budget = 10000000;  // max total codeword symbols
    std::optional<double> a1, a2;       // filled in by the builders
};

// |-(1/N) log2 p(block) - H| ; +infinity when a symbol falls outside the support.
double typicality_stat(const std::vector<int>& block, const Pmf& dist);
double typicality_stat(const std::vector<int>& a, const std::vector<int>& b,
                       const JointPmf& joint);

struct EmulatorCodebook {
    enum class Stage { Single, BcCommon, BcPrivate };
    double rate = 0.0;
    std::size_t codeword_count = 0;
    std::vector<std::vector<int>> codewords;
    Stage stage = Stage::Single;
    std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Point-to-point emulator
// ---------------------------------------------------------------------------

struct P2pEmulator {
    Dmc channel;
    Pmf input;
    TypicalityParams params;
    EmulatorCodebook book;
    double a1 = 0.0;  // empirical stand-in for the output/joint typicality radius

    // Per-symbol log tables (base 2).
    std::vector<double> log_px, log_qy, log_pxy, log_w;
    double h_x = 0.0, h_y = 0.0, h_xy = 0.0;
};

// Codewords are drawn i.i.d. from the output marginal of `input` through the
// channel; reproducible from `seed`.
P2pEmulator build_p2p_emulator(const Dmc& channel, const Pmf& input, double rate,
                               const TypicalityParams& params, std::uint64_t seed);

struct EmulateResult {
    std::vector<int> y;
    bool failure = false;         // no jointly typical codeword; codeword 1 emitted
    std::size_t match_count = 0;
    std::size_t chosen_index = 0;
    double log_ratio_stat = 0.0;  // (1/N) log2(phat(y|x)/p(y|x)); +inf on failure
};

EmulateResult emulate(const P2pEmulator& em, const std::vector<int>& x_block,
                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Broadcast emulator (two-stage superposition code)
// ---------------------------------------------------------------------------

struct BcEmulator {
    Dmc channel;
    Pmf input;
    TypicalityParams params;
    EmulatorCodebook common;                   // codewords over Y2
    std::vector<std::vector<int>> privates;    // [w0*count1 + w1] over Y1
    std::size_t count0 = 0, count1 = 0;
    double a1 = 0.0, a2 = 0.0;

    std::vector<double> log_px;
    std::vector<double> log_py2, log_pxy2;             // stage 1 tables
    std::vector<double> log_py1y2, log_pxy1y2, log_w;  // stage 2 tables
    double h_x = 0, h_y2 = 0, h_xy2 = 0, h_y1y2 = 0, h_xy1y2 = 0;
};

// Stage 1 draws common codewords i.i.d. from p(y2); stage 2 draws, for every
// common word, private codewords i.i.d. from p(y1|y2) along that word.
BcEmulator build_bc_emulator(const Dmc& channel, const Pmf& input, double r0, double r1,
                             const TypicalityParams& params, std::uint64_t seed);

struct BcEmulateResult {
    std::vector<int> y1, y2;
    bool stage1_failure = false;
    bool stage2_failure = false;
    std::size_t w0 = 0, w1 = 0;
    std::size_t stage1_matches = 0, stage2_matches = 0;
};

BcEmulateResult bc_emulate(const BcEmulator& em, const std::vector<int>& x_block,
                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Threshold experiments
// ---------------------------------------------------------------------------

struct EmulationStats {
    std::size_t trials = 0;
    std::size_t successes = 0;
    double encoder_failure_rate = 0.0;
    double joint_type_tv = 0.0;  // TV between the pooled success type and p(x)p(y|x)
    double restricted_frac = 0.0;
    std::vector<std::pair<double, double>> exceed_rates;  // (nu, rate)
};

struct ExperimentRow {
    double rate = 0.0;
    int block_length = 0;
    EmulationStats stats;
};

// Per (R,N): seeded codebook, `trials` independent input blocks, failure and
// type statistics.  Requires trials >= 100.
std::vector<ExperimentRow> threshold_experiment(const Dmc& channel, const Pmf& input,
                                                const std::vector<double>& rate_list,
                                                const std::vector<int>& n_list,
                                                std::size_t trials, std::uint64_t seed,
                                                const std::vector<double>& nu_list,
                                                TypicalityParams params);

}  // namespace netcap
