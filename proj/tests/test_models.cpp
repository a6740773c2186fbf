// Bit-pipe model construction and the upper-model optimizers.
#include <cmath>

#include "doctest.h"
#include "netcap/errors.hpp"
#include "netcap/models.hpp"
#include "netcap/rng.hpp"

using namespace netcap;

static double h2_oracle(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}
static double chain(double a, double b) { return a + b - 2 * a * b; }

TEST_CASE("build_model shapes") {
    // P2P: one edge, no internal nodes.
    Dmc bsc = Dmc::bsc(0.1);
    ChannelGeometry g = geometry_for(bsc, {1}, {2}, "c");
    RateVector r;
    r.set({1}, {2}, Cap(0.5));
    BitPipeModel m = build_model(g, r);
    CHECK(m.internal_sets.empty());
    REQUIRE(m.edges.size() == 1);
    CHECK(m.edges[0].cap.value == doctest::Approx(0.5));

    // MAC with only the merged rate: internal node plus two feeds at log|X|.
    Dmc mac = Dmc::binary_adder_mac(0.1);
    ChannelGeometry gm = geometry_for(mac, {1, 2}, {3}, "m");
    RateVector rm;
    rm.set({1, 2}, {3}, Cap(0.7));
    BitPipeModel mm = build_model(gm, rm);
    REQUIRE(mm.internal_sets.size() == 1);
    REQUIRE(mm.edges.size() == 3);
    int feeds = 0;
    for (const auto& e : mm.edges)
        if (e.is_feed) {
            ++feeds;
            CHECK(e.cap.value == doctest::Approx(1.0));  // log2|{0,1}|
        }
    CHECK(feeds == 2);

    // BC: a single broadcast edge reaching both receivers.
    Dmc bc = Dmc::bsc_bc_independent(0.1, 0.18);
    ChannelGeometry gb = geometry_for(bc, {1}, {2, 3}, "b");
    RateVector rb;
    rb.set({1}, {2, 3}, Cap(0.3));
    BitPipeModel mb = build_model(gb, rb);
    REQUIRE(mb.edges.size() == 1);
    CHECK(mb.edges[0].dsts.size() == 2);

    // Zero-rate hyperedges are pruned.
    RateVector rz;
    rz.set({1}, {2, 3}, Cap(0.0));
    CHECK(build_model(gb, rz).edges.empty());

    // Keys outside M are rejected.
    RateVector bad;
    bad.set({9}, {2}, Cap(0.1));
    CHECK_THROWS_AS(build_model(gb, bad), ParseError);
}

TEST_CASE("region points map onto the right hyperedge keys") {
    // Adder MAC at the symmetric split: R1 and R2 land on the direct keys.
    Dmc mac = Dmc::binary_adder_mac(0.1);
    ChannelGeometry gm = geometry_for(mac, {1, 2}, {3}, "m");
    auto pts = mac_lower_points(mac, {0.5}, 5);
    const double half = 0.5 * (1.0 - h2_oracle(0.1));
    bool found = false;
    for (const auto& pt : pts) {
        if (std::abs(pt.rate("R1") - half) > 1e-9 || std::abs(pt.rate("R2") - half) > 1e-9)
            continue;
        found = true;
        RateVector r = rates_from_point(ChannelRole::MAC2, gm, pt);
        CHECK(r.get(EdgeKey({1}, {3})).value == doctest::Approx(half).epsilon(1e-12));
        CHECK(r.get(EdgeKey({2}, {3})).value == doctest::Approx(half).epsilon(1e-12));
        CHECK(!r.get(EdgeKey({1, 2}, {3})).positive());
        auto [rates, model] = lower_model(gm, r);
        CHECK(model.internal_sets.empty());
    }
    CHECK(found);

    // Broadcast point: R0 rides the common hyperedge, R1 the private one.
    Dmc bc = Dmc::bsc_bc_independent(0.1, 0.18);
    ChannelGeometry gb = geometry_for(bc, {1}, {2, 3}, "b");
    auto bpts = degraded_bc_lower_points(bc, {0.18});
    RateVector rb = rates_from_point(ChannelRole::BC2, gb, bpts.front());
    CHECK(rb.get(EdgeKey({1}, {2, 3})).value ==
          doctest::Approx(bpts.front().rate("R0")).epsilon(1e-12));
    CHECK(rb.get(EdgeKey({1}, {2})).value ==
          doctest::Approx(bpts.front().rate("R1")).epsilon(1e-12));
}

TEST_CASE("lower models carry single-transmitter rates only") {
    Dmc mac = Dmc::binary_adder_mac(0.1);
    ChannelGeometry g = geometry_for(mac, {1, 2}, {3}, "m");
    RateVector ok;
    ok.set({1}, {3}, Cap(0.25));
    ok.set({2}, {3}, Cap(0.25));
    CHECK_NOTHROW(lower_model(g, ok));
    RateVector bad = ok;
    bad.set({1, 2}, {3}, Cap(0.1));
    CHECK_THROWS_AS(lower_model(g, bad), ParseError);
}

TEST_CASE("p2p upper model rate is capacity plus delta") {
    ChannelGeometry g = geometry_for(Dmc::bsc(0.1), {1}, {2}, "c");
    auto [r, m] = upper_model_p2p(g, Dmc::bsc(0.1), 1e-6);
    CHECK(r.get(EdgeKey({1}, {2})).value ==
          doctest::Approx(1.0 - h2_oracle(0.1) + 1e-6).epsilon(1e-8));

    auto [rn, mn] = upper_model_p2p(g, Dmc::noiseless(2), 0.01);
    CHECK(rn.get(EdgeKey({1}, {2})).value == doctest::Approx(1.01).epsilon(1e-8));

    auto [rz, mz] = upper_model_p2p(g, Dmc::bsc(0.5), 0.01);
    CHECK(rz.get(EdgeKey({1}, {2})).value == doctest::Approx(0.01).epsilon(1e-8));
}

TEST_CASE("bc upper family reproduces the degraded and independent closed forms") {
    const double p1 = 0.1, p2 = 0.1;
    // Physically degraded: c2 = 1-H(p1*p2), c12 = 1-H(p1).
    Dmc deg = Dmc::bsc_bc_degraded(p1, p2);
    ChannelGeometry g = geometry_for(deg, {1}, {2, 3}, "deg");
    BcUpperFamily fam = upper_model_bc(g, deg, 33, 1e-4);
    CHECK(fam.c2 == doctest::Approx(1.0 - h2_oracle(chain(p1, p2))).epsilon(1e-9));
    CHECK(fam.c12 == doctest::Approx(1.0 - h2_oracle(p1)).epsilon(1e-9));
    // First family member: R0' = c2 + delta, R1' = c12 - c2 + ... = H(p1*p2)-H(p1).
    const auto& first = fam.family.front().first;
    CHECK(first.get(EdgeKey({1}, {2, 3})).value ==
          doctest::Approx(1.0 - h2_oracle(chain(p1, p2)) + 1e-4).epsilon(1e-9));
    // max(0, c12 - (c2 + delta)) + delta collapses to c12 - c2.
    CHECK(first.get(EdgeKey({1}, {2})).value ==
          doctest::Approx(h2_oracle(chain(p1, p2)) - h2_oracle(p1)).epsilon(1e-9));
    CHECK(fam.check.min_slack() >= 0.5e-4);

    // Independent noise at crossovers p1 and p1*p2: R1' = H(p1*p1*p2)-H(p1).
    Dmc ind = Dmc::bsc_bc_independent(p1, chain(p1, p2));
    BcUpperFamily fi = upper_model_bc(geometry_for(ind, {1}, {2, 3}, "ind"), ind, 33, 1e-4);
    CHECK(fi.c12 - fi.c2 ==
          doctest::Approx(h2_oracle(chain(p1, chain(p1, p2))) - h2_oracle(p1)).epsilon(1e-9));

    // Y2 independent of X: c2 = 0, R0 can be delta.
    std::vector<double> t;
    for (int x = 0; x < 2; ++x)
        for (int y1 = 0; y1 < 2; ++y1)
            for (int y2 = 0; y2 < 2; ++y2)
                t.push_back(((y1 == x) ? 0.9 : 0.1) * 0.5);
    Dmc indep_y2(ChannelRole::BC2, {{"0", "1"}}, {{"0", "1"}, {"0", "1"}}, t, "y2free");
    BcUpperFamily fz = upper_model_bc(geometry_for(indep_y2, {1}, {2, 3}, "z"), indep_y2, 17, 1e-4);
    CHECK(fz.c2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fz.family.front().first.get(EdgeKey({1}, {2, 3})).value ==
          doctest::Approx(1e-4).epsilon(1e-9));
    CHECK(fz.family.front().first.get(EdgeKey({1}, {2})).value ==
          doctest::Approx(fz.c12).epsilon(1e-9));
}

TEST_CASE("check_upper_conditions slack behavior") {
    Dmc bsc = Dmc::bsc(0.1);
    ChannelGeometry g = geometry_for(bsc, {1}, {2}, "c");
    auto [r, m] = upper_model_p2p(g, bsc, 1e-3);
    CheckReport rep = check_upper_conditions(bsc, g, r, 65);
    CHECK(rep.min_slack() >= 1e-3 - 1e-9);

    // Deliberately infeasible BC rates: negative slack is reported.
    Dmc bc = Dmc::bsc_bc_independent(0.1, 0.18);
    ChannelGeometry gb = geometry_for(bc, {1}, {2, 3}, "b");
    BcUpperFamily fam = upper_model_bc(gb, bc, 17, 1e-4);
    RateVector bad;
    bad.set({1}, {2, 3}, Cap(fam.c2 - 0.01));
    bad.set({1}, {2}, Cap(fam.c12 - fam.c2 + 0.02));
    CheckReport repb = check_upper_conditions(bc, gb, bad, 17);
    CHECK(repb.min_slack() < 0.0);
}

TEST_CASE("mac upper model at the budget extremes") {
    const double delta = 1e-4;
    for (double p : {0.0, 0.1}) {
        Dmc mac = Dmc::binary_adder_mac(p);
        ChannelGeometry g = geometry_for(mac, {1, 2}, {3}, "m");
        MacUpperResult r0 = upper_model_mac(g, mac, 0.0, 17, {}, delta);
        CHECK(r0.merged_rate == doctest::Approx(1.0 - h2_oracle(p) + delta).epsilon(1e-9));
        CHECK(r0.rates.get(EdgeKey({1}, {3})).value == doctest::Approx(delta));
        // Refined-grid certification keeps at least half the slack.
        CHECK(r0.check.min_slack() >= delta / 2);

        // Budget of log|X1| lets U describe X1 fully.
        MacUpperResult r1 = upper_model_mac(g, mac, 1.0, 9, {}, delta);
        CHECK(r1.merged_rate == doctest::Approx(1.0 - h2_oracle(p) + delta).epsilon(2e-2));
    }
}

TEST_CASE("mac upper sweep is nonincreasing in the direct budget") {
    // Random-but-fixed 2x2 -> 2 MAC.
    Rng rng(4242);
    std::vector<double> t;
    for (int row = 0; row < 4; ++row) {
        double a = 0.15 + 0.7 * rng.next_unit();
        t.push_back(a);
        t.push_back(1.0 - a);
    }
    Dmc mac(ChannelRole::MAC2, {{"0", "1"}, {"0", "1"}}, {{"0", "1"}}, t, "rand");
    ChannelGeometry g = geometry_for(mac, {1, 2}, {3}, "m");
    AuxSearch search;
    search.starts = 8;
    auto sweep = upper_model_mac_sweep(g, mac, {0.0, 0.1, 0.25, 0.5, 1.0}, 9, search, 1e-4);
    for (std::size_t i = 1; i < sweep.size(); ++i)
        CHECK(sweep[i].merged_rate <= sweep[i - 1].merged_rate + 1e-9);
}

TEST_CASE("ic upper models") {
    const double delta = 1e-4;
    // Two independent BSC(0.1) links modeled as an interference channel:
    // variant-1 rates reduce to the two point-to-point capacities.
    std::vector<double> t;
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
            for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2)
                    t.push_back(((y1 == x1) ? 0.9 : 0.1) * ((y2 == x2) ? 0.9 : 0.1));
    Dmc ic(ChannelRole::IC22, {{"0", "1"}, {"0", "1"}}, {{"0", "1"}, {"0", "1"}}, t, "pair");
    ChannelGeometry g = geometry_for(ic, {1, 2}, {3, 4}, "ic");
    AuxSearch search;
    search.starts = 4;
    IcUpperResult res = upper_model_ic(g, ic, 1, 9, search, delta);
    const double c = 1.0 - h2_oracle(0.1);
    CHECK(res.rates.get(EdgeKey({1}, {3})).value <= 0.03);
    CHECK(res.rates.get(EdgeKey({1}, {3, 4})).value <= 0.03);
    CHECK(res.rates.get(EdgeKey({1, 2}, {3})).value == doctest::Approx(c + delta).epsilon(2e-2));
    CHECK(res.rates.get(EdgeKey({1, 2}, {3, 4})).value ==
          doctest::Approx(c + delta).epsilon(2e-2));
    CHECK(res.check.min_slack() >= delta / 2);

    // Degenerate second receiver: the j2-facing rates collapse toward delta.
    std::vector<double> t2;
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
            for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2)
                    t2.push_back(((y1 == x1) ? 0.9 : 0.1) * 0.5);
    Dmc icz(ChannelRole::IC22, {{"0", "1"}, {"0", "1"}}, {{"0", "1"}, {"0", "1"}}, t2, "zfree");
    IcUpperResult rz = upper_model_ic(g, icz, 1, 9, search, delta);
    CHECK(rz.rates.get(EdgeKey({1}, {3, 4})).value == doctest::Approx(delta).epsilon(1e-6));
    CHECK(rz.rates.get(EdgeKey({1, 2}, {3, 4})).value == doctest::Approx(delta).epsilon(1e-6));

    // |X1| = 1: all I(X1; .) vanish, only merged rates bind.
    std::vector<double> t3;
    for (int x2 = 0; x2 < 2; ++x2)
        for (int y1 = 0; y1 < 2; ++y1)
            for (int y2 = 0; y2 < 2; ++y2)
                t3.push_back(0.5 * ((y2 == x2) ? 0.9 : 0.1));
    Dmc ic1(ChannelRole::IC22, {{"0"}, {"0", "1"}}, {{"0", "1"}, {"0", "1"}}, t3, "onex");
    ChannelGeometry g1 = geometry_for(ic1, {1, 2}, {3, 4}, "ic1");
    IcUpperResult r1 = upper_model_ic(g1, ic1, 1, 9, search, delta);
    CHECK(r1.rates.get(EdgeKey({1}, {3})).value == doctest::Approx(delta).epsilon(1e-9));
    CHECK(r1.rates.get(EdgeKey({1}, {3, 4})).value == doctest::Approx(delta).epsilon(1e-9));

    // Variant 2 on the independent pair also certifies.
    IcUpperResult rv2 = upper_model_ic(g, ic, 2, 9, search, delta);
    CHECK(rv2.check.min_slack() >= -1e-9);
}

TEST_CASE("gaussian bc model pair") {
    auto spec = GaussianChannelSpec::bc(1, 1, 1, 1, 1, 0);
    ChannelGeometry g = geometry_for(spec, {1}, {2, 3}, "gbc");
    ModelPair mp = gaussian_bc_models(g, spec, 1e-4);
    // Upper common rate (1/2)log2(1+P/(N2/a2^2)) = 0.5.
    CHECK(mp.upper_rates.get(EdgeKey({1}, {2, 3})).value == doctest::Approx(0.5).epsilon(1e-12));
    // Private rates coincide.
    CHECK(mp.upper_rates.get(EdgeKey({1}, {2})).value ==
          doctest::Approx(mp.lower_rates.get(EdgeKey({1}, {2})).value).epsilon(1e-12));
    // Common-rate gap at rho = 0: (1/2)log2(1 + P/(P+N2/a2^2)).
    const double gap = mp.upper_rates.get(EdgeKey({1}, {2, 3})).value -
                       mp.lower_rates.get(EdgeKey({1}, {2, 3})).value;
    CHECK(gap == doctest::Approx(0.5 * std::log2(1.5)).epsilon(1e-12));
    CHECK(gap < 0.5);

    // rho = 1 with equal input-referred noises: the power split divides by zero.
    auto degenerate = GaussianChannelSpec::bc(1, 1, 1, 1, 1, 1.0);
    CHECK_THROWS_AS(gaussian_bc_models(g, degenerate, 1e-4), ParseError);
}

TEST_CASE("gaussian mac model pair") {
    ChannelGeometry g =
        geometry_for(GaussianChannelSpec::mac(1, 1, 1), {1, 2}, {3}, "gmac");
    ModelPair mp = gaussian_mac_models(g, GaussianChannelSpec::mac(1, 1, 1), 1e-4);
    // Cut S = {i1,i2}: upper crossing is the direct edge plus the merged edge.
    const double upper_cut = mp.upper_rates.get(EdgeKey({1}, {3})).value +
                             mp.upper_rates.get(EdgeKey({1, 2}, {3})).value;
    const double lower_cut = mp.lower_rates.get(EdgeKey({1}, {3})).value +
                             mp.lower_rates.get(EdgeKey({2}, {3})).value;
    CHECK(upper_cut - lower_cut == doctest::Approx(0.5 * std::log2(5.0 / 3.0)).epsilon(1e-12));

    // Feeds are symbolically infinite for continuous inputs.
    bool saw_inf_feed = false;
    for (const auto& e : mp.upper_model.edges)
        if (e.is_feed) {
            CHECK(e.cap.is_inf);
            saw_inf_feed = true;
        }
    CHECK(saw_inf_feed);

    // P2 -> 0: the cut-value gap vanishes (like sqrt(P2)).
    auto small = GaussianChannelSpec::mac(1, 1e-12, 1);
    ModelPair mps = gaussian_mac_models(g, small, 1e-4);
    const double gap = mps.upper_rates.get(EdgeKey({1}, {3})).value +
                       mps.upper_rates.get(EdgeKey({1, 2}, {3})).value -
                       (mps.lower_rates.get(EdgeKey({1}, {3})).value +
                        mps.lower_rates.get(EdgeKey({2}, {3})).value);
    CHECK(std::abs(gap) < 1e-6);
}
