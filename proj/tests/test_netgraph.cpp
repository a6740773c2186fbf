// Cut machinery, max-flow agreement, and the gap metrics.
#include <cmath>

#include "doctest.h"
#include "netcap/capacity.hpp"
#include "netcap/errors.hpp"
#include "netcap/net_io.hpp"
#include "netcap/netgraph.hpp"
#include "netcap/rng.hpp"

using namespace netcap;

static double h2_oracle(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

static Network butterfly(Cap cap) {
    Network net;
    net.node_count = 7;
    auto pipe = [&](int a, int b) { net.components.push_back(PipeComponent{a, b, cap}); };
    pipe(1, 2);
    pipe(1, 3);
    pipe(2, 4);
    pipe(3, 4);
    pipe(4, 5);
    pipe(2, 6);
    pipe(3, 7);
    pipe(5, 6);
    pipe(5, 7);
    return net;
}

// Small seeded deterministic network with pipes plus MAC/BC-shaped models.
static Network random_network(std::uint64_t seed) {
    Rng rng(seed);
    Network net;
    net.node_count = 4 + static_cast<int>(rng.uniform_index(7));  // 4..10
    const int m = net.node_count;
    const std::size_t pipes = 2 * m;
    for (std::size_t e = 0; e < pipes; ++e) {
        int a = 1 + static_cast<int>(rng.uniform_index(m));
        int b = 1 + static_cast<int>(rng.uniform_index(m));
        if (a == b) b = (b % m) + 1;
        net.components.push_back(PipeComponent{a, b, Cap(0.2 + 1.8 * rng.next_unit())});
    }
    // One MAC-shaped model.
    {
        int i1 = 1 + static_cast<int>(rng.uniform_index(m));
        int i2 = (i1 % m) + 1;
        int j = (i2 % m) + 1;
        ChannelGeometry g{"mac", {i1, i2}, {j}, {Cap(1.0), Cap(1.0)}};
        RateVector r;
        r.set({i1}, {j}, Cap(rng.next_unit()));
        r.set({i2}, {j}, Cap(rng.next_unit()));
        r.set({i1, i2}, {j}, Cap(rng.next_unit()));
        net.components.push_back(ModelComponent{build_model(g, r)});
    }
    // One BC-shaped model.
    {
        int i = 1 + static_cast<int>(rng.uniform_index(m));
        int j1 = (i % m) + 1;
        int j2 = (j1 % m) + 1;
        ChannelGeometry g{"bc", {i}, {j1, j2}, {Cap(1.0)}};
        RateVector r;
        r.set({i}, {j1, j2}, Cap(rng.next_unit()));
        r.set({i}, {j1}, Cap(rng.next_unit()));
        net.components.push_back(ModelComponent{build_model(g, r)});
    }
    return net;
}

TEST_CASE("replace splices models in") {
    Dmc bsc = Dmc::bsc(0.1);
    Network net;
    net.node_count = 3;
    net.components.push_back(NoisyComponent{ParsedChannel{"a", bsc}, {1}, {2}, "a"});
    net.components.push_back(NoisyComponent{ParsedChannel{"b", bsc}, {2}, {3}, "b"});
    CHECK(!net.deterministic());

    const double c = blahut_arimoto(bsc, 1e-9).capacity;
    ChannelGeometry ga = geometry_for(bsc, {1}, {2}, "a");
    RateVector ra;
    ra.set({1}, {2}, Cap(c));
    Network one = replace(net, "a", build_model(ga, ra));
    CHECK(!one.deterministic());

    ChannelGeometry gb = geometry_for(bsc, {2}, {3}, "b");
    RateVector rb;
    rb.set({2}, {3}, Cap(c));
    Network two = replace(one, "b", build_model(gb, rb));
    CHECK(two.deterministic());
    CHECK(min_cut(two, 1, 3).value == doctest::Approx(c).epsilon(1e-9));

    // Terminal mismatch is rejected.
    CHECK_THROWS_AS(replace(net, "b", build_model(ga, ra)), ParseError);

    // Replacing a MAC adds exactly one internal node.
    Dmc mac = Dmc::binary_adder_mac(0.1);
    Network nm;
    nm.node_count = 3;
    nm.components.push_back(NoisyComponent{ParsedChannel{"m", mac}, {1, 2}, {3}, "m"});
    ChannelGeometry gm = geometry_for(mac, {1, 2}, {3}, "m");
    RateVector rm;
    rm.set({1, 2}, {3}, Cap(1.0 - h2_oracle(0.1)));
    rm.set({1}, {3}, Cap(0.0));
    Network replaced = replace(nm, "m", build_model(gm, rm));
    const auto& mc = std::get<ModelComponent>(replaced.components[0]);
    CHECK(mc.model.internal_sets.size() == 1);
}

TEST_CASE("cut_value basics") {
    Network net;
    net.node_count = 2;
    net.components.push_back(PipeComponent{1, 2, Cap(0.75)});
    CHECK(cut_value(net, 0b01).value.value == doctest::Approx(0.75));
    CHECK(cut_value(net, 0b10).value.value == doctest::Approx(0.0));

    // A noisy component makes cut_value refuse.
    Network noisy = net;
    noisy.components.push_back(
        NoisyComponent{ParsedChannel{"c", Dmc::bsc(0.1)}, {1}, {2}, "c"});
    CHECK_THROWS_WITH_AS(cut_value(noisy, 0b01), doctest::Contains("replace"), ParseError);
}

TEST_CASE("components with no transmitter in S contribute zero") {
    ChannelGeometry g{"m", {1, 2}, {3}, {Cap(1.0), Cap(1.0)}};
    RateVector r;
    r.set({1}, {3}, Cap(0.4));
    r.set({1, 2}, {3}, Cap(0.7));
    Network net;
    net.node_count = 4;
    net.components.push_back(ModelComponent{build_model(g, r)});
    net.components.push_back(PipeComponent{3, 4, Cap(1.0)});
    // S = {3}: the model has no transmitter inside, only the pipe crosses.
    CHECK(cut_value(net, 0b0100).value.value == doctest::Approx(1.0));
    CHECK(cut_value(net, 0b0100).per_component[0].contribution.value == doctest::Approx(0.0));
    // S = {1,2,3}: every receiver of the model lies inside, so it contributes 0.
    CHECK(cut_value(net, 0b0111).per_component[0].contribution.value == doctest::Approx(0.0));
}

TEST_CASE("mac model cut minimization matches the closed form") {
    // S = {i1}: min(R_a + R_m, R_a + log|X1|) over the internal assignment,
    // randomized rate draws.
    Rng rng(31337);
    for (int iter = 0; iter < 1000; ++iter) {
        const double ra = 2.0 * rng.next_unit();
        const double rb = 2.0 * rng.next_unit();
        const double rm = 2.0 * rng.next_unit();
        const double feed = 0.25 + 1.75 * rng.next_unit();
        ChannelGeometry g{"m", {1, 2}, {3}, {Cap(feed), Cap(feed)}};
        RateVector r;
        r.set({1}, {3}, Cap(ra));
        r.set({2}, {3}, Cap(rb));
        r.set({1, 2}, {3}, Cap(rm));
        Network net;
        net.node_count = 3;
        net.components.push_back(ModelComponent{build_model(g, r)});
        const double got = cut_value(net, 0b001).value.value;
        CHECK(got == doctest::Approx(std::min(ra + rm, ra + feed)).epsilon(1e-12));
    }
}

TEST_CASE("min_cut basics") {
    // Path: min edge capacity.
    Network path;
    path.node_count = 4;
    path.components.push_back(PipeComponent{1, 2, Cap(1.0)});
    path.components.push_back(PipeComponent{2, 3, Cap(0.4)});
    path.components.push_back(PipeComponent{3, 4, Cap(0.8)});
    CHECK(min_cut(path, 1, 4).value == doctest::Approx(0.4).epsilon(1e-12));

    // Disconnected: zero.
    Network disc;
    disc.node_count = 3;
    disc.components.push_back(PipeComponent{1, 2, Cap(1.0)});
    CHECK(min_cut(disc, 1, 3).value == doctest::Approx(0.0));
    CHECK_THROWS_AS(min_cut(disc, 1, 1), ParseError);

    // Butterfly: unit edges give multicast capacity 2.
    Network b = butterfly(Cap(1.0));
    CHECK(min_cut(b, 1, 6).value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(min_cut(b, 1, 7).value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(multicast_capacity(b, 1, {6, 7}).value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(multicast_capacity(b, 1, {1, 6}), ParseError);

    // Infinite capacities stay symbolic.
    Network inf_net;
    inf_net.node_count = 2;
    inf_net.components.push_back(PipeComponent{1, 2, Cap::inf()});
    CHECK(min_cut(inf_net, 1, 2).is_inf);
}

TEST_CASE("min_cut equals exhaustive enumeration on random networks") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Network net = random_network(derive_seed(777, {seed}));
        const int m = net.node_count;
        Rng rng(seed);
        int u = 1 + static_cast<int>(rng.uniform_index(m));
        int v = 1 + static_cast<int>(rng.uniform_index(m));
        if (u == v) v = (v % m) + 1;
        Cap fast = min_cut(net, u, v);
        Cap slow = min_cut_by_enumeration(net, u, v);
        REQUIRE(fast.is_inf == slow.is_inf);
        if (!fast.is_inf) CHECK(fast.value == doctest::Approx(slow.value).epsilon(1e-9));
    }
}

TEST_CASE("cut monotonicity under capacity scaling") {
    Network net = random_network(2024);
    const double scale = 0.37;
    Network scaled = net;
    for (auto& c : scaled.components) {
        if (auto* p = std::get_if<PipeComponent>(&c)) {
            if (!p->cap.is_inf) p->cap.value *= scale;
        } else if (auto* mc = std::get_if<ModelComponent>(&c)) {
            for (auto& e : mc->model.edges)
                if (!e.cap.is_inf) e.cap.value *= scale;
        }
    }
    Rng rng(5);
    for (int iter = 0; iter < 20; ++iter) {
        NodeSet s = static_cast<NodeSet>(rng.next_u64() & ((1u << net.node_count) - 1));
        Cap a = cut_value(net, s).value;
        Cap b = cut_value(scaled, s).value;
        REQUIRE(!a.is_inf);
        CHECK(b.value == doctest::Approx(scale * a.value).epsilon(1e-9));
    }
    CHECK(min_cut(scaled, 1, net.node_count).value ==
          doctest::Approx(scale * min_cut(net, 1, net.node_count).value).epsilon(1e-9));
}

TEST_CASE("cut_value submodular spot check") {
    Network net = butterfly(Cap(1.0));
    Rng rng(11);
    for (int iter = 0; iter < 100; ++iter) {
        NodeSet s = static_cast<NodeSet>(rng.next_u64() & 0x7f);
        NodeSet t = static_cast<NodeSet>(rng.next_u64() & 0x7f);
        const double vs = cut_value(net, s).value.value;
        const double vt = cut_value(net, t).value.value;
        const double vu = cut_value(net, s | t).value.value;
        const double vi = cut_value(net, s & t).value.value;
        CHECK(vs + vt + 1e-9 >= vu + vi);
    }
}

TEST_CASE("butterfly multicast with channel replacement") {
    // Replace each unit pipe with the lower model of a BSC(0.1).
    const double c = 1.0 - h2_oracle(0.1);
    Network b = butterfly(Cap(c));
    CHECK(multicast_capacity(b, 1, {6, 7}).value == doctest::Approx(2.0 * c).epsilon(1e-9));
}

TEST_CASE("model files round-trip through the serializer") {
    auto spec = GaussianChannelSpec::mac(2, 1, 1);
    ChannelGeometry g = geometry_for(spec, {1, 2}, {3}, "gm");
    ModelPair mp = gaussian_mac_models(g, spec, 1e-4);
    ModelFile mf;
    mf.channel_id = "gm";
    mf.side = "upper";
    mf.rates = mp.upper_rates;
    mf.geometry = g;
    mf.slack = 1e-4;
    mf.notes = {"closed form"};
    ModelFile back = parse_model_text(serialize_model(mf));
    CHECK(back.side == "upper");
    CHECK(back.geometry.v1 == g.v1);
    REQUIRE(back.geometry.feeds.size() == 2);
    CHECK(back.geometry.feeds[0].is_inf);  // "inf" survives the trip symbolically
    for (const auto& [k, cap] : mf.rates.entries) {
        const Cap r = back.rates.get(k);
        REQUIRE(r.is_inf == cap.is_inf);
        if (!cap.is_inf) CHECK(r.value == cap.value);  // bit-exact
    }
    // NaN and bare IEEE infinity are hard errors.
    CHECK_THROWS_AS(
        parse_model_text(R"({"channel":"x","side":"lower",
            "rates":[{"A":[1],"B":[2],"rate":"huge"}],
            "meta":{"v1":[1],"v2":[2],"feeds":[1.0]}})"),
        ParseError);
}

TEST_CASE("cutset feasibility") {
    Network path;
    path.node_count = 3;
    path.components.push_back(PipeComponent{1, 2, Cap(1.0)});
    path.components.push_back(PipeComponent{2, 3, Cap(1.0)});

    CHECK(cutset_feasibility(path, {UnicastDemand{1, 3, 0.9}}).feasible);
    auto bad = cutset_feasibility(path, {UnicastDemand{1, 3, 1.2}});
    CHECK(!bad.feasible);
    CHECK(!bad.binding_cuts.empty());

    // Two unicasts sharing one unit edge.
    Network shared;
    shared.node_count = 4;
    shared.components.push_back(PipeComponent{1, 2, Cap(1.0)});
    shared.components.push_back(PipeComponent{2, 3, Cap(1.0)});
    shared.components.push_back(PipeComponent{2, 4, Cap(1.0)});
    shared.components.push_back(PipeComponent{3, 2, Cap(1.0)});
    // Demands 1->4 and 3->4 both cross node 2's outgoing unit edge 2->4.
    auto rep = cutset_feasibility(shared, {UnicastDemand{1, 4, 0.6}, UnicastDemand{3, 4, 0.6}});
    CHECK(!rep.feasible);
    bool found = false;
    for (const auto& v : rep.binding_cuts)
        if (v.s == 0b0111) found = true;  // S = {1,2,3} isolates the single edge into 4
    CHECK(found);

    Network big;
    big.node_count = 25;
    CHECK_THROWS_AS(cutset_feasibility(big, {}), EnumerationError);
}

TEST_CASE("rho estimates") {
    // Point-to-point: boundary candidates coincide, ratio 1.
    const double c = 1.0 - h2_oracle(0.1);
    RateVector lo, up;
    lo.set({1}, {2}, Cap(c));
    up.set({1}, {2}, Cap(c));
    CHECK(rho({lo}, {up}) == doctest::Approx(1.0).epsilon(1e-12));

    // Binary adder MAC with matched-topology candidates: (1-H(p))/2.
    const double s = 1.0 - h2_oracle(0.1);
    std::vector<RateVector> lowers;
    for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        RateVector l;
        l.set({1}, {3}, Cap(a * s));
        l.set({2}, {3}, Cap((1.0 - a) * s));
        l.set({1, 2}, {3}, Cap(s));
        lowers.push_back(l);
    }
    RateVector u;
    u.set({1}, {3}, Cap(1.0));
    u.set({2}, {3}, Cap(1.0));
    u.set({1, 2}, {3}, Cap(s));
    CHECK(rho(lowers, {u}) == doctest::Approx(s / 2.0).epsilon(1e-12));

    // Independent-noise BSC broadcast ratio.
    auto st = [](double a, double b) { return a + b - 2 * a * b; };
    const double q2 = st(0.1, 0.1);
    const double r0 = 1.0 - h2_oracle(st(q2, q2));
    const double r1 = h2_oracle(st(q2, 0.1)) - h2_oracle(0.1);
    const double r0u = 1.0 - h2_oracle(q2);
    RateVector bl, bu;
    bl.set({1}, {2, 3}, Cap(r0));
    bl.set({1}, {2}, Cap(r1));
    bu.set({1}, {2, 3}, Cap(r0u));
    bu.set({1}, {2}, Cap(r1));
    CHECK(rho({bl}, {bu}) == doctest::Approx(r0 / r0u).epsilon(1e-12));

    // Monotone in the candidate set, never above 1.
    double base = rho({lowers[0]}, {u});
    double more = rho(lowers, {u});
    CHECK(more + 1e-15 >= base);
    CHECK(more <= 1.0);
    CHECK_THROWS_AS(rho({}, {u}), ParseError);
}

TEST_CASE("delta estimates") {
    // Point-to-point: gap 0 for boundary candidates.
    const double c = 1.0 - h2_oracle(0.1);
    ChannelGeometry g{"p", {1}, {2}, {Cap(1.0)}};
    RateVector lo, up;
    lo.set({1}, {2}, Cap(c));
    up.set({1}, {2}, Cap(c));
    CHECK(delta_gap(g, 0b01, {lo}, {up}) == doctest::Approx(0.0).epsilon(1e-12));
    // Non-separating S: zero exactly.
    CHECK(delta_gap(g, 0b11, {lo}, {up}) == doctest::Approx(0.0));
    CHECK(delta_gap(g, 0b00, {lo}, {up}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(delta_gap(g, 0b01, {}, {up}), ParseError);

    // Gaussian MAC: merged-edge gap (1/2)log2(5/3) at S = {i1, i2}.
    auto spec = GaussianChannelSpec::mac(1, 1, 1);
    ChannelGeometry gm = geometry_for(spec, {1, 2}, {3}, "gm");
    ModelPair mp = gaussian_mac_models(gm, spec, 1e-4);
    const double d = delta_gap(gm, 0b011, {mp.lower_rates}, {mp.upper_rates});
    CHECK(d == doctest::Approx(0.5 * std::log2(5.0 / 3.0)).epsilon(1e-12));

    // Adding candidates never increases the estimate.
    RateVector swapped = gaussian_mac_upper_rates_swapped(gm, spec);
    const double d2 = delta_gap(gm, 0b011, {mp.lower_rates}, {mp.upper_rates, swapped});
    CHECK(d2 <= d + 1e-15);
}

static ChannelCandidates gaussian_mac_candidates(const GaussianChannelSpec& spec, int i1, int i2,
                                                 int j, const std::string& id) {
    ChannelGeometry g = geometry_for(spec, {i1, i2}, {j}, id);
    ModelPair mp = gaussian_mac_models(g, spec, 1e-4);
    ChannelCandidates cc;
    cc.geometry = g;
    cc.lowers = {mp.lower_rates};
    // Swapped corner point.
    RateVector swapped_corner;
    swapped_corner.set({i1}, {j}, Cap(0.5 * std::log2(1.0 + spec.P1 / (spec.P2 + spec.N))));
    swapped_corner.set({i2}, {j}, Cap(0.5 * std::log2(1.0 + spec.P2 / spec.N)));
    cc.lowers.push_back(swapped_corner);
    cc.uppers = {mp.upper_rates, gaussian_mac_upper_rates_swapped(g, spec)};
    return cc;
}

TEST_CASE("network gaps") {
    // All-p2p network: rho 1, additive gap 0.
    const double c = 1.0 - h2_oracle(0.1);
    Network net;
    net.node_count = 3;
    net.components.push_back(NoisyComponent{ParsedChannel{"a", Dmc::bsc(0.1)}, {1}, {2}, "a"});
    net.components.push_back(NoisyComponent{ParsedChannel{"b", Dmc::bsc(0.1)}, {2}, {3}, "b"});
    std::vector<ChannelCandidates> cands;
    for (auto [id, a, b] : {std::tuple{"a", 1, 2}, std::tuple{"b", 2, 3}}) {
        ChannelCandidates cc;
        cc.geometry = geometry_for(Dmc::bsc(0.1), {a}, {b}, id);
        RateVector r;
        r.set({a}, {b}, Cap(c));
        cc.lowers = {r};
        cc.uppers = {r};
        cands.push_back(cc);
    }
    GapReport rep = network_gaps(net, cands);
    CHECK(rep.rho_network == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.additive_gap == doctest::Approx(0.0).epsilon(1e-9));

    // Single Gaussian MAC: the additive gap is the merged-edge formula.
    Network macnet;
    macnet.node_count = 3;
    auto spec = GaussianChannelSpec::mac(1, 1, 1);
    macnet.components.push_back(NoisyComponent{ParsedChannel{"gm", spec}, {1, 2}, {3}, "gm"});
    GapReport grep = network_gaps(macnet, {gaussian_mac_candidates(spec, 1, 2, 3, "gm")});
    CHECK(grep.additive_gap == doctest::Approx(0.5 * std::log2(5.0 / 3.0)).epsilon(1e-9));

    // A MAC and a BC on disjoint terminals: gap sums and stays below k/2.
    Network khet;
    khet.node_count = 6;
    khet.components.push_back(NoisyComponent{ParsedChannel{"gm", spec}, {1, 2}, {3}, "gm"});
    auto bspec = GaussianChannelSpec::bc(1, 1, 1, 1, 1, 0);
    khet.components.push_back(NoisyComponent{ParsedChannel{"gb", bspec}, {4}, {5, 6}, "gb"});
    ChannelGeometry gb = geometry_for(bspec, {4}, {5, 6}, "gb");
    ModelPair bp = gaussian_bc_models(gb, bspec, 1e-4);
    ChannelCandidates bcc;
    bcc.geometry = gb;
    bcc.lowers = {bp.lower_rates};
    bcc.uppers = {bp.upper_rates};
    GapReport krep =
        network_gaps(khet, {gaussian_mac_candidates(spec, 1, 2, 3, "gm"), bcc});
    const double mac_gap = 0.5 * std::log2(5.0 / 3.0);
    const double bc_gap = 0.5 * std::log2(1.5);
    CHECK(krep.additive_gap == doctest::Approx(mac_gap + bc_gap).epsilon(1e-9));
    CHECK(krep.additive_gap <= 2 * 0.5);
}
