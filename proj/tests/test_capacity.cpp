// Capacity solver and region-point generators.
#include <cmath>

#include "doctest.h"
#include "netcap/capacity.hpp"
#include "netcap/errors.hpp"
#include "netcap/rng.hpp"

using namespace netcap;

static double h2_oracle(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

TEST_CASE("blahut-arimoto against closed forms") {
    CapacityResult ident = blahut_arimoto(Dmc::noiseless(2), 1e-10);
    CHECK(ident.converged);
    CHECK(ident.capacity == doctest::Approx(1.0).epsilon(1e-9));

    CapacityResult bsc = blahut_arimoto(Dmc::bsc(0.1), 1e-10);
    CHECK(bsc.converged);
    CHECK(bsc.capacity == doctest::Approx(1.0 - h2_oracle(0.1)).epsilon(1e-9));
    CHECK(bsc.lower_bracket <= bsc.capacity + 1e-15);
    CHECK(bsc.capacity <= bsc.upper_bracket + 1e-15);
    CHECK(bsc.upper_bracket - bsc.lower_bracket <= 1e-10);

    CapacityResult bec = blahut_arimoto(Dmc::bec(0.3), 1e-10);
    CHECK(bec.capacity == doctest::Approx(0.7).epsilon(1e-9));

    // Symmetric channels keep the uniform input.
    for (double p : bsc.optimal_input.probs) CHECK(p == doctest::Approx(0.5).epsilon(1e-6));
    for (double p : bec.optimal_input.probs) CHECK(p == doctest::Approx(0.5).epsilon(1e-6));

    CHECK_THROWS_AS(blahut_arimoto(Dmc::binary_adder_mac(0.1), 1e-9), ParseError);
    CHECK_THROWS_AS(blahut_arimoto(Dmc::bsc(0.1), 0.0), ParseError);
}

TEST_CASE("blahut-arimoto objective is nondecreasing") {
    // Asymmetric channel so the solver actually iterates.
    Dmc zchan(ChannelRole::P2P, {{"0", "1"}}, {{"0", "1"}}, {1.0, 0.0, 0.3, 0.7}, "z");
    std::vector<double> trace;
    CapacityResult r = blahut_arimoto(zchan, 1e-10, 100000, &trace);
    CHECK(r.converged);
    CHECK(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] + 1e-12 >= trace[i - 1]);
    // Z-channel capacity has a closed form: log2(1 + (1-p) p^(p/(1-p))) with p = 0.3.
    const double p = 0.3;
    const double expect = std::log2(1.0 + (1.0 - p) * std::pow(p, p / (1.0 - p)));
    CHECK(r.capacity == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("mac lower points for the binary adder") {
    Dmc noiseless = Dmc::binary_adder_mac(0.0);
    auto pts = mac_lower_points(noiseless, {0.0, 0.5, 1.0}, 5);
    bool corner = false;
    for (const auto& pt : pts)
        if (std::abs(pt.rate("R1") - 1.0) < 1e-9 && std::abs(pt.rate("R2")) < 1e-9)
            corner = true;
    CHECK(corner);

    // Useless channel: only the origin.
    auto useless = mac_lower_points(Dmc::binary_adder_mac(0.5), {0.0, 0.5, 1.0}, 5);
    for (const auto& pt : useless) {
        CHECK(pt.rate("R1") == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(pt.rate("R2") == doctest::Approx(0.0).epsilon(1e-9));
    }

    // Symmetric split at p = 0.1: (1-H(0.1))/2 each.
    auto pts01 = mac_lower_points(Dmc::binary_adder_mac(0.1), {0.5}, 5);
    const double half = 0.5 * (1.0 - h2_oracle(0.1));
    bool split = false;
    for (const auto& pt : pts01)
        if (std::abs(pt.rate("R1") - half) < 1e-9 && std::abs(pt.rate("R2") - half) < 1e-9)
            split = true;
    CHECK(split);

    // Every point self-certifies against its witness.
    for (const auto& pt : pts01) CHECK(region_point_violation(Dmc::binary_adder_mac(0.1), pt) <= 1e-9);
}

TEST_CASE("degraded bc sweep matches the closed form") {
    // Receiver crossovers p1 = 0.1 and p1*p2 = 0.18 with independent noise.
    const double p1 = 0.1, q2 = 0.18;
    Dmc bc = Dmc::bsc_bc_independent(p1, q2);
    auto pts = degraded_bc_lower_points(bc, {0.5, 0.0, 0.1});
    REQUIRE(pts.size() == 3);

    // alpha = 0.5: (0, 1 - H(p1)).
    CHECK(pts[0].rate("R0") == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(pts[0].rate("R1") == doctest::Approx(1.0 - h2_oracle(p1)).epsilon(1e-9));
    // alpha = 0: (1 - H(q2), 0).
    CHECK(pts[1].rate("R0") == doctest::Approx(1.0 - h2_oracle(q2)).epsilon(1e-9));
    CHECK(pts[1].rate("R1") == doctest::Approx(0.0).epsilon(1e-9));
    // alpha = 0.1: (1 - H(0.1*0.18), H(0.1*0.1) - H(0.1)) via the star chain.
    auto chain = [](double a, double b) { return a + b - 2 * a * b; };
    CHECK(pts[2].rate("R0") == doctest::Approx(1.0 - h2_oracle(chain(0.1, q2))).epsilon(1e-9));
    CHECK(pts[2].rate("R1") ==
          doctest::Approx(h2_oracle(chain(0.1, p1)) - h2_oracle(p1)).epsilon(1e-9));

    for (const auto& pt : pts) CHECK(region_point_violation(bc, pt) <= 1e-9);
}

TEST_CASE("gaussian closed-form points") {
    auto bc = GaussianChannelSpec::bc(1, 1, 1, 1, 1, 0);
    RegionPoint a1 = gaussian_bc_lower_point(bc, 1.0);
    CHECK(a1.rate("R1") == doctest::Approx(0.0));
    CHECK(a1.rate("R2") == doctest::Approx(0.5 * std::log2(2.0)).epsilon(1e-12));
    RegionPoint a0 = gaussian_bc_lower_point(bc, 0.0);
    CHECK(a0.rate("R2") == doctest::Approx(0.0));
    CHECK(a0.rate("R1") == doctest::Approx(0.5 * std::log2(2.0)).epsilon(1e-12));
    RegionPoint mid = gaussian_bc_lower_point(bc, 0.5);
    CHECK(mid.rate("R1") == doctest::Approx(0.5 * std::log2(1.5)).epsilon(1e-12));
    CHECK(mid.rate("R2") == doctest::Approx(0.5 * std::log2(1.0 + 0.5 / 1.5)).epsilon(1e-12));
    CHECK(region_point_violation(bc, mid) <= 1e-12);
    CHECK_THROWS_AS(gaussian_bc_lower_point(bc, 1.5), ParseError);

    auto mac = GaussianChannelSpec::mac(1, 1, 1);
    RegionPoint corner = gaussian_mac_lower_corner(mac);
    CHECK(corner.rate("R1") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(corner.rate("R2") == doctest::Approx(0.5 * std::log2(1.5)).epsilon(1e-12));
    RegionPoint tiny = gaussian_mac_lower_corner(GaussianChannelSpec::mac(1e-12, 1e-12, 1));
    CHECK(tiny.rate("R1") == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(tiny.rate("R2") == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("region points self-certify on random channels") {
    Rng rng(99);
    for (int iter = 0; iter < 200; ++iter) {
        // Random 2x2 -> 2 MAC.
        std::vector<double> t;
        for (int row = 0; row < 4; ++row) {
            double a = rng.next_unit();
            t.push_back(a);
            t.push_back(1.0 - a);
        }
        Dmc mac(ChannelRole::MAC2, {{"0", "1"}, {"0", "1"}}, {{"0", "1"}}, t, "rand");
        auto pts = mac_lower_points(mac, {0.25, 0.75}, 3);
        for (const auto& pt : pts) CHECK(region_point_violation(mac, pt) <= 1e-9);
    }
}

TEST_CASE("explicit time sharing verifies") {
    Dmc mac = Dmc::binary_adder_mac(0.1);
    auto pts = mac_lower_points(mac, {0.0, 1.0}, 3);
    REQUIRE(pts.size() >= 2);
    RegionPoint mix = mac_time_share(mac, {pts.front(), pts.back()}, {1.0, 3.0});
    CHECK(region_point_violation(mac, mix) <= 1e-9);
    CHECK(mix.rate("R1") == doctest::Approx(0.25 * pts.front().rate("R1") +
                                            0.75 * pts.back().rate("R1"))
                                .epsilon(1e-12));
}
