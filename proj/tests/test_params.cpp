#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mono2d/params.hpp"

using namespace mono2d;

namespace {
constexpr double kF0Min256 = 1.0 / 256.0;
constexpr double kF0Max = 0.5;
} // namespace

TEST_CASE("bound_f0 midpoint and asymptotes") {
    CHECK(bound_f0(0.0, kF0Min256, kF0Max) == 0.251953125);
    const double hi = bound_f0(50.0, kF0Min256, kF0Max);
    CHECK(hi < kF0Max);
    CHECK(hi > 0.4999);
    const double lo = bound_f0(-50.0, kF0Min256, kF0Max);
    CHECK(lo > kF0Min256);
    CHECK(lo < kF0Min256 + 1e-10);
}

TEST_CASE("bound_sigma_r values") {
    CHECK(bound_sigma_r(0.0) == 0.5);
    CHECK(bound_sigma_r(0.05) == doctest::Approx(1.0 / (1.0 + std::exp(-0.05))).epsilon(1e-15));
    CHECK(bound_sigma_r(0.05) == doctest::Approx(0.512497).epsilon(1e-6));
    const double tiny = bound_sigma_r(-50.0);
    CHECK(tiny > 0.0);
    CHECK(tiny < 1e-20);
}

TEST_CASE("bounds hold for extreme unbounded values") {
    for (double x : {1e6, -1e6, 700.0, -700.0, 37.0, -37.0}) {
        const double f0 = bound_f0(x, kF0Min256, kF0Max);
        CHECK(f0 > kF0Min256);
        CHECK(f0 < kF0Max);
        CHECK(std::isfinite(f0));
        const double sr = bound_sigma_r(x);
        CHECK(sr > 0.0);
        CHECK(sr < 1.0);
    }
}

TEST_CASE("bound maps are strictly monotonic over the resolvable range") {
    double prev_f0 = bound_f0(-30.0, kF0Min256, kF0Max);
    double prev_sr = bound_sigma_r(-30.0);
    for (double x = -29.5; x <= 30.0; x += 0.5) {
        const double f0 = bound_f0(x, kF0Min256, kF0Max);
        const double sr = bound_sigma_r(x);
        CHECK(f0 > prev_f0);
        CHECK(sr > prev_sr);
        prev_f0 = f0;
        prev_sr = sr;
    }
}

TEST_CASE("bound_gradients closed form and positivity") {
    const auto g = bound_gradients(0.0, 0.0, kF0Min256, kF0Max);
    CHECK(g.df0_df0_star == doctest::Approx(0.25 * (kF0Max - kF0Min256)).epsilon(1e-15));
    CHECK(g.df0_df0_star == doctest::Approx(0.1240234375).epsilon(1e-12));
    CHECK(g.dsigma_r_dsigma_r_star == 0.25);
    for (double x : {-1e6, -5.0, 0.3, 8.0, 1e6}) {
        const auto gg = bound_gradients(x, x, kF0Min256, kF0Max);
        CHECK(gg.df0_df0_star > 0.0);
        CHECK(gg.dsigma_r_dsigma_r_star > 0.0);
    }
}

TEST_CASE("bound_gradients matches finite differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(-4.0, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double x = ux(rng), y = ux(rng);
        const auto g = bound_gradients(x, y, kF0Min256, kF0Max);
        const double h = 1e-6;
        const double fd_f0 = (bound_f0(x + h, kF0Min256, kF0Max) - bound_f0(x - h, kF0Min256, kF0Max)) / (2 * h);
        const double fd_sr = (bound_sigma_r(y + h) - bound_sigma_r(y - h)) / (2 * h);
        CHECK(g.df0_df0_star == doctest::Approx(fd_f0).epsilon(1e-8));
        CHECK(g.dsigma_r_dsigma_r_star == doctest::Approx(fd_sr).epsilon(1e-8));
    }
}

TEST_CASE("init_bank determinism and bounds") {
    const FilterBank a = FilterBank::init(8, 256, 256, 77);
    const FilterBank b = FilterBank::init(8, 256, 256, 77);
    CHECK(a == b);
    const FilterBank c = FilterBank::init(8, 256, 256, 78);
    CHECK(a.f0_star(0) != c.f0_star(0));

    CHECK(a.f0_min() == kF0Min256);
    CHECK(a.f0_max() == 0.5);
    for (std::uint64_t seed : {1ull, 42ull, 12345ull, 999999ull}) {
        const FilterBank bank = FilterBank::init(8, 256, 256, seed);
        for (int i = 0; i < bank.n_scales(); ++i) {
            CHECK(bank.f0(i) > bank.f0_min());
            CHECK(bank.f0(i) < bank.f0_max());
            // sigma_r* ~ N(0, 0.05) keeps sigmoid well inside (0.4, 0.6)
            CHECK(bank.sigma_r(i) > 0.4);
            CHECK(bank.sigma_r(i) < 0.6);
        }
    }
}

TEST_CASE("init_bank f0_min follows the longer image side") {
    const FilterBank wide = FilterBank::init(2, 64, 512, 5);
    CHECK(wide.f0_min() == 1.0 / 512.0);
    const FilterBank tall = FilterBank::init(2, 512, 64, 5);
    CHECK(tall.f0_min() == 1.0 / 512.0);
}

TEST_CASE("init_bank rejects bad configs") {
    CHECK_THROWS_AS(FilterBank::init(0, 64, 64, 1), ConfigError);
    CHECK_THROWS_AS(FilterBank::init(4, 1, 64, 1), InvalidShapeError);
}

TEST_CASE("flat parameter indexing covers f0 then sigma") {
    FilterBank bank = FilterBank::init(3, 64, 64, 9);
    CHECK(bank.parameter_count() == 6);
    bank.set_parameter(1, 2.5);
    bank.set_parameter(4, -1.5);
    CHECK(bank.f0_star(1) == 2.5);
    CHECK(bank.sigma_r_star(1) == -1.5);
    CHECK(bank.parameter(1) == 2.5);
    CHECK(bank.parameter(4) == -1.5);
}

TEST_CASE("checkpoint text round trip is bit-faithful") {
    FilterBank bank = FilterBank::init(5, 200, 100, 31);
    bank.set_f0_star(2, 0.1 + 0.2); // force a value with a noisy binary tail
    bank.set_sigma_r_star(4, -1.2345678912345678e-7);
    std::stringstream buf;
    bank.save(buf);
    const FilterBank back = FilterBank::load(buf);
    CHECK(back == bank);
    for (int i = 0; i < bank.n_scales(); ++i) {
        CHECK(back.f0_star(i) == bank.f0_star(i));
        CHECK(back.sigma_r_star(i) == bank.sigma_r_star(i));
    }
}

TEST_CASE("checkpoint loader rejects corrupt input") {
    std::stringstream missing("bank.n_scales 2\nbank.f0_min 0.01\n");
    CHECK_THROWS_AS(FilterBank::load(missing), CheckpointError);
    std::stringstream garbage("bank.n_scales 2\nbank.f0_min abc\nbank.f0_max 0.5\n");
    CHECK_THROWS_AS(FilterBank::load(garbage), CheckpointError);
    std::stringstream bad_bounds(
        "bank.n_scales 1\nbank.f0_min 0.7\nbank.f0_max 0.5\nbank.f0_star.0 0\nbank.sigma_r_star.0 0\n");
    CHECK_THROWS_AS(FilterBank::load(bad_bounds), CheckpointError);
}
