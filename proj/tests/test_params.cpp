#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "aqrm/io.hpp"
#include "aqrm/params.hpp"

using namespace aqrm;

TEST_CASE("renormalize: direct definitions") {
    auto r = renormalize({1.0, 100.0, 5.0, 5.0, 0.5});
    CHECK(r.g_r == Catch::Approx(0.5).margin(1e-15));
    CHECK(r.g_cr == Catch::Approx(0.5).margin(1e-15));
    CHECK(r.kappa_bar == Catch::Approx(0.5).margin(1e-15));
    CHECK(r.epsilon() == Catch::Approx(1.0).margin(1e-15));

    auto r2 = renormalize({2.0, 800.0, 20.0, 8.0, 1.0});
    CHECK(r2.g_r == Catch::Approx(0.5).margin(1e-15));
    CHECK(r2.g_cr == Catch::Approx(0.2).margin(1e-15));
    CHECK(r2.kappa_bar == Catch::Approx(0.5).margin(1e-15));
    CHECK(r2.epsilon() == Catch::Approx(0.4).margin(1e-15));
}

TEST_CASE("renormalize: zero-coupling sentinels") {
    auto r = renormalize({1.0, 1.0, 0.0, 0.0, 0.0});
    CHECK(r.g_r == 0.0);
    CHECK(r.g_cr == 0.0);
    CHECK(std::isnan(r.epsilon()));

    auto anti = renormalize({1.0, 1.0, 0.0, 0.5, 0.0});
    CHECK(std::isinf(anti.epsilon()));
}

TEST_CASE("renormalize rejects nonpositive frequencies") {
    CHECK_THROWS_AS(renormalize({-1.0, 1.0, 0.0, 0.0, 0.0}), InvalidParams);
    CHECK_THROWS_AS(renormalize({1.0, 0.0, 0.0, 0.0, 0.0}), InvalidParams);
}

TEST_CASE("validate reports each violated invariant") {
    CHECK(validate({1.0, 100.0, 1.0, 1.0, 0.1}).empty());
    auto v = validate({-1.0, 100.0, 1.0, 1.0, 0.1});
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "omega0 > 0");
    auto v2 = validate({1.0, 100.0, 1.0, 1.0, -0.1});
    REQUIRE(v2.size() == 1);
    CHECK(v2[0] == "kappa >= 0");
    CHECK(validate({-1.0, -1.0, -1.0, -1.0, -1.0, -1.0}).size() == 6);
}

TEST_CASE("renormalize is scale invariant") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        ModelParams p{u(rng), 10.0 * u(rng), u(rng), u(rng), u(rng)};
        const double c = u(rng);
        ModelParams q{c * p.omega0, c * p.Omega, c * p.lambda_r, c * p.lambda_cr,
                      c * p.kappa};
        auto a = renormalize(p), b = renormalize(q);
        CHECK(a.g_r == Catch::Approx(b.g_r).epsilon(1e-14));
        CHECK(a.g_cr == Catch::Approx(b.g_cr).epsilon(1e-14));
        CHECK(a.kappa_bar == Catch::Approx(b.kappa_bar).epsilon(1e-14));
    }
}

TEST_CASE("renormalize after denormalize is the identity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        RenormalizedParams r{u(rng), u(rng), u(rng)};
        const double eta = 1.0 + 100.0 * u(rng);
        auto back = renormalize(denormalize(r, eta));
        CHECK(back.g_r == Catch::Approx(r.g_r).margin(1e-13));
        CHECK(back.g_cr == Catch::Approx(r.g_cr).margin(1e-13));
        CHECK(back.kappa_bar == Catch::Approx(r.kappa_bar).margin(1e-13));
    }
}

TEST_CASE("params from JSON: absolute and renormalized forms") {
    auto p = params_from_json(nlohmann::json{{"omega0", 1.0},
                                             {"Omega", 100.0},
                                             {"lambda_r", 5.0},
                                             {"lambda_cr", 5.0},
                                             {"kappa", 0.5}});
    CHECK(p.gamma_spin == 0.0);
    CHECK(p.eta() == Catch::Approx(100.0));

    auto q = params_from_json(nlohmann::json{
        {"g_r", 0.5}, {"g_cr", 0.8}, {"kappa_bar", 0.5}, {"eta", 200.0}});
    auto r = renormalize(q);
    CHECK(r.g_r == Catch::Approx(0.5).margin(1e-13));
    CHECK(r.g_cr == Catch::Approx(0.8).margin(1e-13));
    CHECK(q.eta() == Catch::Approx(200.0));

    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"omega0", 1.0}}), ConfigError);
    CHECK_THROWS_AS(
        params_from_json(nlohmann::json{
            {"g_r", 0.5}, {"g_cr", 0.8}, {"kappa_bar", -0.5}, {"eta", 200.0}}),
        ConfigError);
}
