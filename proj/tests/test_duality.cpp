#include <doctest.h>

#include <cmath>

#include "qlab/duality.hpp"

using namespace qlab;
using namespace qlab::duality;
using markov::InitialData;
using markov::OccupancyConfig;
using markov::ParticleConfig;
using markov::RateParams;
using markov::ZrpConfig;

TEST_SUITE_BEGIN("duality");

namespace {

ParticleConfig random_particles(Rng& rng, long n) {
    ParticleConfig x;
    long pos = 2 - static_cast<long>(rng.below(4));
    for (long i = 0; i < n; ++i) {
        x.positions.push_back(pos);
        pos -= 1 + static_cast<long>(rng.below(2));
    }
    return x;
}

ZrpConfig random_dual_state(Rng& rng, long n, long k, bool allow_site0) {
    ZrpConfig y;
    y.counts.assign(static_cast<size_t>(n) + 1, 0);
    for (long j = 0; j < k; ++j) {
        long site = allow_site0 ? static_cast<long>(rng.below(static_cast<std::uint64_t>(n) + 1))
                                : 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(n)));
        y.counts[static_cast<size_t>(site)]++;
    }
    return y;
}

OccupancyConfig random_occupancy(Rng& rng, long left, long len) {
    OccupancyConfig eta;
    eta.left = left;
    eta.occ.assign(static_cast<size_t>(len), 0);
    eta.right_full = false;
    for (size_t i = 1; i + 1 < eta.occ.size(); ++i) eta.occ[i] = rng.bernoulli(0.5) ? 1 : 0;
    return eta;
}

}  // namespace

TEST_CASE("pairing functionals") {
    double q = 0.5;
    ParticleConfig x;
    x.positions = {-1, -2, -3};
    ZrpConfig y;
    y.counts = {0, 1, 0, 0};
    CHECK(qtasep_H(x, y, q) == 1.0);  // q^{(-1+1)*1}

    ZrpConfig ybad = y;
    ybad.counts[0] = 2;
    CHECK(qtasep_H(x, ybad, q) == 0.0);

    OccupancyConfig eta;
    eta.left = -2;
    eta.occ = {0, 0, 0, 1, 1, 1};  // step: eta_x = 1_{x >= 1}
    eta.right_full = false;
    double tau = 0.4;
    long xs[] = {2};
    CHECK(asep_tilde_H(eta, xs, tau) == doctest::Approx(tau).epsilon(1e-14));  // N_1 = 1, eta_2 = 1
    long xs0[] = {0};
    CHECK(asep_tilde_H(eta, xs0, tau) == 0.0);  // eta_0 = 0
    CHECK(asep_H(eta, xs, tau) == doctest::Approx(tau * tau).epsilon(1e-14));  // N_2 = 2
}

TEST_CASE("generators annihilate constants") {
    Rng rng(31);
    RateParams rates;
    rates.q = 0.6;
    rates.a = {1.2, 0.7, 1.1, 0.9};
    auto x = random_particles(rng, 4);
    CHECK(std::abs(gen_qtasep([](const ParticleConfig&) { return 2.5; }, x, rates)) < 1e-14);
    auto y = random_dual_state(rng, 4, 3, true);
    CHECK(std::abs(gen_tazrp([](const ZrpConfig&) { return 2.5; }, y, rates)) < 1e-14);

    RateParams asep = RateParams::asep(0.4);
    auto eta = random_occupancy(rng, -5, 12);
    CHECK(std::abs(gen_asep_occ([](const OccupancyConfig&) { return 1.0; }, eta, asep)) < 1e-14);
    std::vector<long> xs{-1, 0, 2};
    CHECK(std::abs(gen_asep_part([](std::span<const long>) { return 1.0; }, xs, asep)) < 1e-14);
}

TEST_CASE("generator identity for the q-deformed pair over random states") {
    Rng rng(67);
    double worst = 0.0;
    for (int rep = 0; rep < 220; ++rep) {
        RateParams rates;
        rates.q = 0.15 + 0.75 * rng.uniform01();
        long n = 2 + static_cast<long>(rng.below(4));  // N <= 5
        for (long i = 0; i < n; ++i) rates.a.push_back(0.5 + 1.5 * rng.uniform01());
        auto x = random_particles(rng, n);
        long k = 1 + static_cast<long>(rng.below(4));  // k <= 4
        auto y = random_dual_state(rng, n, k, rng.bernoulli(0.2));
        worst = std::max(worst, residual_qtasep_duality(x, y, rates));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("generator identity for the exclusion pairings over random states") {
    Rng rng(68);
    double worst_tilde = 0.0, worst_h = 0.0;
    for (int rep = 0; rep < 220; ++rep) {
        RateParams rates = RateParams::asep(0.1 + 0.85 * rng.uniform01());
        auto eta = random_occupancy(rng, -6, 14);
        std::vector<long> xs;
        long x = -4 + static_cast<long>(rng.below(3));
        long k = 1 + static_cast<long>(rng.below(3));
        for (long j = 0; j < k; ++j) {
            xs.push_back(x);
            x += 1 + static_cast<long>(rng.below(3));
        }
        RateParams general = rates;
        general.bond_left = -10;
        for (int b = 0; b < 24; ++b) general.bond_a.push_back(0.5 + 1.5 * rng.uniform01());
        worst_tilde = std::max(worst_tilde, residual_asep_duality_tilde(eta, xs, general));
        worst_h = std::max(worst_h, residual_asep_duality_H(eta, xs, rates));
    }
    CHECK(worst_tilde < 1e-12);
    CHECK(worst_h < 1e-12);
}

TEST_CASE("enumerated zero-range chain") {
    RateParams rates;
    rates.q = 0.5;
    rates.a = {0.0, 1.0, 1.3};  // site rates a_1, a_2 (indexed by site)
    auto full = build_tazrp_chain(2, 2, rates, /*pin_site0=*/false);
    CHECK(full.states.size() == 6);  // compositions of 2 over 3 sites
    for (long s = 0; s < full.generator.rows(); ++s)
        CHECK(std::abs(full.generator.row(s).sum()) < 1e-14);

    auto pinned = build_tazrp_chain(2, 2, rates, /*pin_site0=*/true);
    CHECK(pinned.states.size() == 3);  // y_0 = 0 sector
    for (long s = 0; s < pinned.generator.rows(); ++s) {
        double rowsum = pinned.generator.row(s).sum();
        const auto& y = pinned.states[static_cast<size_t>(s)];
        if (y[1] > 0)
            CHECK(rowsum < -1e-12);  // flow into site 0 is killed
        else
            CHECK(std::abs(rowsum) < 1e-14);
    }
}

TEST_CASE("true-evolution basics") {
    RateParams rates;
    rates.q = 0.5;
    auto chain = build_tazrp_chain(3, 2, rates, true);
    VecR h0(chain.generator.rows());
    for (long s = 0; s < h0.size(); ++s) h0(s) = 1.0;

    SUBCASE("t = 0 returns the initial vector") {
        VecR ht = evolve_true_equation(chain, h0, 0.0);
        CHECK((ht - h0).norm() == 0.0);
    }
    SUBCASE("time derivative matches the generator at t = 0") {
        double dt = 1e-5;
        VecR hp = evolve_true_equation(chain, h0, dt);
        VecR fd = (hp - h0) / dt;
        VecR lh = chain.generator * h0;
        CHECK((fd - lh).lpNorm<Eigen::Infinity>() < 1e-4);
    }
    SUBCASE("sub-markov evolution contracts the max norm") {
        VecR ht = evolve_true_equation(chain, h0, 1.7);
        CHECK(ht.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-12);
        for (long s = 0; s < ht.size(); ++s) CHECK(ht(s) >= -1e-14);
    }
    SUBCASE("one-particle closed form") {
        RateParams r1;
        r1.q = 0.5;
        r1.a = {0.0, 1.4};  // a_1 = 1.4
        auto c1 = build_tazrp_chain(1, 1, r1, true);
        REQUIRE(c1.states.size() == 1);
        VecR one(1);
        one(0) = 0.8;
        VecR ht = evolve_true_equation(c1, one, 0.9);
        double expect = 0.8 * std::exp(-1.4 * (1.0 - 0.5) * 0.9);
        CHECK(std::abs(ht(0) - expect) < 1e-12);
    }
}

TEST_CASE("dynamic duality against the dual matrix exponential") {
    SUBCASE("q-deformed pair, three particles vs two dual particles") {
        RateParams rates;
        rates.q = 0.5;
        ParticleConfig x0;
        x0.positions = {-1, -2, -3};
        ZrpConfig y0;
        y0.counts = {0, 1, 1, 0};
        auto res = check_duality_dynamic_qtasep(x0, y0, rates, 0.5, 30000, 555);
        CHECK(res.mc_se > 0.0);
        CHECK(res.pass());
        auto res0 = check_duality_dynamic_qtasep(x0, y0, rates, 0.0, 100, 555);
        CHECK(res0.diff() < 1e-14);  // both sides equal H(x0, y0)
    }
    SUBCASE("exclusion pair, one dual particle on a step background") {
        RateParams rates = RateParams::asep(0.4);
        Rng rng(9);
        long pad = markov::asep_window_pad(0.4);
        auto eta0 = markov::init_asep(InitialData::step(), 2 - pad, 2 + pad, rng);
        std::vector<long> xs{2};
        auto res = check_duality_dynamic_asep(eta0, xs, rates, 0.4, 30000, 556);
        CHECK(res.pass());
    }
}

TEST_CASE("schrodinger collapse on symmetric functions") {
    auto v = [](std::span<const long> n) {
        double s = 1.0;
        for (long ni : n) s *= (1.0 + 0.3 * ni + 0.07 * ni * ni);
        return s;
    };
    std::vector<long> nvec{4, 4, 4, 2};
    CHECK(schrodinger_collapse_residual(v, nvec, 3, 0.5) < 1e-12);
    std::vector<long> nvec2{5, 5, 1};
    CHECK(schrodinger_collapse_residual(v, nvec2, 2, 0.35) < 1e-12);
}

TEST_CASE("residual records serialize to json") {
    std::vector<ResidualRecord> recs{{"gen-duality", "q=0.5", 1e-15, 1e-12, true}};
    std::string js = residuals_to_json(recs);
    CHECK(js.find("\"check\": \"gen-duality\"") != std::string::npos);
    CHECK(js.find("\"pass\": true") != std::string::npos);
}

TEST_SUITE_END();
