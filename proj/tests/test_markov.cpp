#include <doctest.h>

#include <cmath>
#include <map>

#include "qlab/markov.hpp"
#include "qlab/qfunc.hpp"

using namespace qlab;
using namespace qlab::markov;

TEST_SUITE_BEGIN("markov");

TEST_CASE("q-geometric sampler") {
    Rng rng(3);
    SUBCASE("alpha = 0 is the point mass at 0") {
        for (int i = 0; i < 50; ++i) CHECK(sample_qgeometric(0.0, 0.5, rng) == 0);
    }
    SUBCASE("pmf sums to one") {
        double alpha = 0.3, q = 0.5;
        double norm = qfunc::q_pochhammer_inf(alpha, q).real();
        double sum = 0.0, ak = 1.0, qq = 1.0;
        for (int k = 0; k <= 100; ++k) {
            sum += norm * ak / qq;
            ak *= alpha;
            qq *= (1.0 - std::pow(q, k + 1));
        }
        CHECK(std::abs(sum - 1.0) < 1e-10);
    }
    SUBCASE("exponential moment matches the closed form") {
        // E[q^{-X}] = 1/(1 - alpha/q) for alpha < q
        double alpha = 0.2, q = 0.5;
        long trials = 100000;
        auto ens = mc_expectation(
            [&](Rng& r) { return std::pow(q, -static_cast<double>(sample_qgeometric(alpha, q, r))); },
            trials, 99);
        double expect = 1.0 / (1.0 - alpha / q);
        CHECK(std::abs(ens.mean - expect) < 3.0 * ens.std_error);
    }
}

TEST_CASE("packed and q-geometric initial data") {
    Rng rng(5);
    RateParams rates;
    rates.q = 0.5;
    auto step = init_qtasep(3, InitialData::step(), rates, rng);
    CHECK(step.positions == std::vector<long>{-1, -2, -3});

    auto half0 = init_qtasep(4, InitialData::half_stationary(0.0), rates, rng);
    CHECK(half0.positions == std::vector<long>{-1, -2, -3, -4});

    // gap-minus-one distribution matches the q-geometric law
    double alpha = 0.2;
    long trials = 60000;
    std::map<long, long> hist;
    for (long i = 0; i < trials; ++i) {
        Rng r(42, static_cast<std::uint64_t>(i));
        auto cfg = init_qtasep(3, InitialData::half_stationary(alpha), rates, r);
        long gap = cfg.positions[1] - cfg.positions[2] - 1;
        hist[gap]++;
    }
    double norm = qfunc::q_pochhammer_inf(alpha, rates.q).real();
    for (long k = 0; k <= 3; ++k) {
        double pk = norm * std::pow(alpha, k) / qfunc::q_pochhammer(rates.q, rates.q, k).real();
        double emp = static_cast<double>(hist[k]) / trials;
        double se = std::sqrt(pk * (1 - pk) / trials);
        CHECK(std::abs(emp - pk) < 3.5 * se + 1e-12);
    }
}

TEST_CASE("qtasep simulation basics") {
    RateParams rates;
    rates.q = 0.5;
    Rng rng(7);
    auto x0 = init_qtasep(4, InitialData::step(), rates, rng);
    SUBCASE("t = 0 leaves the configuration unchanged") {
        auto xt = simulate_qtasep(x0, rates, 0.0, rng);
        CHECK(xt.positions == x0.positions);
    }
    SUBCASE("ordering preserved along trajectories") {
        for (int rep = 0; rep < 200; ++rep) {
            Rng r(100, static_cast<std::uint64_t>(rep));
            auto xt = simulate_qtasep(x0, rates, 2.0, r);
            for (size_t i = 1; i < xt.positions.size(); ++i)
                CHECK(xt.positions[i] < xt.positions[i - 1]);
        }
    }
    SUBCASE("identical seeds give identical trajectories") {
        EventLog l1, l2;
        Rng r1(11, 4), r2(11, 4);
        auto a = simulate_qtasep(x0, rates, 1.5, r1, &l1);
        auto b = simulate_qtasep(x0, rates, 1.5, r2, &l2);
        CHECK(a.positions == b.positions);
        REQUIRE(l1.size() == l2.size());
        for (size_t i = 0; i < l1.size(); ++i) {
            CHECK(l1[i].time == l2[i].time);
            CHECK(l1[i].state_hash == l2[i].state_hash);
        }
    }
    SUBCASE("free particle transform matches the exponential") {
        // E[q^{x_1(t)+1}] = exp(-(1-q)t) for a single particle at rate 1
        double t = 1.0;
        auto ens = mc_expectation(
            [&](Rng& r) {
                ParticleConfig one;
                one.positions = {-1};
                auto xt = simulate_qtasep(one, rates, t, r);
                return std::pow(rates.q, static_cast<double>(xt.positions[0] + 1));
            },
            100000, 2024);
        double expect = std::exp(-(1.0 - rates.q) * t);
        CHECK(std::abs(ens.mean - expect) < 3.0 * ens.std_error);
    }
}

TEST_CASE("tazrp conservation and absorption") {
    RateParams rates;
    rates.q = 0.5;
    ZrpConfig y0;
    y0.counts = {0, 2, 0, 3};
    Rng rng(13);
    auto yt = simulate_tazrp(y0, rates, 0.0, rng);
    CHECK(yt.counts == y0.counts);
    for (int rep = 0; rep < 100; ++rep) {
        Rng r(500, static_cast<std::uint64_t>(rep));
        auto y = simulate_tazrp(y0, rates, 3.0, r);
        long total = 0;
        for (long c : y.counts) {
            CHECK(c >= 0);
            total += c;
        }
        CHECK(total == 5);
    }
}

TEST_CASE("gap process of the exclusion chain matches the zero-range law") {
    // gaps of a 4-particle packed start, observed at one site, against the
    // relabeled zero-range simulation with an infinite feeding site
    RateParams rates;
    rates.q = 0.5;
    rates.a = {1.0, 1.3, 0.8, 1.1};
    const double t = 0.8;
    const long trials = 40000;
    const long n = 4;

    std::map<long, long> gap_hist;
    for (long i = 0; i < trials; ++i) {
        Rng r(900, static_cast<std::uint64_t>(i));
        ParticleConfig x0;
        for (long j = 1; j <= n; ++j) x0.positions.push_back(-j);
        auto xt = simulate_qtasep(x0, rates, t, r);
        gap_hist[xt.positions[1] - xt.positions[2] - 1]++;  // gap below particle 2
    }

    // site j of the zero-range chain carries gap_{n-j}; rates a'_j = a_{n-j+1}
    RateParams zr;
    zr.q = rates.q;
    zr.a = {0.0, rates.a[3], rates.a[2], rates.a[1], rates.a[0]};
    std::map<long, long> zrp_hist;
    for (long i = 0; i < trials; ++i) {
        Rng r(901, static_cast<std::uint64_t>(i));
        ZrpConfig y0;
        y0.counts.assign(static_cast<size_t>(n) + 1, 0);
        y0.infinite.assign(static_cast<size_t>(n) + 1, false);
        y0.infinite[static_cast<size_t>(n)] = true;  // room above the lead particle
        auto y = simulate_tazrp(y0, zr, t, r);
        zrp_hist[y.counts[static_cast<size_t>(n - 2)]]++;  // gap_2
    }
    for (long g = 0; g <= 3; ++g) {
        double p1 = static_cast<double>(gap_hist[g]) / trials;
        double p2 = static_cast<double>(zrp_hist[g]) / trials;
        double se = std::sqrt((p1 * (1 - p1) + p2 * (1 - p2)) / trials);
        CHECK(std::abs(p1 - p2) < 3.5 * se + 1e-12);
    }
}

TEST_CASE("half-stationary gaps are stationary away from the lead particle") {
    RateParams rates;
    rates.q = 0.5;
    double alpha = 0.2, t = 0.5;
    long trials = 40000;
    std::map<long, long> hist;
    for (long i = 0; i < trials; ++i) {
        Rng r(321, static_cast<std::uint64_t>(i));
        auto x0 = init_qtasep(25, InitialData::half_stationary(alpha), rates, r);
        auto xt = simulate_qtasep(x0, rates, t, r);
        hist[xt.positions[14] - xt.positions[15] - 1]++;
    }
    double norm = qfunc::q_pochhammer_inf(alpha, rates.q).real();
    for (long k = 0; k <= 2; ++k) {
        double pk = norm * std::pow(alpha, k) / qfunc::q_pochhammer(rates.q, rates.q, k).real();
        double emp = static_cast<double>(hist[k]) / trials;
        double se = std::sqrt(pk * (1 - pk) / trials);
        CHECK(std::abs(emp - pk) < 3.5 * se + 1e-12);
    }
}

TEST_CASE("asep exclusion dynamics") {
    RateParams rates = RateParams::asep(0.4);
    Rng rng(17);
    SUBCASE("step data at t = 0") {
        auto eta = init_asep(InitialData::step(), -5, 5, rng);
        for (long x = -5; x <= 0; ++x) CHECK(eta.at(x) == 0);
        for (long x = 1; x <= 5; ++x) CHECK(eta.at(x) == 1);
        CHECK(eta.n_below(0) == 0);
        CHECK(eta.n_below(3) == 3);
    }
    SUBCASE("occupancies stay 0/1 and count is conserved") {
        auto eta0 = init_asep(InitialData::step(), -30, 30, rng);
        long count0 = eta0.n_below(30);
        for (int rep = 0; rep < 50; ++rep) {
            Rng r(700, static_cast<std::uint64_t>(rep));
            auto eta = simulate_asep(eta0, rates, 1.0, r);
            long c = 0;
            for (auto v : eta.occ) {
                CHECK((v == 0 || v == 1));
                c += v;
            }
            CHECK(c == count0);
        }
    }
    SUBCASE("windows scale with the horizon") { CHECK(asep_window_pad(1.0) == 60); }
}

TEST_CASE("ensemble statistics") {
    auto constant = mc_expectation([](Rng&) { return 1.0; }, 100, 1);
    CHECK(constant.mean == 1.0);
    CHECK(constant.std_error == 0.0);

    auto indicator = mc_expectation([](Rng& r) { return r.bernoulli(0.3) ? 1.0 : 0.0; }, 5000, 2);
    CHECK(indicator.mean >= 0.0);
    CHECK(indicator.mean <= 1.0);

    // doubling the ensemble shrinks the error like 1/sqrt(2)
    auto small = mc_expectation([](Rng& r) { return r.uniform01(); }, 20000, 3);
    auto big = mc_expectation([](Rng& r) { return r.uniform01(); }, 40000, 3);
    double ratio = big.std_error / small.std_error;
    CHECK(std::abs(ratio - 1.0 / std::sqrt(2.0)) < 0.2 / std::sqrt(2.0));
}

TEST_SUITE_END();
