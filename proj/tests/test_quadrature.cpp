#include <doctest.h>

#include <cmath>

#include "qlab/contours.hpp"

using namespace qlab;
using namespace qlab::moments;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("residues on circles") {
    auto unit = ContourSpec::circle(cplx(0.0), 1.0);
    auto one = nested_quadrature([](std::span<const cplx> z) { return 1.0 / z[0]; }, {unit});
    CHECK(std::abs(one.value - 1.0) < 1e-14);

    auto shifted = nested_quadrature([](std::span<const cplx> z) { return 1.0 / (z[0] - 0.5); },
                                     {unit});
    CHECK(std::abs(shifted.value - 1.0) < 1e-14);

    // pole outside: zero
    auto outside = nested_quadrature([](std::span<const cplx> z) { return 1.0 / (z[0] - 2.0); },
                                     {unit});
    CHECK(std::abs(outside.value) < 1e-14);
}

TEST_CASE("union contour picks up both residues") {
    ContourSpec c;
    c.components.push_back(Circle{cplx(0.0), 0.3});
    c.components.push_back(Circle{cplx(2.0), 0.3});
    auto v = nested_quadrature(
        [](std::span<const cplx> z) { return 1.0 / z[0] + 1.0 / (z[0] - 2.0); }, {c});
    CHECK(std::abs(v.value - 2.0) < 1e-13);
}

TEST_CASE("doubling changes analytic integrals below tolerance") {
    auto circle = ContourSpec::circle(cplx(1.0), 0.6);
    QuadratureOptions opts;
    opts.initial_nodes = 64;
    auto a = nested_quadrature(
        [](std::span<const cplx> z) { return std::exp(z[0]) / (z[0] - 1.1); }, {circle}, opts);
    opts.initial_nodes = 128;
    auto b = nested_quadrature(
        [](std::span<const cplx> z) { return std::exp(z[0]) / (z[0] - 1.1); }, {circle}, opts);
    CHECK(std::abs(a.value - b.value) < 1e-12);
}

TEST_CASE("two-fold tensor product with separable factors") {
    auto c1 = ContourSpec::circle(cplx(0.0), 1.0);
    auto c2 = ContourSpec::circle(cplx(0.0), 0.5);
    auto v = nested_quadrature(
        [](std::span<const cplx> z) { return 1.0 / (z[0] * z[1]); }, {c1, c2});
    CHECK(std::abs(v.value - 1.0) < 1e-13);
}

TEST_CASE("vandermonde evaluator matches the generic path") {
    auto c1 = ContourSpec::circle(cplx(1.0), 0.8);
    auto c2 = ContourSpec::circle(cplx(1.0), 0.4);
    double q = 0.5;
    auto generic = nested_quadrature(
        [q](std::span<const cplx> z) {
            return (z[0] - z[1]) / (z[0] - q * z[1]) / ((1.2 - z[0]) * (1.2 - z[1]) * z[0] * z[1]);
        },
        {c1, c2});
    std::vector<std::function<cplx(cplx)>> factors(
        2, std::function<cplx(cplx)>([](cplx z) { return 1.0 / ((1.2 - z) * z); }));
    auto fast = nested_vandermonde_quadrature(factors, q, {c1, c2});
    CHECK(std::abs(generic.value - fast.value) < 1e-11);
}

TEST_CASE("qtasep nested contour builder validates") {
    for (double q : {0.3, 0.5, 0.8}) {
        for (int k = 1; k <= 3; ++k) {
            auto contours = build_qtasep_nested_contours(k, q, {});
            CHECK(static_cast<int>(contours.size()) == k);
            // outermost circle excludes 0 with visible margin
            CHECK(contours[0].clearance(cplx(0.0)) > 1e-3);
        }
    }
    // spread-out rates still enclosed
    auto contours = build_qtasep_nested_contours(3, 0.5, {1.04, 0.96, 1.02});
    for (const auto& c : contours) {
        CHECK(c.contains(cplx(1.04)));
        CHECK(c.contains(cplx(0.96)));
    }
    // hopelessly spread rates rejected
    CHECK_THROWS_AS((void)build_qtasep_nested_contours(2, 0.5, {3.0, 0.2}),
                    ContourInfeasibleError);
}

TEST_CASE("half-stationary union builder validates") {
    auto contours = build_qtasep_halfstat_contours(2, 0.5, {}, 0.1);
    CHECK(contours[0].components.size() == 2);
    CHECK(contours[1].components.size() == 1);
    for (const auto& c : contours) {
        CHECK(!c.contains(cplx(0.2)));  // alpha/q
        CHECK(!c.contains(cplx(0.4)));  // alpha/q^2
        CHECK(c.contains(cplx(1.0)));
    }
    CHECK_THROWS_AS((void)build_qtasep_halfstat_contours(2, 0.5, {}, 0.3),
                    ContourInfeasibleError);  // alpha q^{-k} >= 1
}

TEST_CASE("asep contour builders validate") {
    double inf = std::numeric_limits<double>::infinity();
    auto cm = build_c_minus_tau(0.4, inf);
    CHECK(cm.contains(cplx(-0.4)));
    CHECK(!cm.contains(cplx(-1.0)));
    CHECK(!cm.contains(cplx(0.0)));

    for (int k = 1; k <= 3; ++k) {
        auto contours = build_asep_nested_contours(k, 0.4, inf);
        for (const auto& c : contours) {
            CHECK(c.contains(cplx(0.0)));
            CHECK(c.contains(cplx(-0.4)));
            CHECK(!c.contains(cplx(-1.0)));
        }
    }
    // rho = 0.5: tau*theta must stay outside
    auto with_theta = build_asep_nested_contours(2, 0.4, 1.0);
    for (const auto& c : with_theta) CHECK(!c.contains(cplx(0.4)));

    auto mb = build_asep_mb_contour(0.4, inf);
    CHECK(mb.contains(cplx(0.0)));
    CHECK(mb.contains(cplx(-0.4)));
    CHECK(!mb.contains(cplx(-1.0)));
    // dilation safety: max |w| < sqrt(tau)
    const auto& circ = mb.components[0];
    CHECK(std::abs(circ.center) + circ.radius < std::sqrt(0.4));
}

TEST_CASE("validator rejects a broken family") {
    // same-size circles cannot contain their own q-dilation shifted copies
    std::vector<ContourSpec> bad{ContourSpec::circle(cplx(1.0), 0.2),
                                 ContourSpec::circle(cplx(1.0), 0.9)};
    CHECK_THROWS_AS(
        validate_nested_family(bad, 0.5, ScaledRelation::Contain, {cplx(1.0)}, {cplx(0.0)}, 1e-3),
        ContourInfeasibleError);
}

TEST_SUITE_END();
