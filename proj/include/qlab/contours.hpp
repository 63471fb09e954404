#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qlab/numeric.hpp"

namespace qlab::moments {

struct Circle {
    cplx center;
    double radius = 0.0;
};

/// Closed counter-clockwise contour: a union of pairwise disjoint circles.
/// (Infinite contours — vertical lines, the Gamma-detour path, truncated ray
/// pairs — are discretized by their owners in fredholm / asymptotics.)
struct ContourSpec {
    std::vector<Circle> components;

    static ContourSpec circle(cplx c, double r) { return ContourSpec{{Circle{c, r}}}; }
    bool contains(cplx p) const;          // p strictly inside the enclosed region
    double clearance(cplx p) const;       // distance from p to the nearest curve point
};

/// Discrete nodes/weights; weights carry the parametrization derivative and
/// the 1/(2 pi i) normalization, so sum w_j f(z_j) ~ (1/2 pi i) closed integral of f.
struct QuadratureRule {
    std::vector<cplx> nodes;
    std::vector<cplx> weights;
};

QuadratureRule discretize(const ContourSpec& contour, int nodes_per_component);

struct MomentValue {
    cplx value{0.0};
    double err = 0.0;   // node-doubling estimate
    int nodes = 0;      // nodes per contour component in the final pass
};

struct QuadratureOptions {
    int initial_nodes = 128;
    int max_nodes = 512;
    double tol = 1e-10;
    bool strict = true;  // throw NonConvergenceError if tol unmet at max_nodes
};

/// Tensor-product quadrature of a general k-variable integrand over closed
/// contours, normalized by (1/2 pi i)^k. Cost grows like M^k; k <= 4.
MomentValue nested_quadrature(const std::function<cplx(std::span<const cplx>)>& integrand,
                              const std::vector<ContourSpec>& contours,
                              QuadratureOptions opts = {});

/// Specialized evaluator for integrands of the form
///   prod_{A<B} (z_A - z_B)/(z_A - ratio_base * z_B) * prod_j f_j(z_j),
/// with per-contour factor tables precomputed once per refinement level.
MomentValue nested_vandermonde_quadrature(const std::vector<std::function<cplx(cplx)>>& factors,
                                          double ratio_base,
                                          const std::vector<ContourSpec>& contours,
                                          QuadratureOptions opts = {});

// ---- contour builders ----------------------------------------------------

struct QTasepContourConfig {
    double inner_radius_floor = 0.15;  // innermost circle, step-data family
    double margin_fraction = 0.4;      // share of the radial budget spent on nesting margins
    double union_growth = 1.2;         // half-stationary family: rho_m = rho_0 (growth*q)^m
    double min_clearance = 1e-3;
};

/// Nested circles centered at 1 for the step-data moment formula: the contour
/// for z_A strictly contains q * (contour for z_B), B > A, and every a_m, but
/// excludes 0. Index 0 is the outermost (z_1) contour.
std::vector<ContourSpec> build_qtasep_nested_contours(int k, double q,
                                                      const std::vector<double>& a,
                                                      QTasepContourConfig cfg = {});

/// Half-stationary variant: unions of circles around q^m * (a-cluster) so that
/// each contour contains its q-dilated successor and all a_m while excluding
/// every alpha/q^j, j = 1..k. Requires alpha q^{-k} < min a_m.
std::vector<ContourSpec> build_qtasep_halfstat_contours(int k, double q,
                                                        const std::vector<double>& a,
                                                        double alpha,
                                                        QTasepContourConfig cfg = {});

struct AsepContourConfig {
    double growth_delta = 0.4;   // radius ratio between 0-circles is (1+delta)/tau
    double safety = 0.6;         // fraction of the binding exclusion distance used
    double minus_tau_shrink = 6; // C_{-tau} radius = min(1-tau, |tau theta + tau|)/shrink
    double min_clearance = 1e-3;
};

/// Small circle around -tau excluding -1, tau*theta and its own tau-image.
/// theta = rho/(1-rho); pass theta = infinity for rho = 1.
ContourSpec build_c_minus_tau(double tau, double theta, AsepContourConfig cfg = {});

/// Contours for the ASEP moment formula: the z_A contour is the union of the
/// circle around -tau with a circle around 0 of radius r0 * r^A, r > 1/tau,
/// so that z_A's contour contains 0 and -tau but excludes -1, tau*theta and
/// tau * (z_B contour) for all B > A. Index 0 is the z_1 contour.
std::vector<ContourSpec> build_asep_nested_contours(int k, double tau, double theta,
                                                    AsepContourConfig cfg = {});

/// Circle containing {0, -tau}, excluding {-1, tau*theta}; hosts the
/// Mellin-Barnes and related single-contour kernels.
ContourSpec build_asep_mb_contour(double tau, double theta);

/// Star-shaped (about 0) circle containing 0 and all a_m.
ContourSpec build_qtasep_star_contour(const std::vector<double>& a);

/// Circle |w-1| = d with max |a_m - 1| < d < (1 - q^delta)/(1 + q^delta).
ContourSpec build_qtasep_mb_contour(const std::vector<double>& a, double q, double delta);

enum class ScaledRelation {
    Contain,  // contour A strictly contains ratio * (contour B) for all B > A
    Exclude,  // contour A strictly excludes ratio * (contour B) for all B > A
};

/// Geometric feasibility check used by the builders and by the
/// contour-perturbation stability tests. Throws ContourInfeasibleError with
/// the failing constraint when any clearance drops below min_clearance.
void validate_nested_family(const std::vector<ContourSpec>& nested, double ratio_base,
                            ScaledRelation relation,
                            const std::vector<cplx>& must_contain,
                            const std::vector<cplx>& must_exclude, double min_clearance);

}  // namespace qlab::moments
