#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qlab/contours.hpp"

namespace qlab::moments {

using FactorFn = std::function<cplx(cplx)>;

// ---- integrand factors ------------------------------------------------------

/// z -> prod_{m=1}^{n} a_m/(a_m - z) * exp((q-1) t z).
FactorFn qtasep_step_factor(long n, double t, double q, const std::vector<double>& a);

/// Exclusion-side factors: exp[-z(p-q)^2 t/((1+z)(p+qz))] times
/// ((1+z)/(1+z/tau))^{x-1} / (tau+z) (f1) or ((1+z)/(1+z/tau))^{x} (f2),
/// each carrying (-tau theta)/(z - tau theta) unless theta = infinity.
cplx asep_f1(long x, cplx z, double t, double tau, double theta);
cplx asep_f2(long x, cplx z, double t, double tau, double theta);

// ---- moment formulas --------------------------------------------------------

/// Free-evolution solution for the q-TASEP hierarchy at arbitrary labels
/// n_j >= 0 (alpha = 0: packed start; alpha > 0: q-geometric gap start).
MomentValue qtasep_u_formula(std::span<const long> nvec, double t, double q,
                             const std::vector<double>& a, double alpha = 0.0,
                             QuadratureOptions opts = {});

/// E[prod_j q^{x_{n_j}(t) + n_j}] for weakly decreasing positive n_j.
/// Equal labels with k > 4 are routed through the partition-indexed sum.
MomentValue qtasep_moment(std::span<const long> nvec, double t, double q,
                          const std::vector<double>& a, double alpha = 0.0,
                          QuadratureOptions opts = {});

/// Free-evolution solution for the exclusion hierarchy at arbitrary integer
/// labels (all contours the small circle around -tau).
MomentValue asep_u_formula(std::span<const long> xvec, double t, double tau, double rho,
                           QuadratureOptions opts = {});

/// E[Q~_{x_1}(t) ... Q~_{x_k}(t)] for strictly increasing x_j.
MomentValue asep_qtilde_moment(std::span<const long> xvec, double t, double tau, double rho,
                               QuadratureOptions opts = {});

/// nu~_k: k-fold integral of the Vandermonde ratio times f2(x,.)/z over the
/// -tau circle alone; building block of the two-contour decomposition.
MomentValue asep_nu_tilde(int k, long x, double t, double tau, double rho,
                          QuadratureOptions opts = {});

enum class AsepMomentRoute { Auto, Nested, QtildeSum };

/// E[tau^{n N_x(t)}]; Nested evaluates the two-component nested contours
/// directly (n <= 4), QtildeSum uses the binomial decomposition into nu~_k
/// (n <= 12).
MomentValue asep_moment(int n, long x, double t, double tau, double rho,
                        AsepMomentRoute route = AsepMomentRoute::Auto,
                        QuadratureOptions opts = {});

// ---- partition-indexed sums and cross-relations -----------------------------

enum class SignVariant { QTasep, Asep };

/// Partition-indexed reduction of the nested k-fold integral with all contours
/// collapsed onto `contour` (which encloses exactly the designated pole set):
///   k_q! sum_{lambda |- k} 1/(m_1! m_2! ...) (1-q)^k  x
///     l(lambda)-fold integral of det[ +-1/(w_i q^{lambda_i} - w_j) ] prod_j
///     f(w_j) f(q w_j) ... f(q^{lambda_j - 1} w_j).
/// Terms with l(lambda) <= 3 are evaluated by tensor quadrature; higher-order
/// sums go through coefficient extraction of det(I + sum_m xi^m B_m), which
/// reproduces the same l-fold integrals through the discretized kernels.
MomentValue mu_k_partition_sum(const FactorFn& f, const ContourSpec& contour, int k,
                               double base, SignVariant variant,
                               QuadratureOptions opts = {});

/// mu_k from its nested-contour definition (contours exclude 0):
///   (-1)^k q^{k(k-1)/2} integral of prod ratio prod f(z_i) dz_i / z_i.
MomentValue mu_nested(const FactorFn& f, const std::vector<ContourSpec>& contours,
                      double base, QuadratureOptions opts = {});

/// mu~_k: same integrand with 0 added inside every contour.
MomentValue mu_tilde_nested(const FactorFn& f, const std::vector<ContourSpec>& contours,
                            double base, QuadratureOptions opts = {});

/// Symmetrized single-contour form of mu~_k:
///   k_q!/k! (1-q^{-1})^k integral det[1/(w_i q^{-1} - w_j)] prod f(w_j) dw_j.
MomentValue mu_tilde_symmetrized(const FactorFn& f, const ContourSpec& contour, int k,
                                 double base, QuadratureOptions opts = {});

struct MuTildeRelationReport {
    double relation_residual = 0.0;     // mu~_k vs the base-1/q binomial sum over mu_j
    double symmetrized_residual = 0.0;  // nested mu~_k vs the symmetrized form
};

/// Cross-checks mu~_k = (-1)^k q^{k(k-1)/2} sum_j C(k,j)_{1/q} (-1)^j
/// q^{-j(j-1)/2} mu_j together with the symmetrized representation; f must
/// satisfy f(0) = 1 and have its poles enclosed by `pole_contours`.
MuTildeRelationReport mu_tilde_relation_check(const FactorFn& f,
                                              const std::vector<ContourSpec>& pole_contours,
                                              const std::vector<ContourSpec>& zero_contours,
                                              int k, double base,
                                              QuadratureOptions opts = {});

// ---- exact t = 0 reference values -------------------------------------------

/// Initial value of the q-geometric-gap start:
/// prod_{i=1}^k prod_{m=n_{i+1}+1}^{n_i} prod_{j=1}^{i} a_m/(a_m - alpha/q^j).
double qtasep_halfstat_t0(std::span<const long> nvec, double q, const std::vector<double>& a,
                          double alpha);

/// Initial value of the Bernoulli-density start:
/// 1_{x_1 > 0} prod_j rho tau^{k-j} (rho tau^{k-j+1} + 1 - rho)^{x_j - x_{j-1} - 1}.
double asep_stepbern_t0(std::span<const long> xvec, double tau, double rho);

}  // namespace qlab::moments
