#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "qlab/contours.hpp"
#include "qlab/linalg.hpp"

namespace qlab::fredholm {

using moments::ContourSpec;
using moments::QuadratureRule;

using KernelFn = std::function<cplx(cplx, cplx)>;

struct DetValue {
    cplx value{1.0};
    double err = 0.0;
    int nodes = 0;
};

/// det(I + A), A_{ij} = K(w_i, w_j) weight_j, with a node-doubling estimate.
DetValue nystrom_det(const KernelFn& kernel, const ContourSpec& contour, int nodes = 64,
                     int max_nodes = 256, double tol = 1e-9);

/// Truncated Fredholm series 1 + sum_{n<=n_max} (1/n!) int det[K(x_i,x_j)];
/// independent cross-check of nystrom_det. Cost M^n per term; n_max <= 5.
cplx series_det(const KernelFn& kernel, const ContourSpec& contour, int nodes, int n_max);

/// First series term (the trace) at the given discretization.
cplx trace_term(const KernelFn& kernel, const ContourSpec& contour, int nodes);

// ---- kernel specifications --------------------------------------------------

struct QTasepMB {
    long n = 1;
    double t = 1.0, q = 0.5;
    std::vector<double> a;
    double delta = 0.5;  // real part of the vertical integration line, in (0,1)
};

struct QTasepCauchy {
    long n = 1;
    double t = 1.0, q = 0.5;
    std::vector<double> a;
};

struct AsepMB {
    long x = 0;
    double t = 1.0, tau = 0.4, rho = 1.0;
    double R = 0.0;  // 0: smallest admissible half-integer >= 1.5
    double d = 0.25;
};

struct AsepCauchy {
    long x = 0;
    double t = 1.0, tau = 0.4, rho = 1.0;
};

/// Large-circle form of the exclusion Cauchy kernel in the xi variable,
/// xi = (1+w)/(1+w/tau). radius = 0 picks the exact image of the -tau circle.
struct AsepTW {
    long x = 0;
    double t = 1.0, tau = 0.4, rho = 1.0;
    double radius = 0.0;
};

struct OYPolymer {
    long n = 1;
    double t = 0.5;
    double contour_radius = 0.2;  // must keep |v - v'| < 1/2
};

using KernelSpec = std::variant<QTasepMB, QTasepCauchy, AsepMB, AsepCauchy, AsepTW, OYPolymer>;

/// Integral-kernel value K_zeta(w, w2) of a Mellin-Barnes type kernel
/// (QTasepMB, AsepMB or OYPolymer; zeta is the transform argument, u for the
/// polymer kernel). Validates the contour hypotheses on first use.
cplx eval_kernel_mb(const KernelSpec& spec, cplx zeta, cplx w, cplx w2);

/// sum_{n>=1} f(q^n) zeta^n vs the line integral of
/// Gamma(-s)Gamma(1+s)(-zeta)^s f(q^s) over Re s = 1/2; |zeta| < 1, zeta not
/// on the positive real axis.
double mellin_barnes_sum_check(const std::function<cplx(cplx)>& f, cplx zeta, double q);

/// E_q-Laplace transform E[1/(zeta q^{X}; q)_inf] of X = x_n(t)+n (packed
/// start) or X = N_x(t) (Bernoulli start), via the Mellin-Barnes determinant.
DetValue transform_via_mb(const KernelSpec& spec, cplx zeta, int nodes = 48);

/// Same transform via the Cauchy-type determinant divided by (zeta; q)_inf.
DetValue transform_via_cauchy(const KernelSpec& spec, cplx zeta, int nodes = 64);

/// det(I - zeta K) for the Cauchy-type kernels (the entire numerator of the
/// transform; sign conventions follow the kernel variant).
DetValue cauchy_det(const KernelSpec& spec, cplx zeta, int nodes = 64);

/// Default contour hosting the given kernel.
ContourSpec kernel_contour(const KernelSpec& spec);

/// O'Connell-Yor Laplace-transform determinant det(I + K_u).
DetValue oy_det(cplx u, long n, double t, int nodes = 48, double contour_radius = 0.2);

}  // namespace qlab::fredholm
