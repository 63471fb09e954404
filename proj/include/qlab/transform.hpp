#pragma once

#include <functional>
#include <vector>

#include "qlab/numeric.hpp"

namespace qlab::transform {

/// Probability mass function on {m_min, m_min+1, ...}.
struct Pmf {
    long m_min = 0;
    std::vector<double> p;

    double at(long m) const {
        long i = m - m_min;
        return (i >= 0 && i < static_cast<long>(p.size())) ? p[static_cast<size_t>(i)] : 0.0;
    }
    double total() const;
    double mean() const;
};

/// fhat(zeta) = sum_{n>=0} f(n) / (zeta q^n; q)_inf  (support shifted by m_min).
cplx eq_laplace_forward(const Pmf& pmf, cplx zeta, double q);

/// f(m) = -q^m/(2 pi i) * closed integral of (q^{m+1} zeta; q)_inf fhat(zeta)
/// over a circle of radius q^{-m - radius_exponent} (poles q^{-M}, M <= m,
/// enclosed). Node count doubles until the estimate settles.
double eq_laplace_invert(const std::function<cplx(cplx)>& fhat, long m, double q,
                         double radius_exponent = 0.5, int nodes = 64, double tol = 1e-9);

/// P(N_x(t) = m), m = 0..m_max, via the Mellin-Barnes determinant and the
/// transform inversion. mb_nodes controls the kernel discretization.
Pmf recover_pmf_asep(long x, double t, double tau, double rho, long m_max,
                     int zeta_nodes = 64, int mb_nodes = 24);

/// P(x_n(t) = m) on the shifted lattice {-n, -n+1, ...}; m_count values.
Pmf recover_pmf_qtasep(long n, double t, double q, const std::vector<double>& a,
                       long m_count, int zeta_nodes = 64, int mb_nodes = 24);

}  // namespace qlab::transform
