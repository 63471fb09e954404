#include "qlab/transform.hpp"

#include <cmath>

#include "qlab/fredholm.hpp"
#include "qlab/qfunc.hpp"

namespace qlab::transform {

double Pmf::total() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
}

double Pmf::mean() const {
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) s += (m_min + static_cast<long>(i)) * p[i];
    return s;
}

cplx eq_laplace_forward(const Pmf& pmf, cplx zeta, double q) {
    cplx s = 0.0;
    for (size_t i = 0; i < pmf.p.size(); ++i) {
        if (pmf.p[i] == 0.0) continue;
        long n = pmf.m_min + static_cast<long>(i);
        require(n >= 0, "eq_laplace_forward: support must lie in {0,1,...}");
        s += pmf.p[i] / qfunc::q_pochhammer_inf(zeta * std::pow(q, n), q);
    }
    return s;
}

double eq_laplace_invert(const std::function<cplx(cplx)>& fhat, long m, double q,
                         double radius_exponent, int nodes, double tol) {
    require(m >= 0, "eq_laplace_invert: m >= 0");
    const double radius = std::pow(q, -static_cast<double>(m) - radius_exponent);
    double qm1 = std::pow(q, m + 1);
    cplx prev = 0.0;
    bool have_prev = false;
    cplx val = 0.0;
    for (int mm = nodes; mm <= 8 * nodes; mm *= 2) {
        val = 0.0;
        for (int j = 0; j < mm; ++j) {
            // offset keeps nodes away from the poles on the positive real axis
            double theta = 2.0 * PI * (j + 0.5) / mm;
            cplx z = radius * std::exp(cplx(0, theta));
            val += qfunc::q_pochhammer_inf(qm1 * z, q) * fhat(z) * z / static_cast<double>(mm);
        }
        val *= -std::pow(q, m);
        if (have_prev && std::abs(val - prev) <= tol) return val.real();
        prev = val;
        have_prev = true;
    }
    throw NonConvergenceError("eq_laplace_invert: contour quadrature did not settle");
}

Pmf recover_pmf_asep(long x, double t, double tau, double rho, long m_max, int zeta_nodes,
                     int mb_nodes) {
    fredholm::KernelSpec spec = fredholm::AsepMB{x, t, tau, rho};
    auto fhat = [&](cplx zeta) { return fredholm::transform_via_mb(spec, zeta, mb_nodes).value; };
    Pmf pmf;
    pmf.m_min = 0;
    pmf.p.resize(static_cast<size_t>(m_max) + 1);
    for (long m = 0; m <= m_max; ++m)
        pmf.p[static_cast<size_t>(m)] = eq_laplace_invert(fhat, m, tau, 0.5, zeta_nodes, 1e-7);
    return pmf;
}

Pmf recover_pmf_qtasep(long n, double t, double q, const std::vector<double>& a, long m_count,
                       int zeta_nodes, int mb_nodes) {
    fredholm::KernelSpec spec = fredholm::QTasepMB{n, t, q, a};
    auto fhat = [&](cplx zeta) { return fredholm::transform_via_mb(spec, zeta, mb_nodes).value; };
    Pmf pmf;
    pmf.m_min = -n;  // x_n(t) lives on {-n, -n+1, ...}
    pmf.p.resize(static_cast<size_t>(m_count));
    for (long j = 0; j < m_count; ++j)
        pmf.p[static_cast<size_t>(j)] = eq_laplace_invert(fhat, j, q, 0.5, zeta_nodes, 1e-7);
    return pmf;
}

}  // namespace qlab::transform
