#include "qlab/moments.hpp"

#include <algorithm>
#include <cmath>

#include "qlab/linalg.hpp"
#include "qlab/qfunc.hpp"

namespace qlab::moments {

namespace {

bool weakly_decreasing(std::span<const long> v) {
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1]) return false;
    return true;
}

bool strictly_increasing(std::span<const long> v) {
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[i - 1]) return false;
    return true;
}

std::pair<double, double> asep_pq(double tau) {
    return {tau / (1.0 + tau), 1.0 / (1.0 + tau)};
}

cplx asep_exp_factor(cplx z, double t, double tau) {
    auto [p, q] = asep_pq(tau);
    double g2 = (p - q) * (p - q);
    return std::exp(-z * g2 * t / ((1.0 + z) * (p + q * z)));
}

}  // namespace

FactorFn qtasep_step_factor(long n, double t, double q, const std::vector<double>& a) {
    std::vector<double> am(static_cast<size_t>(n));
    for (long m = 0; m < n; ++m) am[static_cast<size_t>(m)] = m < static_cast<long>(a.size()) ? a[static_cast<size_t>(m)] : 1.0;
    double rate = (q - 1.0) * t;
    return [am, rate](cplx z) {
        cplx f = std::exp(rate * z);
        for (double m : am) f *= m / (m - z);
        return f;
    };
}

cplx asep_f1(long x, cplx z, double t, double tau, double theta) {
    cplx xi = (1.0 + z) / (1.0 + z / tau);
    cplx f = asep_exp_factor(z, t, tau) * pow_int(xi, x - 1) / (tau + z);
    if (std::isfinite(theta)) f *= -tau * theta / (z - tau * theta);
    return f;
}

cplx asep_f2(long x, cplx z, double t, double tau, double theta) {
    cplx xi = (1.0 + z) / (1.0 + z / tau);
    cplx f = asep_exp_factor(z, t, tau) * pow_int(xi, x);
    if (std::isfinite(theta)) f *= -tau * theta / (z - tau * theta);
    return f;
}

MomentValue qtasep_u_formula(std::span<const long> nvec, double t, double q,
                             const std::vector<double>& a, double alpha,
                             QuadratureOptions opts) {
    const int k = static_cast<int>(nvec.size());
    require(k >= 1, "qtasep_u_formula: empty label vector");
    for (long n : nvec) require(n >= 0, "qtasep_u_formula: labels must be >= 0");
    std::vector<ContourSpec> contours =
        alpha == 0.0 ? build_qtasep_nested_contours(k, q, a)
                     : build_qtasep_halfstat_contours(k, q, a, alpha);
    std::vector<FactorFn> factors;
    factors.reserve(static_cast<size_t>(k));
    cplx pole = alpha / q;
    for (long n : nvec) {
        FactorFn base = qtasep_step_factor(n, t, q, a);
        factors.push_back([base, pole](cplx z) { return base(z) / (z - pole); });
    }
    MomentValue mv = nested_vandermonde_quadrature(factors, q, contours, opts);
    double kk2 = 0.5 * k * (k - 1);
    mv.value *= std::pow(-1.0, k) * std::pow(q, kk2);
    return mv;
}

MomentValue qtasep_moment(std::span<const long> nvec, double t, double q,
                          const std::vector<double>& a, double alpha,
                          QuadratureOptions opts) {
    require(weakly_decreasing(nvec), "qtasep_moment: labels must be weakly decreasing");
    for (long n : nvec) require(n >= 1, "qtasep_moment: labels must be >= 1");
    const int k = static_cast<int>(nvec.size());
    bool all_equal = std::all_of(nvec.begin(), nvec.end(), [&](long n) { return n == nvec[0]; });
    if (k > 4) {
        require(all_equal && alpha == 0.0 && k <= 12,
                "qtasep_moment: k > 4 supported only for equal labels with packed start");
        // Collapse onto the partition-indexed sum over the a-cluster contour.
        double amin = 1.0, amax = 1.0;
        for (double am : a) amin = std::min(amin, am), amax = std::max(amax, am);
        double c0 = 0.5 * (amin + amax);
        double spread = 0.5 * (amax - amin);
        double r = 0.8 * c0 * (1.0 - q) / (1.0 + q);
        if (!(r > 1.3 * spread + 1e-9))
            throw ContourInfeasibleError("qtasep_moment: a-spread too large for the pole contour");
        FactorFn f = qtasep_step_factor(nvec[0], t, q, a);
        return mu_k_partition_sum(f, ContourSpec::circle(c0, r), k, q, SignVariant::QTasep, opts);
    }
    return qtasep_u_formula(nvec, t, q, a, alpha, opts);
}

MomentValue asep_u_formula(std::span<const long> xvec, double t, double tau, double rho,
                           QuadratureOptions opts) {
    const int k = static_cast<int>(xvec.size());
    require(k >= 1, "asep_u_formula: empty label vector");
    require(rho > 0.0 && rho <= 1.0, "asep_u_formula: rho in (0,1]");
    double theta = rho < 1.0 ? rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
    ContourSpec cm = build_c_minus_tau(tau, theta);
    std::vector<ContourSpec> contours(static_cast<size_t>(k), cm);
    std::vector<FactorFn> factors;
    factors.reserve(static_cast<size_t>(k));
    for (long x : xvec)
        factors.push_back([x, t, tau, theta](cplx z) { return asep_f1(x, z, t, tau, theta); });
    MomentValue mv = nested_vandermonde_quadrature(factors, tau, contours, opts);
    mv.value *= std::pow(tau, 0.5 * k * (k - 1));
    return mv;
}

MomentValue asep_qtilde_moment(std::span<const long> xvec, double t, double tau, double rho,
                               QuadratureOptions opts) {
    require(strictly_increasing(xvec), "asep_qtilde_moment: labels must be strictly increasing");
    return asep_u_formula(xvec, t, tau, rho, opts);
}

MomentValue asep_nu_tilde(int k, long x, double t, double tau, double rho,
                          QuadratureOptions opts) {
    require(k >= 0, "asep_nu_tilde: k >= 0");
    if (k == 0) return MomentValue{1.0, 0.0, 0};
    double theta = rho < 1.0 ? rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
    ContourSpec cm = build_c_minus_tau(tau, theta);
    if (k <= 3) {
        std::vector<ContourSpec> contours(static_cast<size_t>(k), cm);
        std::vector<FactorFn> factors(
            static_cast<size_t>(k),
            FactorFn([x, t, tau, theta](cplx z) { return asep_f2(x, z, t, tau, theta) / z; }));
        return nested_vandermonde_quadrature(factors, tau, contours, opts);
    }
    // nu~_k = (-1)^k tau^{-k(k-1)/2} mu~_k with mu~_k = k_tau! e_k(eig of the
    // discretized Cauchy-type kernel (1-tau) f2(w) / (tau w - w').
    auto eval = [&](int m) {
        QuadratureRule rule = discretize(cm, m);
        const long n = static_cast<long>(rule.nodes.size());
        MatC a(n, n);
        for (long u = 0; u < n; ++u) {
            cplx fu = (1.0 - tau) * asep_f2(x, rule.nodes[static_cast<size_t>(u)], t, tau, theta);
            for (long v = 0; v < n; ++v)
                a(u, v) = fu / (tau * rule.nodes[static_cast<size_t>(u)] - rule.nodes[static_cast<size_t>(v)]) *
                          rule.weights[static_cast<size_t>(v)];
        }
        auto e = elementary_symmetric(eigenvalues(a), k);
        return e[static_cast<size_t>(k)] * qfunc::q_factorial(k, tau);
    };
    cplx coarse = eval(opts.initial_nodes);
    cplx fine = eval(opts.initial_nodes * 2);
    MomentValue mv;
    mv.value = std::pow(-1.0, k) * std::pow(tau, -0.5 * k * (k - 1)) * fine;
    mv.err = std::abs(fine - coarse);
    mv.nodes = opts.initial_nodes * 2;
    return mv;
}

MomentValue asep_moment(int n, long x, double t, double tau, double rho,
                        AsepMomentRoute route, QuadratureOptions opts) {
    require(n >= 1 && n <= 12, "asep_moment: 1 <= n <= 12");
    require(rho >= 0.05 && rho <= 1.0, "asep_moment: rho in [0.05, 1]");
    if (route == AsepMomentRoute::Auto)
        route = n <= 4 ? AsepMomentRoute::Nested : AsepMomentRoute::QtildeSum;
    double theta = rho < 1.0 ? rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
    if (route == AsepMomentRoute::Nested) {
        require(n <= 4, "asep_moment: nested route limited to n <= 4");
        std::vector<ContourSpec> contours = build_asep_nested_contours(n, tau, theta);
        std::vector<FactorFn> factors(
            static_cast<size_t>(n),
            FactorFn([x, t, tau, theta](cplx z) { return asep_f2(x, z, t, tau, theta) / z; }));
        MomentValue mv = nested_vandermonde_quadrature(factors, tau, contours, opts);
        mv.value *= std::pow(tau, 0.5 * n * (n - 1));
        return mv;
    }
    MomentValue total{0.0, 0.0, 0};
    for (int k = 0; k <= n; ++k) {
        MomentValue nu = asep_nu_tilde(k, x, t, tau, rho, opts);
        double coef = qfunc::q_binomial(n, k, tau) * std::pow(tau, 0.5 * k * (k - 1));
        total.value += coef * nu.value;
        total.err += coef * nu.err;
        total.nodes = std::max(total.nodes, nu.nodes);
    }
    return total;
}

// ---- partition-indexed sums -------------------------------------------------

namespace {

// prod_{r=0}^{m-1} f(base^r w)
cplx chain_factor(const FactorFn& f, cplx w, double base, long m) {
    cplx prod = 1.0;
    cplx arg = w;
    for (long r = 0; r < m; ++r) {
        prod *= f(arg);
        arg *= base;
    }
    return prod;
}

cplx small_det(const std::vector<std::vector<cplx>>& m) {
    size_t n = m.size();
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// One lambda-term of the partition sum by tensor quadrature (l(lambda) <= 3).
cplx lambda_term_tensor(const FactorFn& f, const ContourSpec& contour, double base,
                        double sign, const std::vector<long>& parts, QuadratureOptions opts) {
    const size_t l = parts.size();
    std::vector<ContourSpec> contours(l, contour);
    std::vector<double> shift(l);
    for (size_t i = 0; i < l; ++i) shift[i] = std::pow(base, static_cast<double>(parts[i]));
    auto integrand = [&](std::span<const cplx> w) {
        std::vector<std::vector<cplx>> m(l, std::vector<cplx>(l));
        for (size_t i = 0; i < l; ++i)
            for (size_t j = 0; j < l; ++j) m[i][j] = sign / (w[i] * shift[i] - w[j]);
        cplx val = small_det(m);
        for (size_t i = 0; i < l; ++i) val *= chain_factor(f, w[i], base, parts[i]);
        return val;
    };
    MomentValue mv = nested_quadrature(integrand, contours, opts);
    return mv.value;
}

// [xi^k] det(I + sum_m xi^m B_m) by a Cauchy-coefficient DFT; reproduces the
// full partition sum at order k through the discretized kernels.
cplx coefficient_route(const FactorFn& f, const ContourSpec& contour, int k, double base,
                       double sign, int m_nodes, int dft_points, double dft_radius) {
    QuadratureRule rule = discretize(contour, m_nodes);
    const long n = static_cast<long>(rule.nodes.size());
    std::vector<MatC> b(static_cast<size_t>(k) + 1);
    for (int m = 1; m <= k; ++m) {
        b[static_cast<size_t>(m)] = MatC(n, n);
        double shift = std::pow(base, m);
        for (long u = 0; u < n; ++u) {
            cplx fu = chain_factor(f, rule.nodes[static_cast<size_t>(u)], base, m);
            for (long v = 0; v < n; ++v)
                b[static_cast<size_t>(m)](u, v) =
                    sign * fu / (rule.nodes[static_cast<size_t>(u)] * shift - rule.nodes[static_cast<size_t>(v)]) *
                    rule.weights[static_cast<size_t>(v)];
        }
    }
    cplx acc = 0.0;
    for (int j = 0; j < dft_points; ++j) {
        cplx xi = dft_radius * std::exp(cplx(0, 2.0 * PI * j / dft_points));
        MatC c = MatC::Zero(n, n);
        cplx xm = 1.0;
        for (int m = 1; m <= k; ++m) {
            xm *= xi;
            c += xm * b[static_cast<size_t>(m)];
        }
        acc += det_id_plus(c) * std::exp(cplx(0, -2.0 * PI * j * k / dft_points));
    }
    return acc / (static_cast<double>(dft_points) * std::pow(dft_radius, k));
}

}  // namespace

MomentValue mu_k_partition_sum(const FactorFn& f, const ContourSpec& contour, int k,
                               double base, SignVariant variant, QuadratureOptions opts) {
    require(k >= 1 && k <= 12, "mu_k_partition_sum: 1 <= k <= 12");
    const double sign = variant == SignVariant::QTasep ? 1.0 : -1.0;
    MomentValue mv;
    double pref = qfunc::q_factorial(k, base) * std::pow(1.0 - base, k);
    if (k <= 3) {
        cplx total = 0.0;
        for (const auto& lam : qfunc::partitions(k)) {
            double msym = 1.0;
            for (long mult : lam.multiplicities)
                for (long j = 2; j <= mult; ++j) msym *= static_cast<double>(j);
            total += lambda_term_tensor(f, contour, base, sign, lam.parts, opts) / msym;
        }
        mv.value = pref * total;
        mv.nodes = opts.initial_nodes;
        // error dominated by the tensor quadratures, already tolerance-checked
        mv.err = opts.tol * static_cast<double>(qfunc::partitions(k).size());
        return mv;
    }
    int m0 = opts.initial_nodes;
    cplx coarse = coefficient_route(f, contour, k, base, sign, m0, 64, 0.55);
    cplx fine = coefficient_route(f, contour, k, base, sign, 2 * m0, 96, 0.5);
    mv.value = pref * fine;
    mv.err = std::abs(pref) * std::abs(fine - coarse);
    mv.nodes = 2 * m0;
    return mv;
}

MomentValue mu_nested(const FactorFn& f, const std::vector<ContourSpec>& contours,
                      double base, QuadratureOptions opts) {
    const int k = static_cast<int>(contours.size());
    std::vector<FactorFn> factors(static_cast<size_t>(k),
                                  FactorFn([f](cplx z) { return f(z) / z; }));
    MomentValue mv = nested_vandermonde_quadrature(factors, base, contours, opts);
    mv.value *= std::pow(-1.0, k) * std::pow(base, 0.5 * k * (k - 1));
    return mv;
}

MomentValue mu_tilde_nested(const FactorFn& f, const std::vector<ContourSpec>& contours,
                            double base, QuadratureOptions opts) {
    return mu_nested(f, contours, base, opts);
}

MomentValue mu_tilde_symmetrized(const FactorFn& f, const ContourSpec& contour, int k,
                                 double base, QuadratureOptions opts) {
    require(k >= 1 && k <= 3, "mu_tilde_symmetrized: tensor route limited to k <= 3");
    std::vector<ContourSpec> contours(static_cast<size_t>(k), contour);
    auto integrand = [&](std::span<const cplx> w) {
        std::vector<std::vector<cplx>> m(static_cast<size_t>(k), std::vector<cplx>(static_cast<size_t>(k)));
        for (size_t i = 0; i < static_cast<size_t>(k); ++i)
            for (size_t j = 0; j < static_cast<size_t>(k); ++j)
                m[i][j] = 1.0 / (w[i] / base - w[j]);
        cplx val = small_det(m);
        for (size_t i = 0; i < static_cast<size_t>(k); ++i) val *= f(w[i]);
        return val;
    };
    MomentValue mv = nested_quadrature(integrand, contours, opts);
    double kfact = 1.0;
    for (int j = 2; j <= k; ++j) kfact *= j;
    mv.value *= qfunc::q_factorial(k, base) / kfact * std::pow(1.0 - 1.0 / base, k);
    return mv;
}

MuTildeRelationReport mu_tilde_relation_check(const FactorFn& f,
                                              const std::vector<ContourSpec>& pole_contours,
                                              const std::vector<ContourSpec>& zero_contours,
                                              int k, double base, QuadratureOptions opts) {
    require(static_cast<int>(pole_contours.size()) >= k &&
                static_cast<int>(zero_contours.size()) >= k,
            "mu_tilde_relation_check: need k contours of each family");
    std::vector<cplx> mu(static_cast<size_t>(k) + 1);
    mu[0] = 1.0;
    for (int j = 1; j <= k; ++j) {
        std::vector<ContourSpec> sub(pole_contours.end() - j, pole_contours.end());
        mu[static_cast<size_t>(j)] = mu_nested(f, sub, base, opts).value;
    }
    std::vector<ContourSpec> ztop(zero_contours.end() - k, zero_contours.end());
    cplx mu_tilde = mu_tilde_nested(f, ztop, base, opts).value;

    cplx sum = 0.0;
    for (int j = 0; j <= k; ++j) {
        double coef = qfunc::q_binomial(k, j, base, /*inverse_base=*/true) *
                      std::pow(base, -0.5 * j * (j - 1));
        sum += coef * std::pow(-1.0, j) * mu[static_cast<size_t>(j)];
    }
    sum *= std::pow(-1.0, k) * std::pow(base, 0.5 * k * (k - 1));

    MuTildeRelationReport rep;
    rep.relation_residual = std::abs(mu_tilde - sum);
    if (k <= 3) {
        cplx symm = mu_tilde_symmetrized(f, zero_contours.back(), k, base, opts).value;
        rep.symmetrized_residual = std::abs(mu_tilde - symm);
    }
    return rep;
}

double qtasep_halfstat_t0(std::span<const long> nvec, double q, const std::vector<double>& a,
                          double alpha) {
    const size_t k = nvec.size();
    double val = 1.0;
    for (size_t i = 0; i < k; ++i) {
        long lo = (i + 1 < k ? nvec[i + 1] : 0) + 1;
        for (long m = lo; m <= nvec[i]; ++m) {
            double am = m - 1 < static_cast<long>(a.size()) ? a[static_cast<size_t>(m - 1)] : 1.0;
            for (size_t j = 1; j <= i + 1; ++j) val *= am / (am - alpha * std::pow(q, -static_cast<double>(j)));
        }
    }
    return val;
}

double asep_stepbern_t0(std::span<const long> xvec, double tau, double rho) {
    const long k = static_cast<long>(xvec.size());
    if (xvec[0] <= 0) return 0.0;
    double val = 1.0;
    long prev = 0;
    for (long j = 1; j <= k; ++j) {
        long xj = xvec[static_cast<size_t>(j - 1)];
        val *= rho * std::pow(tau, static_cast<double>(k - j)) *
               std::pow(rho * std::pow(tau, static_cast<double>(k - j + 1)) + 1.0 - rho,
                        static_cast<double>(xj - prev - 1));
        prev = xj;
    }
    return val;
}

}  // namespace qlab::moments
