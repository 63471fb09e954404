#include "qlab/qfunc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qlab/linalg.hpp"

namespace qlab::qfunc {

cplx q_pochhammer(cplx a, double q, long n) {
    require(q >= 0.0 && q < 1.0, "q_pochhammer: need 0 <= q < 1");
    require(n >= 0, "q_pochhammer: need n >= 0");
    cplx prod = 1.0;
    cplx aq = a;
    for (long j = 0; j < n; ++j) {
        prod *= (1.0 - aq);
        aq *= q;
    }
    return prod;
}

cplx q_pochhammer_inf(cplx a, double q) {
    require(q >= 0.0 && q < 1.0, "q_pochhammer_inf: need 0 <= q < 1");
    cplx prod = 1.0;
    double mag = std::abs(a);
    const double cutoff = 1e-16 * (1.0 - q);
    cplx aq = a;
    // Tail product bounded via sum |a| q^j / (1-q).
    while (mag > cutoff) {
        prod *= (1.0 - aq);
        aq *= q;
        mag *= q;
    }
    return prod;
}

double q_factorial(long n, double q) {
    require(q > 0.0 && q < 1.0, "q_factorial: need 0 < q < 1");
    double prod = 1.0;
    for (long j = 1; j <= n; ++j) prod *= (1.0 - std::pow(q, j)) / (1.0 - q);
    return prod;
}

double q_binomial(long n, long k, double q, bool inverse_base) {
    require(0 <= k && k <= n, "q_binomial: need 0 <= k <= n");
    // (q;q)_n / ((q;q)_k (q;q)_{n-k}) computed as a telescoping product.
    double val = 1.0;
    for (long j = 1; j <= k; ++j)
        val *= (1.0 - std::pow(q, n - k + j)) / (1.0 - std::pow(q, j));
    if (inverse_base) val *= std::pow(q, -static_cast<double>(k) * (n - k));
    return val;
}

cplx eq_exp(cplx x, double q) {
    cplx arg = (1.0 - q) * x;
    // Pole set of e_q is {q^{-m}}.
    double m = 1.0;
    for (int j = 0; j < 500; ++j) {
        if (std::abs(1.0 - arg * m) < 1e-13)
            throw std::domain_error("eq_exp: argument within 1e-13 of a pole q^{-m}");
        m *= q;
        if (std::abs(arg) * m < 1e-14) break;
    }
    return 1.0 / q_pochhammer_inf(arg, q);
}

cplx Eq_exp(cplx x, double q) { return q_pochhammer_inf(-(1.0 - q) * x, q); }

static void enumerate_rec(long remaining, long maxpart, std::vector<long>& cur,
                          std::vector<Partition>& out) {
    if (remaining == 0) {
        Partition p;
        p.parts = cur;
        p.weight = std::accumulate(cur.begin(), cur.end(), 0L);
        p.length = static_cast<long>(cur.size());
        long biggest = cur.empty() ? 0 : cur.front();
        p.multiplicities.assign(static_cast<size_t>(biggest), 0);
        for (long part : cur) p.multiplicities[static_cast<size_t>(part - 1)]++;
        out.push_back(std::move(p));
        return;
    }
    for (long part = std::min(remaining, maxpart); part >= 1; --part) {
        cur.push_back(part);
        enumerate_rec(remaining - part, part, cur, out);
        cur.pop_back();
    }
}

std::vector<Partition> partitions(long k, long bound) {
    require(k >= 0, "partitions: need k >= 0");
    if (k > bound) throw std::invalid_argument("partitions: k exceeds configured bound");
    std::vector<Partition> out;
    std::vector<long> cur;
    enumerate_rec(k, k == 0 ? 1 : k, cur, out);
    return out;
}

static cplx perm_sum_core(const std::vector<cplx>& z, double tau, bool with_xi) {
    const int k = static_cast<int>(z.size());
    std::vector<int> idx(static_cast<size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<cplx> xi(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) xi[static_cast<size_t>(i)] = (1.0 + z[static_cast<size_t>(i)]) / (1.0 + z[static_cast<size_t>(i)] / tau);
    cplx total = 0.0;
    do {
        cplx term = 1.0;
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) {
                cplx den = z[static_cast<size_t>(idx[static_cast<size_t>(a)])] - tau * z[static_cast<size_t>(idx[static_cast<size_t>(b)])];
                if (std::abs(den) < 1e-12)
                    throw std::domain_error("check_symmetrization: ill-conditioned z_i - tau z_j");
                term *= (z[static_cast<size_t>(idx[static_cast<size_t>(a)])] - z[static_cast<size_t>(idx[static_cast<size_t>(b)])]) / den;
            }
        if (with_xi) {
            cplx run = 1.0;
            for (int i = 0; i < k; ++i) {
                run *= xi[static_cast<size_t>(idx[static_cast<size_t>(i)])];
                cplx den = run - 1.0;
                if (std::abs(den) < 1e-12)
                    throw std::domain_error("check_symmetrization: xi-product within 1e-12 of 1");
                term /= den;
            }
        }
        total += term;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return total;
}

std::pair<double, double> check_symmetrization(const std::vector<cplx>& z, double tau) {
    const int k = static_cast<int>(z.size());
    require(k >= 1 && k <= 6, "check_symmetrization: k capped at 6 (factorial cost)");
    MatC cauchy(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            cplx den = z[static_cast<size_t>(i)] - tau * z[static_cast<size_t>(j)];
            if (std::abs(den) < 1e-12)
                throw std::domain_error("check_symmetrization: ill-conditioned z_i - tau z_j");
            cauchy(i, j) = 1.0 / den;
        }
    cplx det = cauchy.determinant();

    double kk2 = 0.5 * k * (k - 1);
    cplx zprod = 1.0;
    for (const cplx& zi : z) zprod *= zi;
    cplx rhs1 = q_pochhammer(tau, tau, k) * std::pow(tau, -kk2) * zprod * det;
    cplx lhs1 = perm_sum_core(z, tau, /*with_xi=*/false);

    cplx taupz = 1.0;
    for (const cplx& zi : z) taupz *= (tau + zi);
    cplx rhs2 = std::pow(-1.0, k) * std::pow(tau, -kk2) * det * taupz;
    cplx lhs2 = perm_sum_core(z, tau, /*with_xi=*/true);

    return {std::abs(lhs1 - rhs1), std::abs(lhs2 - rhs2)};
}

}  // namespace qlab::qfunc
