#pragma once

#include <utility>
#include <vector>

#include "qlab/numeric.hpp"

namespace qlab::qfunc {

/// (a;q)_n = (1-a)(1-aq)...(1-aq^{n-1}); n >= 0, empty product for n = 0.
cplx q_pochhammer(cplx a, double q, long n);

/// (a;q)_inf, truncated once the remaining factors are provably within
/// 1e-16 relative of 1 (|a| q^m < 1e-16 (1-q)).
cplx q_pochhammer_inf(cplx a, double q);

/// n_q! = (q;q)_n / (1-q)^n.
double q_factorial(long n, double q);

/// Gaussian binomial; `inverse_base` computes the base-1/q coefficient via
/// C(n,k)_{1/q} = q^{-k(n-k)} C(n,k)_q.
double q_binomial(long n, long k, double q, bool inverse_base = false);

/// e_q(x) = 1 / ((1-q)x; q)_inf. Signals near-pole when (1-q)x approaches q^{-m}.
cplx eq_exp(cplx x, double q);

/// E_q(x) = (-(1-q)x; q)_inf.
cplx Eq_exp(cplx x, double q);

struct Partition {
    std::vector<long> parts;           // weakly decreasing, positive
    std::vector<long> multiplicities;  // multiplicities[i] = #{parts == i+1}
    long weight = 0;                   // sum of parts
    long length = 0;                   // number of parts
};

/// All partitions of k, each exactly once. k = 0 yields the empty partition.
std::vector<Partition> partitions(long k, long bound = 20);

/// Residuals of the two S_k symmetrization identities relating the signed
/// permutation sum of prod (z_A - z_B)/(z_A - tau z_B) to Cauchy determinants
/// (plain form, and the form weighted by 1/(xi_{s(1)}...xi_{s(i)} - 1) with
/// xi = (1+z)/(1+z/tau)). Brute-force S_k sum vs determinant formula; k <= 6.
std::pair<double, double> check_symmetrization(const std::vector<cplx>& z, double tau);

}  // namespace qlab::qfunc
