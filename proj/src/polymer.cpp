#include "qlab/polymer.hpp"

#include <cmath>

#include "qlab/fredholm.hpp"
#include "qlab/moments.hpp"

namespace qlab::polymer {

SheState simulate_she(long n_sites, double t_final, double dt, const std::vector<double>& drift,
                      const std::vector<double>& z0, Rng& rng) {
    require(n_sites >= 1, "simulate_she: n_sites >= 1");
    require(dt > 0 && dt <= 1e-3 * std::max(1.0, t_final), "simulate_she: dt too coarse");
    SheState st;
    st.drift = drift;
    st.z.assign(static_cast<size_t>(n_sites), 0.0);
    for (size_t i = 0; i < st.z.size() && i < z0.size(); ++i) {
        require(z0[i] >= 0.0, "simulate_she: z0 >= 0");
        st.z[i] = z0[i];
    }
    long steps = static_cast<long>(std::ceil(t_final / dt));
    double h = t_final / static_cast<double>(steps);
    double sq = std::sqrt(h);
    auto coupling_half = [&](std::vector<double>& z) {
        // z(n) += h/2 (z(n-1) - z(n)), site 0 pinned at zero
        double prev = 0.0;
        for (size_t n = 0; n < z.size(); ++n) {
            double cur = z[n];
            z[n] += 0.5 * h * (prev - cur);
            prev = cur;
        }
    };
    for (long s = 0; s < steps; ++s) {
        coupling_half(st.z);
        for (size_t n = 0; n < st.z.size(); ++n) {
            double a = n < st.drift.size() ? st.drift[n] : 0.0;
            st.z[n] *= std::exp(sq * rng.normal() - 0.5 * h + a * h);
        }
        coupling_half(st.z);
    }
    st.time = t_final;
    return st;
}

moments::MomentValue she_moment(std::span<const long> nvec, double t, double c,
                                moments::QuadratureOptions opts) {
    const int k = static_cast<int>(nvec.size());
    require(k >= 1 && k <= 4, "she_moment: 1 <= k <= 4");
    for (long n : nvec) require(n >= 0, "she_moment: labels >= 0");
    // circles around 0; the w_A contour encloses {w_B + c}_{B>A}
    std::vector<moments::ContourSpec> contours;
    double r_min = 0.6;
    for (int j = 0; j < k; ++j)
        contours.push_back(moments::ContourSpec::circle(
            cplx(0.0), r_min + (k - 1 - j) * (std::abs(c) + 0.6)));
    std::vector<moments::FactorFn> factors;
    for (long n : nvec)
        factors.push_back([n, t](cplx w) { return std::exp(t * w) * pow_int(w, -n); });
    auto integrand_ratio = [c](std::span<const cplx> w, int kk) {
        cplx cross = 1.0;
        for (int a = 0; a < kk; ++a)
            for (int b = a + 1; b < kk; ++b)
                cross *= (w[static_cast<size_t>(a)] - w[static_cast<size_t>(b)]) /
                         (w[static_cast<size_t>(a)] - w[static_cast<size_t>(b)] - c);
        return cross;
    };
    auto full = [&](std::span<const cplx> w) {
        cplx v = integrand_ratio(w, k);
        for (int j = 0; j < k; ++j) v *= factors[static_cast<size_t>(j)](w[static_cast<size_t>(j)]);
        return v;
    };
    moments::MomentValue mv = moments::nested_quadrature(full, contours, opts);
    mv.value *= std::exp(-static_cast<double>(k) * t);
    return mv;
}

cplx oy_laplace_det(cplx u, long n, double t, int nodes) {
    return fredholm::oy_det(u, n, t, nodes).value;
}

double scaling_initial_value(double eps, long n) {
    return std::pow(eps, static_cast<double>(n - 1)) * std::exp(eps * static_cast<double>(n));
}

std::vector<ScalingPoint> scaling_map_diagnostic(const std::vector<double>& eps_ladder,
                                                 double s, long trajectories,
                                                 std::uint64_t seed) {
    std::vector<ScalingPoint> out;
    for (double eps : eps_ladder) {
        require(eps > 0.0 && eps <= 0.5, "scaling_map_diagnostic: eps in (0, 0.5]");
        markov::RateParams rates;
        rates.q = std::exp(-eps);
        double t_micro = s / (eps * eps);
        auto ens = markov::mc_expectation(
            [&](Rng& rng) {
                markov::ParticleConfig x0;
                x0.positions = {-1};
                markov::ParticleConfig xt = markov::simulate_qtasep(x0, rates, t_micro, rng);
                // z_eps(s,1) = exp(-3s/2 + F), F = s/eps - eps x_1(t); the
                // large terms cancel inside the combined exponent.
                double expo = -1.5 * s + s / eps - eps * static_cast<double>(xt.positions[0]);
                return std::exp(expo);
            },
            trajectories, seed);
        ScalingPoint p;
        p.epsilon = eps;
        p.mean_z = ens.mean;
        p.std_error = ens.std_error;
        p.limit = std::exp(-s);
        p.gap = std::abs(p.mean_z - p.limit);
        out.push_back(p);
    }
    return out;
}

}  // namespace qlab::polymer
