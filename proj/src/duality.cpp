#include "qlab/duality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace qlab::duality {

double qtasep_H(const ParticleConfig& x, const ZrpConfig& y, double q) {
    const long n = x.n();
    require(static_cast<long>(y.counts.size()) >= 1, "qtasep_H: empty dual state");
    if (y.counts[0] > 0) return 0.0;
    double h = 1.0;
    for (size_t i = 1; i < y.counts.size(); ++i) {
        require(static_cast<long>(i) <= n, "qtasep_H: dual site beyond particle count");
        long yi = y.counts[i];
        if (yi == 0) continue;
        long expo = (x.positions[i - 1] + static_cast<long>(i)) * yi;
        h *= std::pow(q, static_cast<double>(expo));
    }
    return h;
}

double asep_H(const OccupancyConfig& eta, std::span<const long> xs, double tau) {
    double h = 1.0;
    for (long x : xs) h *= std::pow(tau, static_cast<double>(eta.n_below(x)));
    return h;
}

double asep_tilde_H(const OccupancyConfig& eta, std::span<const long> xs, double tau) {
    double h = 1.0;
    for (long x : xs) {
        if (eta.at(x) != 1) return 0.0;
        h *= std::pow(tau, static_cast<double>(eta.n_below(x - 1)));
    }
    return h;
}

double gen_qtasep(const std::function<double(const ParticleConfig&)>& f,
                  const ParticleConfig& x, const RateParams& rates) {
    double out = 0.0;
    double fx = f(x);
    for (long i = 0; i < x.n(); ++i) {
        double rate;
        if (i == 0) {
            rate = rates.rate(0);
        } else {
            long gap = x.positions[static_cast<size_t>(i - 1)] - x.positions[static_cast<size_t>(i)] - 1;
            rate = rates.rate(static_cast<size_t>(i)) * (1.0 - std::pow(rates.q, gap));
        }
        if (rate == 0.0) continue;
        ParticleConfig xp = x;
        xp.positions[static_cast<size_t>(i)] += 1;
        out += rate * (f(xp) - fx);
    }
    return out;
}

double gen_tazrp(const std::function<double(const ZrpConfig&)>& f, const ZrpConfig& y,
                 const RateParams& rates) {
    double out = 0.0;
    double fy = f(y);
    for (size_t i = 1; i < y.counts.size(); ++i) {
        if (y.counts[i] == 0) continue;
        double rate = rates.rate(i) * (1.0 - std::pow(rates.q, y.counts[i]));
        ZrpConfig yp = y;
        yp.counts[i] -= 1;
        yp.counts[i - 1] += 1;
        out += rate * (f(yp) - fy);
    }
    return out;
}

double gen_asep_occ(const std::function<double(const OccupancyConfig&)>& f,
                    const OccupancyConfig& eta, const RateParams& rates) {
    require(!eta.occ.empty() && eta.occ.front() == 0 && eta.occ.back() == 0 && !eta.right_full,
            "gen_asep_occ: need empty slack sites at the window edges");
    double out = 0.0;
    double fe = f(eta);
    for (long y = eta.left; y < eta.right(); ++y) {
        int l = eta.at(y), r = eta.at(y + 1);
        double rate = 0.0;
        if (l == 1 && r == 0) rate = rates.bond_rate(y) * rates.p_asep;
        if (l == 0 && r == 1) rate = rates.bond_rate(y) * rates.q_asep;
        if (rate == 0.0) continue;
        OccupancyConfig ep = eta;
        std::swap(ep.occ[static_cast<size_t>(y - eta.left)], ep.occ[static_cast<size_t>(y + 1 - eta.left)]);
        out += rate * (f(ep) - fe);
    }
    return out;
}

namespace {
// Leftmost / rightmost labels of each particle cluster (0-based indices).
void cluster_labels(std::span<const long> xs, std::vector<size_t>& lefts,
                    std::vector<size_t>& rights) {
    lefts.clear();
    rights.clear();
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i == 0 || xs[i - 1] < xs[i] - 1) lefts.push_back(i);
        if (i + 1 == xs.size() || xs[i + 1] > xs[i] + 1) rights.push_back(i);
    }
}
}  // namespace

double gen_asep_part(const std::function<double(std::span<const long>)>& f,
                     std::span<const long> xs, const RateParams& rates) {
    std::vector<size_t> lefts, rights;
    cluster_labels(xs, lefts, rights);
    std::vector<long> work(xs.begin(), xs.end());
    double fx = f(xs);
    double out = 0.0;
    for (size_t i : lefts) {
        double rate = rates.bond_rate(xs[i] - 1) * rates.p_asep;
        work[i] -= 1;
        out += rate * (f(work) - fx);
        work[i] += 1;
    }
    for (size_t i : rights) {
        double rate = rates.bond_rate(xs[i]) * rates.q_asep;
        work[i] += 1;
        out += rate * (f(work) - fx);
        work[i] -= 1;
    }
    return out;
}

double residual_qtasep_duality(const ParticleConfig& x, const ZrpConfig& y,
                               const RateParams& rates) {
    double lhs = gen_qtasep([&](const ParticleConfig& xx) { return qtasep_H(xx, y, rates.q); }, x, rates);
    double rhs = gen_tazrp([&](const ZrpConfig& yy) { return qtasep_H(x, yy, rates.q); }, y, rates);
    return std::abs(lhs - rhs);
}

double residual_asep_duality_tilde(const OccupancyConfig& eta, std::span<const long> xs,
                                   const RateParams& rates) {
    double tau = rates.tau();
    double lhs = gen_asep_occ([&](const OccupancyConfig& e) { return asep_tilde_H(e, xs, tau); },
                              eta, rates);
    double rhs = gen_asep_part([&](std::span<const long> x2) { return asep_tilde_H(eta, x2, tau); },
                               xs, rates);
    return std::abs(lhs - rhs);
}

double residual_asep_duality_H(const OccupancyConfig& eta, std::span<const long> xs,
                               const RateParams& rates) {
    double tau = rates.tau();
    double lhs = gen_asep_occ([&](const OccupancyConfig& e) { return asep_H(e, xs, tau); },
                              eta, rates);
    double rhs = gen_asep_part([&](std::span<const long> x2) { return asep_H(eta, x2, tau); },
                               xs, rates);
    return std::abs(lhs - rhs);
}

long EnumeratedChain::index_of(std::span<const long> state) const {
    std::vector<long> key(state.begin(), state.end());
    auto it = std::lower_bound(states.begin(), states.end(), key);
    if (it == states.end() || *it != key) return -1;
    return static_cast<long>(it - states.begin());
}

namespace {
void enumerate_compositions(long sites, long total, std::vector<long>& cur,
                            std::vector<std::vector<long>>& out) {
    if (static_cast<long>(cur.size()) == sites - 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (long v = 0; v <= total; ++v) {
        cur.push_back(v);
        enumerate_compositions(sites, total - v, cur, out);
        cur.pop_back();
    }
}
}  // namespace

EnumeratedChain build_tazrp_chain(long n_sites, long k, const RateParams& rates, bool pin_site0) {
    EnumeratedChain chain;
    std::vector<long> cur;
    if (pin_site0) {
        std::vector<std::vector<long>> tail;
        enumerate_compositions(n_sites, k, cur, tail);
        for (auto& y : tail) {
            y.insert(y.begin(), 0);
            chain.states.push_back(std::move(y));
        }
    } else {
        enumerate_compositions(n_sites + 1, k, cur, chain.states);
    }
    std::sort(chain.states.begin(), chain.states.end());
    const long dim = static_cast<long>(chain.states.size());
    chain.generator = MatR::Zero(dim, dim);
    for (long s = 0; s < dim; ++s) {
        const auto& y = chain.states[static_cast<size_t>(s)];
        for (long i = 1; i <= n_sites; ++i) {
            if (y[static_cast<size_t>(i)] == 0) continue;
            double rate = rates.rate(static_cast<size_t>(i)) *
                          (1.0 - std::pow(rates.q, y[static_cast<size_t>(i)]));
            chain.generator(s, s) -= rate;
            if (pin_site0 && i == 1) continue;  // flow into the pinned sector is killed
            std::vector<long> yp = y;
            yp[static_cast<size_t>(i)] -= 1;
            yp[static_cast<size_t>(i - 1)] += 1;
            long sp = chain.index_of(yp);
            require(sp >= 0, "build_tazrp_chain: missing neighbor state");
            chain.generator(s, sp) += rate;
        }
    }
    return chain;
}

namespace {
void enumerate_subsets(long lo, long hi, long k, std::vector<long>& cur,
                       std::vector<std::vector<long>>& out) {
    if (static_cast<long>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (long v = lo; v <= hi - (k - static_cast<long>(cur.size())) + 1; ++v) {
        cur.push_back(v);
        enumerate_subsets(v + 1, hi, k, cur, out);
        cur.pop_back();
    }
}
}  // namespace

EnumeratedChain build_asep_particle_chain(long k, long window_left, long window_right,
                                          const RateParams& rates) {
    EnumeratedChain chain;
    std::vector<long> cur;
    enumerate_subsets(window_left, window_right, k, cur, chain.states);
    std::sort(chain.states.begin(), chain.states.end());
    const long dim = static_cast<long>(chain.states.size());
    chain.generator = MatR::Zero(dim, dim);
    std::vector<size_t> lefts, rights;
    for (long s = 0; s < dim; ++s) {
        const auto& xs = chain.states[static_cast<size_t>(s)];
        cluster_labels(xs, lefts, rights);
        auto add = [&](size_t i, long delta, double rate) {
            chain.generator(s, s) -= rate;
            std::vector<long> xp = xs;
            xp[i] += delta;
            if (xp[i] < window_left || xp[i] > window_right) return;  // killed at the boundary
            long sp = chain.index_of(xp);
            require(sp >= 0, "build_asep_particle_chain: missing neighbor state");
            chain.generator(s, sp) += rate;
        };
        for (size_t i : lefts) add(i, -1, rates.bond_rate(xs[i] - 1) * rates.p_asep);
        for (size_t i : rights) add(i, +1, rates.bond_rate(xs[i]) * rates.q_asep);
    }
    return chain;
}

double poisson_tail_bound(double mu, long n) {
    if (n <= 0) return 1.0;
    // P(Pois(mu) >= n) <= exp(-mu) (e mu / n)^n for n > mu
    if (static_cast<double>(n) <= mu) return 1.0;
    double logp = -mu + n * (1.0 + std::log(mu / n));
    return std::exp(logp);
}

VecR evolve_true_equation(const EnumeratedChain& chain, const VecR& h0, double t,
                          long dimension_cap) {
    require(t >= 0.0, "evolve_true_equation: t >= 0");
    const long dim = chain.generator.rows();
    require(dim <= dimension_cap, "evolve_true_equation: state space above dimension cap");
    require(h0.size() == dim, "evolve_true_equation: initial vector size mismatch");
    if (t == 0.0) return h0;
    MatR et = expm(MatR(t * chain.generator));
    return et * h0;
}

DualityCheckResult check_duality_dynamic_qtasep(const ParticleConfig& x0, const ZrpConfig& y0,
                                                const RateParams& rates, double t,
                                                long trajectories, std::uint64_t seed) {
    DualityCheckResult res;
    auto ens = markov::mc_expectation(
        [&](Rng& rng) {
            ParticleConfig xt = markov::simulate_qtasep(x0, rates, t, rng);
            return qtasep_H(xt, y0, rates.q);
        },
        trajectories, seed);
    res.mc_mean = ens.mean;
    res.mc_se = ens.std_error;

    long n_sites = x0.n();
    long k = 0;
    for (long c : y0.counts) k += c;
    EnumeratedChain chain = build_tazrp_chain(n_sites, k, rates, /*pin_site0=*/true);
    VecR h0(chain.generator.rows());
    for (long s = 0; s < chain.generator.rows(); ++s) {
        ZrpConfig y{chain.states[static_cast<size_t>(s)], {}};
        h0(s) = qtasep_H(x0, y, rates.q);
    }
    VecR ht = evolve_true_equation(chain, h0, t);
    long idx = chain.index_of(y0.counts);
    require(idx >= 0, "check_duality_dynamic_qtasep: y0 not in enumerated space");
    res.dual_value = ht(idx);
    return res;
}

DualityCheckResult check_duality_dynamic_asep(const OccupancyConfig& eta0,
                                              std::span<const long> xs,
                                              const RateParams& rates, double t,
                                              long trajectories, std::uint64_t seed) {
    DualityCheckResult res;
    double tau = rates.tau();
    auto ens = markov::mc_expectation(
        [&](Rng& rng) {
            OccupancyConfig et = markov::simulate_asep(eta0, rates, t, rng);
            return asep_tilde_H(et, xs, tau);
        },
        trajectories, seed);
    res.mc_mean = ens.mean;
    res.mc_se = ens.std_error;

    // The dual chain tracks k random walkers, so its window only needs a
    // Poisson-tail pad (each walker attempts ~ Poisson(a_max t) jumps).
    double amax = 1.0;
    for (double ax : rates.bond_a) amax = std::max(amax, ax);
    double mu = amax * t;
    long pad = 8;
    while (static_cast<double>(xs.size()) * poisson_tail_bound(mu, pad) > 1e-12) ++pad;
    long wl = xs.front() - pad, wr = xs.back() + pad;
    EnumeratedChain chain =
        build_asep_particle_chain(static_cast<long>(xs.size()), wl, wr, rates);
    VecR h0(chain.generator.rows());
    for (long s = 0; s < chain.generator.rows(); ++s)
        h0(s) = asep_tilde_H(eta0, chain.states[static_cast<size_t>(s)], tau);
    VecR ht = evolve_true_equation(chain, h0, t);
    long idx = chain.index_of(xs);
    require(idx >= 0, "check_duality_dynamic_asep: x not inside window");
    res.dual_value = ht(idx);
    res.truncation_bound = static_cast<double>(xs.size()) * poisson_tail_bound(mu, pad);
    return res;
}

namespace {
double grad(const MomentFn& u, double t, std::vector<long> v, size_t i) {
    double u0 = u(t, v);
    v[i] -= 1;
    return u(t, v) - u0;
}
}  // namespace

double qtasep_fd_residual(const MomentFn& u, const RateParams& rates,
                          std::span<const long> nvec, double t, double dt) {
    std::vector<long> v(nvec.begin(), nvec.end());
    double dudt = (u(t + dt, v) - u(t - dt, v)) / (2.0 * dt);
    double rhs = 0.0;
    for (size_t i = 0; i < v.size(); ++i)
        rhs += (1.0 - rates.q) * rates.rate(static_cast<size_t>(v[i] - 1)) * grad(u, t, v, i);
    return std::abs(dudt - rhs);
}

double qtasep_boundary_residual(const MomentFn& u, double q, std::span<const long> nvec,
                                double t, size_t i) {
    require(i + 1 < nvec.size() && nvec[i] == nvec[i + 1],
            "qtasep_boundary_residual: needs n_i = n_{i+1}");
    std::vector<long> v(nvec.begin(), nvec.end());
    return std::abs(grad(u, t, v, i) - q * grad(u, t, v, i + 1));
}

double asep_fd_residual(const MomentFn& u, const RateParams& rates,
                        std::span<const long> xvec, double t, double dt) {
    std::vector<long> v(xvec.begin(), xvec.end());
    double dudt = (u(t + dt, v) - u(t - dt, v)) / (2.0 * dt);
    double rhs = 0.0;
    double u0 = u(t, v);
    for (size_t i = 0; i < v.size(); ++i) {
        v[i] -= 1;
        double um = u(t, v);
        v[i] += 2;
        double up = u(t, v);
        v[i] -= 1;
        rhs += rates.p_asep * um + rates.q_asep * up - u0;
    }
    return std::abs(dudt - rhs);
}

double asep_boundary_residual(const MomentFn& u, const RateParams& rates,
                              std::span<const long> xvec, double t, size_t i) {
    require(i + 1 < xvec.size() && xvec[i + 1] == xvec[i] + 1,
            "asep_boundary_residual: needs x_{i+1} = x_i + 1");
    std::vector<long> v(xvec.begin(), xvec.end());
    double u0 = u(t, v);
    v[i + 1] -= 1;
    double um = u(t, v);
    v[i + 1] += 1;
    v[i] += 1;
    double up = u(t, v);
    return std::abs(rates.p_asep * um + rates.q_asep * up - u0);
}

double schrodinger_collapse_residual(const std::function<double(std::span<const long>)>& v,
                                     std::span<const long> nvec, long cluster, double q) {
    require(cluster >= 1 && static_cast<size_t>(cluster) <= nvec.size(),
            "schrodinger_collapse_residual: bad cluster size");
    for (long i = 1; i < cluster; ++i)
        require(nvec[static_cast<size_t>(i)] == nvec[0],
                "schrodinger_collapse_residual: leading cluster must be equal");
    std::vector<long> w(nvec.begin(), nvec.end());
    double v0 = v(w);
    auto grad_i = [&](size_t i) {
        w[i] -= 1;
        double g = v(w) - v0;
        w[i] += 1;
        return g;
    };
    double lhs = 0.0;
    for (long i = 1; i <= cluster; ++i)
        lhs += std::pow(q, cluster - i) * (1.0 - q) * grad_i(static_cast<size_t>(i - 1));
    double rhs = (1.0 - std::pow(q, cluster)) * grad_i(static_cast<size_t>(cluster - 1));
    return std::abs(lhs - rhs);
}

std::string residuals_to_json(const std::vector<ResidualRecord>& records) {
    std::ostringstream os;
    os << "[\n";
    for (size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        os << "  {\"check\": \"" << r.check << "\", \"params\": \"" << r.params
           << "\", \"residual\": " << r.residual << ", \"tolerance\": " << r.tolerance
           << ", \"pass\": " << (r.pass ? "true" : "false") << "}"
           << (i + 1 < records.size() ? "," : "") << "\n";
    }
    os << "]\n";
    return os.str();
}

}  // namespace qlab::duality
