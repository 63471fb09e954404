#include "qlab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "qlab/qfunc.hpp"

namespace qlab::markov {

long OccupancyConfig::n_below(long x) const {
    require(left_empty, "n_below needs left-empty boundary");
    long n = 0;
    for (long y = left; y <= std::min(x, right()); ++y) n += occ[static_cast<size_t>(y - left)];
    return n;
}

std::uint64_t state_hash(std::span<const long> state) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (long v : state) {
        auto u = static_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= (u >> (8 * b)) & 0xff;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

long sample_qgeometric(double alpha, double q, Rng& rng) {
    require(alpha >= 0.0 && alpha < 1.0, "sample_qgeometric: 0 <= alpha < 1");
    if (alpha == 0.0) return 0;
    double u = rng.uniform01();
    double norm = std::abs(qfunc::q_pochhammer_inf(alpha, q));
    double cum = 0.0, term = norm;  // k = 0 term: (alpha;q)_inf
    double qq = 1.0;                // (q;q)_k running product
    double ak = 1.0;
    for (long k = 0; k < 100000; ++k) {
        cum += term;
        if (u <= cum) return k;
        ak *= alpha;
        qq *= (1.0 - std::pow(q, k + 1));
        term = norm * ak / qq;
    }
    return 100000;  // unreachable for alpha < 1
}

ParticleConfig init_qtasep(long n, const InitialData& init, const RateParams& rates, Rng& rng) {
    ParticleConfig cfg;
    cfg.positions.resize(static_cast<size_t>(n));
    switch (init.kind) {
        case InitialData::Kind::Step:
            for (long i = 0; i < n; ++i) cfg.positions[static_cast<size_t>(i)] = -(i + 1);
            break;
        case InitialData::Kind::HalfStationary: {
            long prev = 0;
            for (long i = 0; i < n; ++i) {
                double ai = rates.rate(static_cast<size_t>(i));
                require(init.alpha < ai, "half-stationary needs alpha < min a_i");
                long gap = sample_qgeometric(init.alpha / ai, rates.q, rng);
                cfg.positions[static_cast<size_t>(i)] = prev - 1 - gap;
                prev = cfg.positions[static_cast<size_t>(i)];
            }
            break;
        }
        default:
            throw std::invalid_argument("init_qtasep: unsupported initial data kind");
    }
    return cfg;
}

ParticleConfig simulate_qtasep(ParticleConfig config, const RateParams& rates, double t,
                               Rng& rng, EventLog* log) {
    require(t >= 0.0, "simulate_qtasep: t >= 0");
    const long n = config.n();
    std::vector<double> rate(static_cast<size_t>(n));
    double now = 0.0;
    while (true) {
        double total = 0.0;
        for (long i = 0; i < n; ++i) {
            double r;
            if (i == 0) {
                r = rates.rate(0);
            } else {
                long gap = config.positions[static_cast<size_t>(i - 1)] - config.positions[static_cast<size_t>(i)] - 1;
                r = rates.rate(static_cast<size_t>(i)) * (1.0 - std::pow(rates.q, gap));
            }
            rate[static_cast<size_t>(i)] = r;
            total += r;
        }
        if (total <= 0.0) break;
        now += rng.exponential(total);
        if (now > t) break;
        double u = rng.uniform01() * total;
        long pick = n - 1;
        for (long i = 0; i < n; ++i) {
            u -= rate[static_cast<size_t>(i)];
            if (u <= 0.0) {
                pick = i;
                break;
            }
        }
        config.positions[static_cast<size_t>(pick)] += 1;
        if (log) log->push_back({now, pick + 1, state_hash(config.positions)});
    }
    return config;
}

ZrpConfig simulate_tazrp(ZrpConfig config, const RateParams& rates, double t, Rng& rng,
                         EventLog* log) {
    require(t >= 0.0, "simulate_tazrp: t >= 0");
    const long n = static_cast<long>(config.counts.size()) - 1;
    std::vector<double> rate(static_cast<size_t>(n) + 1, 0.0);
    double now = 0.0;
    while (true) {
        double total = 0.0;
        for (long i = 1; i <= n; ++i) {
            double r = config.is_infinite(static_cast<size_t>(i))
                           ? rates.rate(static_cast<size_t>(i))
                           : rates.rate(static_cast<size_t>(i)) *
                                 (1.0 - std::pow(rates.q, config.counts[static_cast<size_t>(i)]));
            rate[static_cast<size_t>(i)] = r;
            total += r;
        }
        if (total <= 0.0) break;
        now += rng.exponential(total);
        if (now > t) break;
        double u = rng.uniform01() * total;
        long pick = n;
        for (long i = 1; i <= n; ++i) {
            u -= rate[static_cast<size_t>(i)];
            if (u <= 0.0) {
                pick = i;
                break;
            }
        }
        if (!config.is_infinite(static_cast<size_t>(pick))) config.counts[static_cast<size_t>(pick)] -= 1;
        if (!config.is_infinite(static_cast<size_t>(pick - 1))) config.counts[static_cast<size_t>(pick - 1)] += 1;
        if (log) log->push_back({now, pick, state_hash(config.counts)});
    }
    return config;
}

long asep_window_pad(double t) { return static_cast<long>(std::ceil(10.0 * t + 50.0)); }

OccupancyConfig init_asep(const InitialData& init, long window_left, long window_right, Rng& rng) {
    OccupancyConfig cfg;
    cfg.left = window_left;
    cfg.occ.assign(static_cast<size_t>(window_right - window_left + 1), 0);
    cfg.left_empty = true;
    cfg.right_full = true;
    switch (init.kind) {
        case InitialData::Kind::Step:
            for (long x = std::max(window_left, 1L); x <= window_right; ++x)
                cfg.occ[static_cast<size_t>(x - window_left)] = 1;
            break;
        case InitialData::Kind::StepBernoulli:
            if (init.rho >= 1.0) {
                for (long x = std::max(window_left, 1L); x <= window_right; ++x)
                    cfg.occ[static_cast<size_t>(x - window_left)] = 1;
            } else {
                for (long x = std::max(window_left, 1L); x <= window_right; ++x)
                    cfg.occ[static_cast<size_t>(x - window_left)] = rng.bernoulli(init.rho) ? 1 : 0;
            }
            break;
        default:
            throw std::invalid_argument("init_asep: unsupported initial data kind");
    }
    return cfg;
}

namespace {

// Fenwick tree over bond rates: O(log n) update and proportional sampling.
class RateIndex {
public:
    explicit RateIndex(size_t n) : n_(n), tree_(n + 1, 0.0) {}
    void set(size_t i, double v) {
        double d = v - get(i);
        if (d == 0.0) return;
        raw_[i] = v;
        for (size_t j = i + 1; j <= n_; j += j & (~j + 1)) tree_[j] += d;
    }
    double get(size_t i) const {
        auto it = raw_.find(i);
        return it == raw_.end() ? 0.0 : it->second;
    }
    double total() const {
        double s = 0.0;
        for (size_t j = n_; j > 0; j -= j & (~j + 1)) s += tree_[j];
        return s;
    }
    // Largest prefix with cumulative rate < u; returns the bond index hit.
    size_t sample(double u) const {
        size_t pos = 0;
        size_t mask = 1;
        while ((mask << 1) <= n_) mask <<= 1;
        for (; mask > 0; mask >>= 1) {
            size_t next = pos + mask;
            if (next <= n_ && tree_[next] < u) {
                pos = next;
                u -= tree_[next];
            }
        }
        return pos;  // 0-based bond index
    }

private:
    size_t n_;
    std::vector<double> tree_;
    std::unordered_map<size_t, double> raw_;
};

}  // namespace

OccupancyConfig simulate_asep(OccupancyConfig config, const RateParams& rates, double t,
                              Rng& rng, EventLog* log) {
    require(t >= 0.0, "simulate_asep: t >= 0");
    require(rates.p_asep + rates.q_asep > 0.0, "simulate_asep: ASEP rates unset");
    const long nb = static_cast<long>(config.occ.size()) - 1;  // bonds inside the window
    if (nb <= 0) return config;
    RateIndex idx(static_cast<size_t>(nb));
    auto bond_rate = [&](long b) {
        int l = config.occ[static_cast<size_t>(b)], r = config.occ[static_cast<size_t>(b) + 1];
        double ay = rates.bond_rate(config.left + b);
        if (l == 1 && r == 0) return ay * rates.p_asep;
        if (l == 0 && r == 1) return ay * rates.q_asep;
        return 0.0;
    };
    for (long b = 0; b < nb; ++b) idx.set(static_cast<size_t>(b), bond_rate(b));
    double now = 0.0;
    while (true) {
        double total = idx.total();
        if (total <= 1e-300) break;
        now += rng.exponential(total);
        if (now > t) break;
        long b = std::min<long>(nb - 1, static_cast<long>(idx.sample(rng.uniform01() * total)));
        std::swap(config.occ[static_cast<size_t>(b)], config.occ[static_cast<size_t>(b) + 1]);
        for (long d = -1; d <= 1; ++d) {
            long bb = b + d;
            if (bb >= 0 && bb < nb) idx.set(static_cast<size_t>(bb), bond_rate(bb));
        }
        if (log) {
            std::vector<long> st(config.occ.begin(), config.occ.end());
            log->push_back({now, config.left + b, state_hash(st)});
        }
    }
    return config;
}

OccupancyConfig run_asep(const InitialData& init, const RateParams& rates, long obs_left,
                         long obs_right, double t, Rng& rng) {
    long pad = asep_window_pad(t);
    OccupancyConfig cfg = init_asep(init, obs_left - pad, obs_right + pad, rng);
    return simulate_asep(std::move(cfg), rates, t, rng);
}

Ensemble mc_expectation(const std::function<double(Rng&)>& functional, long count,
                        std::uint64_t seed) {
    require(count >= 2, "mc_expectation: need at least 2 trajectories");
    Ensemble e;
    e.seed = seed;
    e.count = count;
    e.values.resize(static_cast<size_t>(count));
    for (long i = 0; i < count; ++i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        e.values[static_cast<size_t>(i)] = functional(rng);
    }
    double sum = 0.0;
    for (double v : e.values) sum += v;
    e.mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (double v : e.values) ss += (v - e.mean) * (v - e.mean);
    e.std_error = std::sqrt(ss / (static_cast<double>(count) - 1.0) / static_cast<double>(count));
    return e;
}

}  // namespace qlab::markov
