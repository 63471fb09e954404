#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qlab/numeric.hpp"
#include "qlab/rng.hpp"

namespace qlab::markov {

/// Ordered particle locations x_1 > x_2 > ... > x_N (x_0 = +infinity implicit).
struct ParticleConfig {
    std::vector<long> positions;
    long n() const { return static_cast<long>(positions.size()); }
};

/// Zero-range occupancies y_0..y_N; sites flagged infinite always jump at the
/// bare rate a_i and are never decremented (used by the gap-process coupling).
struct ZrpConfig {
    std::vector<long> counts;
    std::vector<bool> infinite;  // empty means all finite
    bool is_infinite(size_t i) const { return i < infinite.size() && infinite[i]; }
};

/// Exclusion occupancies on a finite window [left, left + occ.size() - 1];
/// sites outside are empty on the left and full on the right when the flags
/// are set (step-type data).
struct OccupancyConfig {
    long left = 0;
    std::vector<std::uint8_t> occ;
    bool left_empty = true;
    bool right_full = false;

    long right() const { return left + static_cast<long>(occ.size()) - 1; }
    int at(long x) const {
        if (x < left) return left_empty ? 0 : -1;
        if (x > right()) return right_full ? 1 : 0;
        return occ[static_cast<size_t>(x - left)];
    }
    /// N_x = number of particles at sites <= x (requires left_empty).
    long n_below(long x) const;
};

struct RateParams {
    // q-TASEP / TAZRP
    double q = 0.5;
    std::vector<double> a;  // per-particle (or per-site) jump rates; empty = all 1
    double rate(size_t i) const { return i < a.size() ? a[i] : 1.0; }

    // ASEP: p + q_asep = 1, p <= q_asep, tau = p/q_asep
    double p_asep = 0.0, q_asep = 0.0;
    std::vector<double> bond_a;  // per-bond rates indexed from bond_left
    long bond_left = 0;
    double bond_rate(long y) const {
        long i = y - bond_left;
        return (i >= 0 && i < static_cast<long>(bond_a.size())) ? bond_a[static_cast<size_t>(i)] : 1.0;
    }
    double tau() const { return p_asep / q_asep; }
    double gamma() const { return q_asep - p_asep; }

    static RateParams asep(double tau) {
        RateParams r;
        r.p_asep = tau / (1.0 + tau);
        r.q_asep = 1.0 / (1.0 + tau);
        return r;
    }
};

struct InitialData {
    enum class Kind { Step, HalfStationary, StepBernoulli } kind = Kind::Step;
    double alpha = 0.0;  // half-stationary gap parameter
    double rho = 1.0;    // step-Bernoulli density
    double theta() const { return rho < 1.0 ? rho / (1.0 - rho) : std::numeric_limits<double>::infinity(); }

    static InitialData step() { return {}; }
    static InitialData half_stationary(double alpha) {
        return {Kind::HalfStationary, alpha, 1.0};
    }
    static InitialData step_bernoulli(double rho) { return {Kind::StepBernoulli, 0.0, rho}; }
};

struct Event {
    double time;
    long site;
    std::uint64_t state_hash;
};
using EventLog = std::vector<Event>;

/// q-geometric sample: P(X = k) = (alpha;q)_inf alpha^k / (q;q)_k, by inverse CDF.
long sample_qgeometric(double alpha, double q, Rng& rng);

ParticleConfig init_qtasep(long n, const InitialData& init, const RateParams& rates, Rng& rng);

/// Particle i jumps right at rate a_i (1 - q^{gap_i}); gap of the lead particle
/// is infinite. Exponential clocks are resampled after every event.
ParticleConfig simulate_qtasep(ParticleConfig config, const RateParams& rates, double t,
                               Rng& rng, EventLog* log = nullptr);

/// Site i in 1..N sends one particle to i-1 at rate a_i (1 - q^{y_i}); site 0
/// only absorbs.
ZrpConfig simulate_tazrp(ZrpConfig config, const RateParams& rates, double t, Rng& rng,
                         EventLog* log = nullptr);

/// Window size the ASEP simulator requires around the observed sites.
long asep_window_pad(double t);

/// Exchange dynamics at bond (y, y+1): rate a_y p for (1,0) -> (0,1) and
/// a_y q for (0,1) -> (1,0). The window must carry pad >= asep_window_pad(t)
/// beyond every observed site.
OccupancyConfig init_asep(const InitialData& init, long window_left, long window_right, Rng& rng);
OccupancyConfig simulate_asep(OccupancyConfig config, const RateParams& rates, double t,
                              Rng& rng, EventLog* log = nullptr);

/// Convenience wrapper: builds the window around [obs_left, obs_right] with the
/// required pad, draws the initial data and runs to time t.
OccupancyConfig run_asep(const InitialData& init, const RateParams& rates, long obs_left,
                         long obs_right, double t, Rng& rng);

struct Ensemble {
    std::uint64_t seed = 0;
    long count = 0;
    std::vector<double> values;
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean and standard error of `functional` over `count` independent seeded
/// trajectories; trajectory i uses stream (seed, i) and the reduction order is
/// fixed by trajectory index.
Ensemble mc_expectation(const std::function<double(Rng&)>& functional, long count,
                        std::uint64_t seed);

std::uint64_t state_hash(std::span<const long> state);

}  // namespace qlab::markov
