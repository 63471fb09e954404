#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qlab/linalg.hpp"
#include "qlab/markov.hpp"

namespace qlab::duality {

using markov::OccupancyConfig;
using markov::ParticleConfig;
using markov::RateParams;
using markov::ZrpConfig;

// ---- pairing functionals ---------------------------------------------------

/// H(x, y) = prod_i q^{(x_i + i) y_i}; zero when y_0 > 0 (x_0 = +infinity).
double qtasep_H(const ParticleConfig& x, const ZrpConfig& y, double q);

/// prod_i tau^{N_{x_i}(eta)}  (valid for a_x == 1 only).
double asep_H(const OccupancyConfig& eta, std::span<const long> xs, double tau);

/// prod_i tau^{N_{x_i - 1}(eta)} eta_{x_i}  (general bond rates).
double asep_tilde_H(const OccupancyConfig& eta, std::span<const long> xs, double tau);

// ---- generators applied to state functions --------------------------------

double gen_qtasep(const std::function<double(const ParticleConfig&)>& f,
                  const ParticleConfig& x, const RateParams& rates);

double gen_tazrp(const std::function<double(const ZrpConfig&)>& f, const ZrpConfig& y,
                 const RateParams& rates);

/// Occupation-side ASEP generator; the configuration must have at least one
/// empty slack site at each window edge so no boundary bond is active.
double gen_asep_occ(const std::function<double(const OccupancyConfig&)>& f,
                    const OccupancyConfig& eta, const RateParams& rates);

/// Particle-side ASEP generator (p attached to left jumps, q to right jumps:
/// the roles of p and q are reversed relative to the occupation process).
double gen_asep_part(const std::function<double(std::span<const long>)>& f,
                     std::span<const long> xs, const RateParams& rates);

/// |L_x H - L_y H| for the three duality pairings (exact algebra, no MC).
double residual_qtasep_duality(const ParticleConfig& x, const ZrpConfig& y,
                               const RateParams& rates);
double residual_asep_duality_tilde(const OccupancyConfig& eta, std::span<const long> xs,
                                   const RateParams& rates);
double residual_asep_duality_H(const OccupancyConfig& eta, std::span<const long> xs,
                               const RateParams& rates);

// ---- enumerated finite chains and exact evolution --------------------------

struct EnumeratedChain {
    std::vector<std::vector<long>> states;  // lexicographically ordered
    MatR generator;                         // row = source state, row sums <= 0
    long index_of(std::span<const long> state) const;  // -1 if absent
};

/// TAZRP with k particles on sites 0..N. With `pin_site0` the space is
/// restricted to y_0 = 0 and flow into site 0 is killed (the pinned sector is
/// closed and stays identically zero).
EnumeratedChain build_tazrp_chain(long n_sites, long k, const RateParams& rates, bool pin_site0);

/// ASEP particle process (p left / q right) with k ordered particles inside
/// [window_left, window_right]; jumps exiting the window are killed. The
/// truncation error of an expectation started at distance d from the boundary
/// is bounded by the Poisson tail reported by `poisson_tail_bound`.
EnumeratedChain build_asep_particle_chain(long k, long window_left, long window_right,
                                          const RateParams& rates);

double poisson_tail_bound(double rate_times_t, long jumps_needed);

/// h(t) = exp(tL) h0 on an enumerated chain (dense Pade scaling-and-squaring).
/// `dimension_cap` guards accidental state-space blowups.
VecR evolve_true_equation(const EnumeratedChain& chain, const VecR& h0, double t,
                          long dimension_cap = 200000);

// ---- dynamic duality checks -------------------------------------------------

struct DualityCheckResult {
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double dual_value = 0.0;
    double truncation_bound = 0.0;
    double diff() const { return std::abs(mc_mean - dual_value); }
    bool pass(double nsig = 3.0) const { return diff() <= nsig * mc_se + truncation_bound + 1e-12; }
};

DualityCheckResult check_duality_dynamic_qtasep(const ParticleConfig& x0, const ZrpConfig& y0,
                                                const RateParams& rates, double t,
                                                long trajectories, std::uint64_t seed);

DualityCheckResult check_duality_dynamic_asep(const OccupancyConfig& eta0,
                                              std::span<const long> xs,
                                              const RateParams& rates, double t,
                                              long trajectories, std::uint64_t seed);

// ---- free-evolution residuals (the solution u is supplied externally) ------

using MomentFn = std::function<double(double t, std::span<const long> labels)>;

/// |du/dt - (1-q) sum_i a_{n_i} grad_i u| via centered time differences.
double qtasep_fd_residual(const MomentFn& u, const RateParams& rates,
                          std::span<const long> nvec, double t, double dt = 1e-4);

/// |grad_i u - q grad_{i+1} u| at a coordinate pair with n_i = n_{i+1}.
double qtasep_boundary_residual(const MomentFn& u, double q, std::span<const long> nvec,
                                double t, size_t i);

/// |du/dt - sum_i (p u(x_i^-) + q u(x_i^+) - u)|.
double asep_fd_residual(const MomentFn& u, const RateParams& rates,
                        std::span<const long> xvec, double t, double dt = 1e-4);

/// |p u(x_{i+1}^-) + q u(x_i^+) - u| at a pair with x_{i+1} = x_i + 1.
double asep_boundary_residual(const MomentFn& u, const RateParams& rates,
                              std::span<const long> xvec, double t, size_t i);

/// Residual of collapsing sum_{i<=m} q^{m-i}(1-q) grad_i onto (1-q^m) grad_m
/// for a symmetric test function on a size-m equal cluster.
double schrodinger_collapse_residual(const std::function<double(std::span<const long>)>& v,
                                     std::span<const long> nvec, long cluster, double q);

struct ResidualRecord {
    std::string check;
    std::string params;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

std::string residuals_to_json(const std::vector<ResidualRecord>& records);

}  // namespace qlab::duality
