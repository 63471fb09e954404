#pragma once

#include <vector>

#include "qlab/contours.hpp"
#include "qlab/markov.hpp"
#include "qlab/rng.hpp"

namespace qlab::polymer {

/// State of the coupled multiplicative-noise chain dz(s,n) = (z(s,n-1) -
/// z(s,n)) ds + z(s,n) dB_n with z(s,0) = 0; values stay strictly positive.
struct SheState {
    double time = 0.0;
    std::vector<double> z;        // z[n-1] = z(time, n), n = 1..N
    std::vector<double> drift;    // drift of B_n; empty = zero drift
};

/// Strang split-step integrator: half-step of the lattice coupling, exact
/// geometric update exp(dB - dt/2 + drift dt) for the noise, half-step again.
SheState simulate_she(long n_sites, double t_final, double dt, const std::vector<double>& drift,
                      const std::vector<double>& z0, Rng& rng);

/// E[prod_j z(t, n_j)] by the nested contour formula with pole offsets at
/// w_B + c (coupling constant c; c = 1 matches the lattice chain).
moments::MomentValue she_moment(std::span<const long> nvec, double t, double c = 1.0,
                                moments::QuadratureOptions opts = {});

/// Laplace transform E[exp(-u e^{3t/2} z(t,n))] via the gamma-ratio
/// Mellin-Barnes determinant; Re u >= 0.
cplx oy_laplace_det(cplx u, long n, double t, int nodes = 48);

struct ScalingPoint {
    double epsilon = 0.0;
    double mean_z = 0.0;
    double std_error = 0.0;
    double limit = 0.0;  // e^{-t} for n = 1
    double gap = 0.0;
};

/// Diagnostic for the particle-system-to-polymer scaling: maps packed-start
/// trajectories through q = e^{-eps}, t = eps^{-2} s onto z_eps(s, n) and
/// reports the gap of E[z_eps] from the n = 1 limit e^{-s}.
std::vector<ScalingPoint> scaling_map_diagnostic(const std::vector<double>& eps_ladder,
                                                 double s, long trajectories,
                                                 std::uint64_t seed);

/// z_eps(0, n) = eps^{n-1} e^{eps n} under the packed start.
double scaling_initial_value(double eps, long n);

}  // namespace qlab::polymer
