#pragma once

#include <vector>

#include "qlab/numeric.hpp"

namespace qlab::asymptotics {

struct CriticalPointDiagnostics {
    double g_prime = 0.0;
    double g_double_prime = 0.0;
    double g_triple_prime = 0.0;   // analytic value -1/(8 tau^3)
    double cubic_coefficient = 0.0;  // series coefficient -1/(48 tau^3)
    double fd_second = 0.0;          // finite-difference check of G'' at tau
};

/// G(z) = -log(z)/4 - tau/(tau+z); z = tau is a double critical point.
cplx steepest_descent_G(cplx z, double tau);

CriticalPointDiagnostics validate_critical_point(double tau);

/// Tracy-Widom GUE value F_GUE(2^{4/3} r) from the Nystrom determinant of the
/// rescaled limit kernel on rays (w from 1 at +-pi/3 upward, z from 0 at
/// +-2pi/3 downward), truncated at `truncation` with `nodes` per half-ray.
double fgue(double r, double truncation = 6.0, int nodes = 64);

struct TwConvergencePoint {
    double t = 0.0;
    double det = 0.0;   // e_tau-transform determinant at the fluctuation scaling
    double fgue = 0.0;  // limit value
    double gap = 0.0;
};

struct TwQuery {
    double r = 0.0;
    double tau = 0.4;
    std::vector<double> t_ladder{50.0, 100.0, 200.0};
    int nodes = 0;  // 0: scale with t^{1/3}
};

/// Finite-time distribution transform E[e_tau(-zeta tau^{N_0(t/gamma)})] at
/// zeta = tau^{-t/4 + t^{1/3} r}, compared against the limit fgue(r).
std::vector<TwConvergencePoint> asep_tw_convergence(const TwQuery& query);

}  // namespace qlab::asymptotics
