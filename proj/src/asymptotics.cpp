#include "qlab/asymptotics.hpp"

#include <cmath>

#include "qlab/fredholm.hpp"
#include "qlab/linalg.hpp"

namespace qlab::asymptotics {

cplx steepest_descent_G(cplx z, double tau) { return -std::log(z) / 4.0 - tau / (tau + z); }

CriticalPointDiagnostics validate_critical_point(double tau) {
    require(tau > 0.0 && tau < 1.0, "validate_critical_point: 0 < tau < 1");
    CriticalPointDiagnostics d;
    d.g_prime = -1.0 / (4.0 * tau) + tau / ((tau + tau) * (tau + tau));
    d.g_double_prime = 1.0 / (4.0 * tau * tau) - 2.0 * tau / std::pow(2.0 * tau, 3);
    d.g_triple_prime = -1.0 / (8.0 * tau * tau * tau);
    d.cubic_coefficient = -1.0 / (48.0 * tau * tau * tau);
    double h = 1e-4 * tau;
    auto g = [&](double z) { return steepest_descent_G(cplx(z), tau).real(); };
    d.fd_second = (g(tau + h) - 2.0 * g(tau) + g(tau - h)) / (h * h);
    return d;
}

namespace {

// Oriented GL-16 discretization of the segment [a, b]; weights carry
// d(path)/(2 pi i) so that sum w f(z) approximates the normalized integral.
constexpr double GLX[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                           0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                           0.9445750230732326, 0.9894009349916499};
constexpr double GLW[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                           0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                           0.0622535239386479, 0.0271524594117541};

struct PathRule {
    std::vector<cplx> nodes, weights;
};

void add_graded_ray(PathRule& rule, cplx vertex, cplx direction, double length, int panels,
                    bool toward_vertex) {
    // panel boundaries quadratically clustered at the vertex
    std::vector<double> bounds(static_cast<size_t>(panels) + 1);
    for (int i = 0; i <= panels; ++i) {
        double u = static_cast<double>(i) / panels;
        bounds[static_cast<size_t>(i)] = length * u * u;
    }
    for (int p = 0; p < panels; ++p) {
        double lo = bounds[static_cast<size_t>(p)], hi = bounds[static_cast<size_t>(p) + 1];
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int i = 0; i < 8; ++i)
            for (double sgn : {-1.0, 1.0}) {
                double ell = mid + sgn * GLX[i] * half;
                rule.nodes.push_back(vertex + ell * direction);
                cplx w = GLW[i] * half * direction / (2.0 * PI * I_UNIT);
                rule.weights.push_back(toward_vertex ? -w : w);
            }
    }
}

// w-contour: from 1 + T e^{-i pi/3} up through 1 to 1 + T e^{+i pi/3}.
PathRule airy_w_rule(double truncation, int nodes) {
    PathRule rule;
    int panels = std::max(3, nodes / 16);
    add_graded_ray(rule, cplx(1.0), std::exp(cplx(0, -PI / 3.0)), truncation, panels, true);
    add_graded_ray(rule, cplx(1.0), std::exp(cplx(0, PI / 3.0)), truncation, panels, false);
    return rule;
}

// z-contour: from T e^{2 i pi/3} down through 0 to T e^{-2 i pi/3}.
PathRule airy_z_rule(double truncation, int nodes) {
    PathRule rule;
    int panels = std::max(3, nodes / 16);
    add_graded_ray(rule, cplx(0.0), std::exp(cplx(0, 2.0 * PI / 3.0)), truncation, panels, true);
    add_graded_ray(rule, cplx(0.0), std::exp(cplx(0, -2.0 * PI / 3.0)), truncation, panels, false);
    return rule;
}

double fgue_pass(double r, double truncation, int nodes) {
    PathRule wr = airy_w_rule(truncation, nodes);
    PathRule zr = airy_z_rule(truncation, nodes);
    const long m = static_cast<long>(wr.nodes.size());
    const double arg = std::pow(2.0, 4.0 / 3.0) * r;
    MatC k = MatC::Zero(m, m);
    for (size_t zi = 0; zi < zr.nodes.size(); ++zi) {
        cplx z = zr.nodes[zi];
        cplx ze = std::exp(-z * z * z / 3.0 + arg * z) * zr.weights[zi];
        for (long u = 0; u < m; ++u) {
            cplx w = wr.nodes[static_cast<size_t>(u)];
            cplx cu = ze * std::exp(w * w * w / 3.0 - arg * w) / (w - z);
            for (long v = 0; v < m; ++v)
                k(u, v) += cu / (z - wr.nodes[static_cast<size_t>(v)]);
        }
    }
    for (long v = 0; v < m; ++v) k.col(v) *= wr.weights[static_cast<size_t>(v)];
    cplx det = det_id_plus(MatC(-k));
    return det.real();
}

}  // namespace

double fgue(double r, double truncation, int nodes) {
    require(truncation >= 5.0, "fgue: truncation >= 5");
    require(nodes >= 64, "fgue: nodes >= 64");
    double coarse = fgue_pass(r, truncation, nodes);
    double fine = fgue_pass(r, truncation + 1.5, nodes * 2);
    if (std::abs(fine - coarse) > 5e-5)
        throw NonConvergenceError("fgue: node/truncation doubling did not settle");
    return fine;
}

std::vector<TwConvergencePoint> asep_tw_convergence(const TwQuery& query) {
    require(query.tau > 0 && query.tau < 1, "asep_tw_convergence: 0 < tau < 1");
    double tau = query.tau;
    double gamma = (1.0 - tau) / (1.0 + tau);
    double limit = fgue(query.r);
    std::vector<TwConvergencePoint> out;
    for (double t : query.t_ladder) {
        require(t > 0, "asep_tw_convergence: t > 0");
        int nodes = query.nodes > 0
                        ? query.nodes
                        : std::max(64, static_cast<int>(16.0 * std::cbrt(t)));
        double log_zeta = (-t / 4.0 + std::cbrt(t) * query.r) * std::log(tau);
        // transform argument -(1-tau) tau^{-t/4 + t^{1/3} r}, dynamics run at t/gamma
        cplx zeta = -(1.0 - tau) * std::exp(log_zeta);
        fredholm::KernelSpec spec = fredholm::AsepMB{0, t / gamma, tau, 1.0};
        fredholm::DetValue dv = fredholm::transform_via_mb(spec, zeta, nodes);
        TwConvergencePoint p;
        p.t = t;
        p.det = dv.value.real();
        p.fgue = limit;
        p.gap = std::abs(p.det - limit);
        out.push_back(p);
    }
    return out;
}

}  // namespace qlab::asymptotics
