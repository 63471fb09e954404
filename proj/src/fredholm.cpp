#include "qlab/fredholm.hpp"

#include <algorithm>
#include <cmath>

#include "qlab/moments.hpp"
#include "qlab/qfunc.hpp"

namespace qlab::fredholm {

namespace {

using moments::discretize;

// 16-point Gauss-Legendre on [-1, 1].
constexpr double GLX[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                           0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                           0.9445750230732326, 0.9894009349916499};
constexpr double GLW[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                           0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                           0.0622535239386479, 0.0271524594117541};

struct SPathRule {
    std::vector<cplx> nodes;
    std::vector<cplx> weights;  // include ds/(2 pi i)
};

void add_segment(SPathRule& rule, cplx a, cplx b, double panel_h) {
    double len = std::abs(b - a);
    if (len < 1e-14) return;
    int panels = std::max(1, static_cast<int>(std::ceil(len / panel_h)));
    cplx dir = (b - a) / static_cast<double>(panels);
    for (int p = 0; p < panels; ++p) {
        cplx mid = a + dir * (p + 0.5);
        for (int i = 0; i < 8; ++i) {
            for (double sgn : {-1.0, 1.0}) {
                cplx node = mid + sgn * GLX[i] * 0.5 * dir;
                rule.nodes.push_back(node);
                rule.weights.push_back(GLW[i] * 0.5 * dir / (2.0 * PI * I_UNIT));
            }
        }
    }
}

struct TailSpec {
    double rate_plus = PI, rate_minus = PI;  // exponential decay rates up/down
    double log_amplitude = 0.0;              // bound on log of the non-decaying part
    double tol = 1e-13;
    double y_extra_decay = 0.0;  // additional Gaussian decay exp(-y_extra * y^2)
    double y_span(double rate) const {
        double need = -std::log(tol) + std::max(0.0, log_amplitude);
        if (y_extra_decay > 0.0) {
            // solve rate*y + extra*y^2 = need
            double y = (-rate + std::sqrt(rate * rate + 4.0 * y_extra_decay * need)) /
                       (2.0 * y_extra_decay);
            return std::max(4.0, y);
        }
        return std::max(4.0, need / rate);
    }
};

SPathRule vertical_line_rule(double delta, const TailSpec& tail, double panel_h) {
    SPathRule rule;
    double yp = tail.y_span(tail.rate_plus), ym = tail.y_span(tail.rate_minus);
    add_segment(rule, cplx(delta, -ym), cplx(delta, yp), panel_h);
    return rule;
}

SPathRule drd_rule(double r, double d, const TailSpec& tail, double panel_h) {
    SPathRule rule;
    double yp = tail.y_span(tail.rate_plus), ym = tail.y_span(tail.rate_minus);
    ym = std::max(ym, d + 1.0);
    yp = std::max(yp, d + 1.0);
    add_segment(rule, cplx(r, -ym), cplx(r, -d), panel_h);
    add_segment(rule, cplx(r, -d), cplx(0.5, -d), panel_h);
    add_segment(rule, cplx(0.5, -d), cplx(0.5, d), panel_h);
    add_segment(rule, cplx(0.5, d), cplx(r, d), panel_h);
    add_segment(rule, cplx(r, d), cplx(r, yp), panel_h);
    return rule;
}

// Decay rates of Gamma(-s)Gamma(1+s) (-zeta)^s along Im s -> +-infinity.
TailSpec zeta_tail(cplx zeta, double re_max, double log_g_bound) {
    TailSpec tail;
    double psi = std::arg(-zeta);
    tail.rate_plus = PI + psi;
    tail.rate_minus = PI - psi;
    if (tail.rate_plus < 0.02 || tail.rate_minus < 0.02)
        throw NonConvergenceError("mellin-barnes: zeta too close to the positive real axis");
    tail.log_amplitude =
        std::max(0.0, re_max * std::log(std::abs(zeta))) + log_g_bound + std::log(2.0 * PI) + 2.0;
    return tail;
}

double zeta_panel_width(cplx zeta, double base, double extra_freq) {
    double freq = std::abs(std::log(std::abs(zeta))) + 2.0 * std::abs(std::log(base)) +
                  2.0 + extra_freq;
    return std::min(0.7, 2.0 * PI / freq);
}

// g(w)/g(base^s w) ratios, written so exponents combine before exponentiation.

cplx qtasep_g_ratio(cplx w, cplx qsw, double t, double q, long n,
                    const std::vector<double>& a) {
    cplx val = std::exp(t * (qsw - w));
    for (long m = 0; m < n; ++m) {
        double am = m < static_cast<long>(a.size()) ? a[static_cast<size_t>(m)] : 1.0;
        val *= qfunc::q_pochhammer_inf(qsw / am, q) / qfunc::q_pochhammer_inf(w / am, q);
    }
    return val;
}

cplx asep_g_ratio(cplx w, cplx tsw, double t, double tau, double theta, long x) {
    auto [p, q] = std::pair{tau / (1.0 + tau), 1.0 / (1.0 + tau)};
    cplx val = std::exp((q - p) * t * (tau / (w + tau) - tau / (tsw + tau)));
    val *= pow_int((tsw + tau) / (w + tau), x);
    if (std::isfinite(theta))
        val *= qfunc::q_pochhammer_inf(tsw / (tau * theta), tau) /
               qfunc::q_pochhammer_inf(w / (tau * theta), tau);
    return val;
}

double sample_log_g_bound(const std::function<cplx(cplx, cplx)>& gr, double base,
                          const QuadratureRule& wrule, double re_lo, double re_hi) {
    double bound = 0.0;
    for (double re : {re_lo, 0.5 * (re_lo + re_hi), re_hi})
        for (double im : {0.0, 0.7, -0.7, 1.8, -1.8, 3.3, -3.3, 6.0, -6.0, 11.0, -11.0, 23.0})
            for (size_t u = 0; u < wrule.nodes.size(); u += 3) {
                cplx s(re, im);
                cplx qsw = std::exp(s * std::log(base)) * wrule.nodes[u];
                double lg = std::log(std::abs(gr(wrule.nodes[u], qsw)) + 1e-300);
                bound = std::max(bound, lg);
            }
    return bound;
}

double min_pair_distance(double base, const QuadratureRule& wrule, double re_lo, double re_hi) {
    double inf = std::numeric_limits<double>::infinity();
    for (double re : {re_lo, 0.5 * (re_lo + re_hi), re_hi})
        for (double im : {0.0, 0.7, -1.3, 2.9, -6.1}) {
            cplx factor = std::exp(cplx(re, im) * std::log(base));
            for (size_t u = 0; u < wrule.nodes.size(); u += 2)
                for (size_t v = 0; v < wrule.nodes.size(); v += 2)
                    inf = std::min(inf, std::abs(factor * wrule.nodes[u] - wrule.nodes[v]));
        }
    return inf;
}

struct MbAssembly {
    double base = 0.5;
    double sign = 1.0;  // sign of 1/(base^s w - w')
    std::function<cplx(cplx w, cplx qsw)> g_ratio;
    double re_max = 0.5;
    double extra_freq = 0.0;
    bool use_drd = false;
    double drd_r = 1.5, drd_d = 0.25;
};

MatC mb_kernel_matrix(const MbAssembly& asmb, cplx zeta, const QuadratureRule& wrule,
                      double refine = 1.0) {
    double gbound = sample_log_g_bound(asmb.g_ratio, asmb.base, wrule, 0.5, asmb.re_max);
    TailSpec tail = zeta_tail(zeta, asmb.re_max, gbound);
    tail.tol = 1e-13 / refine;
    double h = zeta_panel_width(zeta, asmb.base, asmb.extra_freq) / refine;
    SPathRule spath = asmb.use_drd ? drd_rule(asmb.drd_r, asmb.drd_d, tail, h)
                                   : vertical_line_rule(asmb.re_max, tail, h);
    const long m = static_cast<long>(wrule.nodes.size());
    MatC k = MatC::Zero(m, m);
    cplx logmz = std::log(-zeta);
    double logbase = std::log(asmb.base);
    std::vector<cplx> col(static_cast<size_t>(m));
    for (size_t si = 0; si < spath.nodes.size(); ++si) {
        cplx s = spath.nodes[si];
        cplx c = std::exp(log_gamma_pair(s) + s * logmz) * spath.weights[si];
        cplx qs = std::exp(s * logbase);
        for (long u = 0; u < m; ++u)
            col[static_cast<size_t>(u)] =
                c * asmb.g_ratio(wrule.nodes[static_cast<size_t>(u)], qs * wrule.nodes[static_cast<size_t>(u)]);
        for (long u = 0; u < m; ++u) {
            cplx qsw = qs * wrule.nodes[static_cast<size_t>(u)];
            cplx cu = col[static_cast<size_t>(u)] * asmb.sign;
            for (long v = 0; v < m; ++v)
                k(u, v) += cu / (qsw - wrule.nodes[static_cast<size_t>(v)]);
        }
    }
    return k;
}

cplx nystrom_det_of_matrix(MatC k, const QuadratureRule& wrule) {
    for (long v = 0; v < k.cols(); ++v) k.col(v) *= wrule.weights[static_cast<size_t>(v)];
    return det_id_plus(k);
}

MbAssembly make_mb_assembly(const KernelSpec& spec, const ContourSpec& contour) {
    MbAssembly asmb;
    if (const auto* s = std::get_if<QTasepMB>(&spec)) {
        asmb.base = s->q;
        asmb.sign = 1.0;
        asmb.re_max = s->delta;
        asmb.extra_freq = 2.0 * s->t;
        auto a = s->a;
        long n = s->n;
        double t = s->t, q = s->q;
        asmb.g_ratio = [t, q, n, a](cplx w, cplx qsw) { return qtasep_g_ratio(w, qsw, t, q, n, a); };
        return asmb;
    }
    if (const auto* s = std::get_if<AsepMB>(&spec)) {
        asmb.base = s->tau;
        asmb.sign = -1.0;
        asmb.use_drd = true;
        asmb.drd_d = s->d;
        double theta = s->rho < 1.0 ? s->rho / (1.0 - s->rho) : std::numeric_limits<double>::infinity();
        double t = s->t, tau = s->tau;
        long x = s->x;
        asmb.g_ratio = [t, tau, theta, x](cplx w, cplx tsw) {
            return asep_g_ratio(w, tsw, t, tau, theta, x);
        };
        // phase rate of the ratio along Im s in the live region
        asmb.extra_freq = 0.8 * (1.0 - tau) / (1.0 + tau) * t * std::abs(std::log(tau)) +
                          2.0 * std::abs(static_cast<double>(s->x));
        // smallest half-integer R with the pairing kept away from zero
        QuadratureRule probe = discretize(contour, 32);
        double r = s->R;
        if (r <= 0.0) {
            for (double cand : {1.5, 2.5, 3.5}) {
                if (min_pair_distance(tau, probe, 0.5, cand) > 0.02) {
                    r = cand;
                    break;
                }
            }
            if (r <= 0.0) throw ContourInfeasibleError("AsepMB: no admissible detour width R found");
        }
        asmb.drd_r = r;
        asmb.re_max = r;
        return asmb;
    }
    throw std::invalid_argument("make_mb_assembly: not a Mellin-Barnes kernel");
}

MatC oy_kernel_matrix(cplx u, long n, double t, const QuadratureRule& wrule, double refine) {
    TailSpec tail;
    double psi = std::arg(u);  // u^s decay contributes -psi*y
    tail.rate_plus = PI + std::min(0.0, -psi);
    tail.rate_minus = PI + std::min(0.0, psi);
    tail.rate_plus = std::max(0.3, PI - std::abs(psi));
    tail.rate_minus = tail.rate_plus;
    tail.log_amplitude = std::max(0.0, 0.5 * std::log(std::abs(u))) + 3.0 * n + 10.0;
    tail.y_extra_decay = 0.5 * t;
    tail.tol = 1e-13 / refine;
    double freq = std::abs(std::log(std::abs(u) + 1e-300)) + 3.0 * n + t + 2.0;
    double h = std::min(0.7, 2.0 * PI / freq) / refine;
    SPathRule spath = vertical_line_rule(0.5, tail, h);
    const long m = static_cast<long>(wrule.nodes.size());
    MatC k = MatC::Zero(m, m);
    cplx logu = std::log(u);
    for (size_t si = 0; si < spath.nodes.size(); ++si) {
        cplx s = spath.nodes[si];
        cplx c = std::exp(log_gamma_pair(s) + s * logu + t * s * s * 0.5) * spath.weights[si];
        for (long a = 0; a < m; ++a) {
            cplx v = wrule.nodes[static_cast<size_t>(a)];
            cplx num = c * std::exp(static_cast<double>(n) * (log_gamma(v) - log_gamma(s + v)) +
                                    v * t * s);
            for (long b = 0; b < m; ++b)
                k(a, b) += num / (v + s - wrule.nodes[static_cast<size_t>(b)]);
        }
    }
    return k;
}

cplx qtasep_cauchy_f(const QTasepCauchy& s, cplx w) {
    cplx f = std::exp((s.q - 1.0) * s.t * w);
    for (long m = 0; m < s.n; ++m) {
        double am = m < static_cast<long>(s.a.size()) ? s.a[static_cast<size_t>(m)] : 1.0;
        f *= am / (am - w);
    }
    return f;
}

double spec_theta(double rho) {
    return rho < 1.0 ? rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
}

cplx asep_tw_kernel(const AsepTW& s, cplx xi, cplx xi2) {
    auto [p, q] = std::pair{s.tau / (1.0 + s.tau), 1.0 / (1.0 + s.tau)};
    cplx eps = p / xi + q * xi - 1.0;
    cplx val = q * pow_int(xi, s.x) * std::exp(eps * s.t) / (p + q * xi * xi2 - xi);
    val *= s.rho * (xi - s.tau) / (xi - 1.0 + s.rho * (1.0 - s.tau));
    return val;
}

}  // namespace

ContourSpec kernel_contour(const KernelSpec& spec) {
    if (const auto* s = std::get_if<QTasepMB>(&spec))
        return moments::build_qtasep_mb_contour(s->a, s->q, s->delta);
    if (const auto* s = std::get_if<QTasepCauchy>(&spec))
        return moments::build_qtasep_star_contour(s->a);
    if (const auto* s = std::get_if<AsepMB>(&spec))
        return moments::build_asep_mb_contour(s->tau, spec_theta(s->rho));
    if (const auto* s = std::get_if<AsepCauchy>(&spec))
        return moments::build_c_minus_tau(s->tau, spec_theta(s->rho));
    if (const auto* s = std::get_if<AsepTW>(&spec)) {
        double radius = s->radius;
        if (radius <= 0.0) {
            double rc = moments::build_c_minus_tau(s->tau, spec_theta(s->rho)).components[0].radius;
            return ContourSpec::circle(cplx(s->tau), s->tau * (1.0 - s->tau) / rc);
        }
        return ContourSpec::circle(cplx(0.0), radius);
    }
    const auto& s = std::get<OYPolymer>(spec);
    require(s.contour_radius < 0.25, "OYPolymer: contour diameter must stay below 1/2");
    return ContourSpec::circle(cplx(0.0), s.contour_radius);
}

DetValue nystrom_det(const KernelFn& kernel, const ContourSpec& contour, int nodes,
                     int max_nodes, double tol) {
    DetValue dv;
    cplx prev = 0.0;
    bool have_prev = false;
    for (int m = nodes; m <= max_nodes; m *= 2) {
        QuadratureRule rule = discretize(contour, m);
        const long n = static_cast<long>(rule.nodes.size());
        MatC a(n, n);
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j)
                a(i, j) = kernel(rule.nodes[static_cast<size_t>(i)], rule.nodes[static_cast<size_t>(j)]) *
                          rule.weights[static_cast<size_t>(j)];
        cplx det = det_id_plus(a);
        dv.value = det;
        dv.nodes = m;
        if (have_prev) {
            dv.err = std::abs(det - prev);
            if (dv.err <= tol) return dv;
        }
        prev = det;
        have_prev = true;
    }
    return dv;
}

cplx series_det(const KernelFn& kernel, const ContourSpec& contour, int nodes, int n_max) {
    require(n_max >= 0 && n_max <= 5, "series_det: n_max <= 5");
    QuadratureRule rule = discretize(contour, nodes);
    const long m = static_cast<long>(rule.nodes.size());
    MatC k(m, m);
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
            k(i, j) = kernel(rule.nodes[static_cast<size_t>(i)], rule.nodes[static_cast<size_t>(j)]);
    cplx total = 1.0;
    std::vector<long> idx;
    double nfact = 1.0;
    for (int order = 1; order <= n_max; ++order) {
        nfact *= order;
        idx.assign(static_cast<size_t>(order), 0);
        cplx term = 0.0;
        MatC sub(order, order);
        while (true) {
            cplx wprod = 1.0;
            for (int a = 0; a < order; ++a) wprod *= rule.weights[static_cast<size_t>(idx[static_cast<size_t>(a)])];
            for (int a = 0; a < order; ++a)
                for (int b = 0; b < order; ++b)
                    sub(a, b) = k(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(b)]);
            term += sub.determinant() * wprod;
            int pos = order - 1;
            while (pos >= 0 && ++idx[static_cast<size_t>(pos)] == static_cast<long>(m)) {
                idx[static_cast<size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
        total += term / nfact;
    }
    return total;
}

cplx trace_term(const KernelFn& kernel, const ContourSpec& contour, int nodes) {
    QuadratureRule rule = discretize(contour, nodes);
    cplx tr = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        tr += kernel(rule.nodes[i], rule.nodes[i]) * rule.weights[i];
    return tr;
}

cplx eval_kernel_mb(const KernelSpec& spec, cplx zeta, cplx w, cplx w2) {
    ContourSpec contour = kernel_contour(spec);
    if (std::holds_alternative<OYPolymer>(spec)) {
        const auto& s = std::get<OYPolymer>(spec);
        QuadratureRule pair{{w, w2}, {cplx(1.0), cplx(1.0)}};
        MatC k = oy_kernel_matrix(zeta, s.n, s.t, pair, 1.0);
        return k(0, 1);
    }
    MbAssembly asmb = make_mb_assembly(spec, contour);
    QuadratureRule pair{{w, w2}, {cplx(1.0), cplx(1.0)}};
    MatC k = mb_kernel_matrix(asmb, zeta, pair, 1.0);
    return k(0, 1);
}

double mellin_barnes_sum_check(const std::function<cplx(cplx)>& f, cplx zeta, double q) {
    require(std::abs(zeta) < 1.0, "mellin_barnes_sum_check: |zeta| < 1");
    require(!(zeta.real() > 0 && std::abs(zeta.imag()) < 1e-14),
            "mellin_barnes_sum_check: zeta must avoid the positive real axis");
    cplx series = 0.0;
    cplx zn = 1.0;
    for (int n = 1; n < 4000; ++n) {
        zn *= zeta;
        cplx term = f(std::pow(q, n)) * zn;
        series += term;
        if (std::abs(term) < 1e-17 && n > 8) break;
    }
    TailSpec tail = zeta_tail(zeta, 0.5, 2.0);
    SPathRule spath = vertical_line_rule(0.5, tail, zeta_panel_width(zeta, q, 0.0));
    cplx integral = 0.0;
    cplx logmz = std::log(-zeta);
    for (size_t i = 0; i < spath.nodes.size(); ++i) {
        cplx s = spath.nodes[i];
        integral += std::exp(log_gamma_pair(s) + s * logmz) * f(std::exp(s * std::log(q))) *
                    spath.weights[i];
    }
    return std::abs(series - integral);
}

DetValue transform_via_mb(const KernelSpec& spec, cplx zeta, int nodes) {
    if (std::abs(zeta) == 0.0) return DetValue{1.0, 0.0, nodes};
    ContourSpec contour = kernel_contour(spec);
    DetValue dv;
    if (std::holds_alternative<OYPolymer>(spec)) {
        const auto& s = std::get<OYPolymer>(spec);
        QuadratureRule r1 = discretize(contour, nodes);
        QuadratureRule r2 = discretize(contour, 2 * nodes);
        cplx coarse = nystrom_det_of_matrix(oy_kernel_matrix(zeta, s.n, s.t, r1, 1.0), r1);
        cplx fine = nystrom_det_of_matrix(oy_kernel_matrix(zeta, s.n, s.t, r2, 1.5), r2);
        dv.value = fine;
        dv.err = std::abs(fine - coarse);
        dv.nodes = 2 * nodes;
        return dv;
    }
    MbAssembly asmb = make_mb_assembly(spec, contour);
    QuadratureRule r1 = discretize(contour, nodes);
    QuadratureRule r2 = discretize(contour, 2 * nodes);
    cplx coarse = nystrom_det_of_matrix(mb_kernel_matrix(asmb, zeta, r1, 1.0), r1);
    cplx fine = nystrom_det_of_matrix(mb_kernel_matrix(asmb, zeta, r2, 1.5), r2);
    dv.value = fine;
    dv.err = std::abs(fine - coarse);
    dv.nodes = 2 * nodes;
    return dv;
}

DetValue cauchy_det(const KernelSpec& spec, cplx zeta, int nodes) {
    ContourSpec contour = kernel_contour(spec);
    KernelFn kernel;
    if (const auto* s = std::get_if<QTasepCauchy>(&spec)) {
        QTasepCauchy sc = *s;
        kernel = [sc, zeta](cplx w, cplx w2) {
            return zeta * qtasep_cauchy_f(sc, w) / (sc.q * w2 - w);
        };
    } else if (const auto* s = std::get_if<AsepCauchy>(&spec)) {
        AsepCauchy sc = *s;
        double theta = spec_theta(sc.rho);
        kernel = [sc, theta, zeta](cplx w, cplx w2) {
            return -zeta * moments::asep_f2(sc.x, w, sc.t, sc.tau, theta) / (sc.tau * w - w2);
        };
    } else if (const auto* s = std::get_if<AsepTW>(&spec)) {
        AsepTW sc = *s;
        kernel = [sc, zeta](cplx xi, cplx xi2) { return -zeta * asep_tw_kernel(sc, xi, xi2); };
    } else {
        throw std::invalid_argument("cauchy_det: not a Cauchy-type kernel");
    }
    return nystrom_det(kernel, contour, nodes, 4 * nodes, 1e-10);
}

DetValue transform_via_cauchy(const KernelSpec& spec, cplx zeta, int nodes) {
    DetValue dv = cauchy_det(spec, zeta, nodes);
    double base = std::holds_alternative<QTasepCauchy>(spec)
                      ? std::get<QTasepCauchy>(spec).q
                      : (std::holds_alternative<AsepCauchy>(spec) ? std::get<AsepCauchy>(spec).tau
                                                                  : std::get<AsepTW>(spec).tau);
    cplx denom = qfunc::q_pochhammer_inf(zeta, base);
    dv.value /= denom;
    dv.err /= std::abs(denom);
    return dv;
}

DetValue oy_det(cplx u, long n, double t, int nodes, double contour_radius) {
    require(u.real() >= 0.0, "oy_det: Re u >= 0");
    if (std::abs(u) == 0.0) return DetValue{1.0, 0.0, nodes};
    OYPolymer spec{n, t, contour_radius};
    return transform_via_mb(KernelSpec{spec}, u, nodes);
}

}  // namespace qlab::fredholm
