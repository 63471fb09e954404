#include "qlab/contours.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qlab::moments {

namespace {
constexpr double kNodePhase = 0.37;  // keeps nodes off the real axis

double dist(cplx a, cplx b) { return std::abs(a - b); }

void fail(const std::string& what) { throw ContourInfeasibleError(what); }

// Distance from the curve of circle (cs, rs) to the region of circle (ca, ra):
// negative when the curve enters the region.
double curve_to_region_clearance(cplx cs, double rs, cplx ca, double ra) {
    return std::abs(dist(cs, ca) - rs) - ra;
}
}  // namespace

bool ContourSpec::contains(cplx p) const {
    for (const Circle& c : components)
        if (dist(p, c.center) < c.radius) return true;
    return false;
}

double ContourSpec::clearance(cplx p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Circle& c : components)
        best = std::min(best, std::abs(dist(p, c.center) - c.radius));
    return best;
}

QuadratureRule discretize(const ContourSpec& contour, int m) {
    require(m >= 8, "discretize: need at least 8 nodes per component");
    QuadratureRule rule;
    rule.nodes.reserve(contour.components.size() * static_cast<size_t>(m));
    rule.weights.reserve(rule.nodes.capacity());
    for (const Circle& c : contour.components) {
        for (int j = 0; j < m; ++j) {
            double theta = kNodePhase + 2.0 * PI * j / m;
            cplx e = std::exp(cplx(0, theta));
            rule.nodes.push_back(c.center + c.radius * e);
            // (1/2 pi i) * i R e^{i theta} dtheta, dtheta = 2 pi / m
            rule.weights.push_back(c.radius * e / static_cast<double>(m));
        }
    }
    return rule;
}

namespace {

// One tensor-product pass at m nodes/component; also accumulates the embedded
// m/2 sub-rule (even node indices) for the error estimate.
template <typename EvalTuple>
std::pair<cplx, cplx> tensor_pass(const std::vector<QuadratureRule>& rules,
                                  int m, const EvalTuple& eval) {
    const int k = static_cast<int>(rules.size());
    std::vector<size_t> idx(static_cast<size_t>(k), 0);
    std::vector<cplx> z(static_cast<size_t>(k));
    const double sub_scale = std::pow(2.0, k);
    cplx full = 0.0, sub = 0.0;
    const size_t total = [&] {
        size_t t = 1;
        for (const auto& r : rules) t *= r.nodes.size();
        return t;
    }();
    for (size_t step = 0; step < total; ++step) {
        bool all_even = true;
        cplx w = 1.0;
        for (int j = 0; j < k; ++j) {
            const auto& r = rules[static_cast<size_t>(j)];
            size_t i = idx[static_cast<size_t>(j)];
            z[static_cast<size_t>(j)] = r.nodes[i];
            w *= r.weights[i];
            if ((i % static_cast<size_t>(m)) % 2 != 0) all_even = false;
        }
        cplx fw = eval(z) * w;
        full += fw;
        if (all_even) sub += fw;
        // odometer
        for (int j = k - 1; j >= 0; --j) {
            if (++idx[static_cast<size_t>(j)] < rules[static_cast<size_t>(j)].nodes.size()) break;
            idx[static_cast<size_t>(j)] = 0;
        }
    }
    return {full, sub * sub_scale};
}

}  // namespace

MomentValue nested_quadrature(const std::function<cplx(std::span<const cplx>)>& integrand,
                              const std::vector<ContourSpec>& contours,
                              QuadratureOptions opts) {
    require(!contours.empty() && contours.size() <= 4, "nested_quadrature: 1 <= k <= 4");
    MomentValue mv;
    for (int m = opts.initial_nodes; m <= opts.max_nodes; m *= 2) {
        std::vector<QuadratureRule> rules;
        rules.reserve(contours.size());
        for (const auto& c : contours) rules.push_back(discretize(c, m));
        auto [full, sub] = tensor_pass(rules, m, [&](const std::vector<cplx>& z) {
            return integrand(std::span<const cplx>(z.data(), z.size()));
        });
        mv.value = full;
        mv.err = std::abs(full - sub);
        mv.nodes = m;
        if (mv.err <= opts.tol) return mv;
    }
    if (opts.strict) {
        std::ostringstream os;
        os << "nested_quadrature: error estimate " << mv.err << " above tolerance "
           << opts.tol << " at " << mv.nodes << " nodes";
        throw NonConvergenceError(os.str());
    }
    return mv;
}

MomentValue nested_vandermonde_quadrature(const std::vector<std::function<cplx(cplx)>>& factors,
                                          double ratio_base,
                                          const std::vector<ContourSpec>& contours,
                                          QuadratureOptions opts) {
    const int k = static_cast<int>(contours.size());
    require(k >= 1 && k <= 4, "nested_vandermonde_quadrature: 1 <= k <= 4");
    require(factors.size() == contours.size(), "one factor function per contour");
    MomentValue mv;
    for (int m = opts.initial_nodes; m <= opts.max_nodes; m *= 2) {
        std::vector<QuadratureRule> rules;
        rules.reserve(contours.size());
        for (const auto& c : contours) rules.push_back(discretize(c, m));
        // Fold the factor values into the weights once per refinement level.
        for (int j = 0; j < k; ++j) {
            auto& r = rules[static_cast<size_t>(j)];
            for (size_t i = 0; i < r.nodes.size(); ++i)
                r.weights[i] *= factors[static_cast<size_t>(j)](r.nodes[i]);
        }
        auto [full, sub] = tensor_pass(rules, m, [&](const std::vector<cplx>& z) {
            cplx cross = 1.0;
            for (int a = 0; a < k; ++a)
                for (int b = a + 1; b < k; ++b)
                    cross *= (z[static_cast<size_t>(a)] - z[static_cast<size_t>(b)]) /
                             (z[static_cast<size_t>(a)] - ratio_base * z[static_cast<size_t>(b)]);
            return cross;
        });
        mv.value = full;
        mv.err = std::abs(full - sub);
        mv.nodes = m;
        if (mv.err <= opts.tol) return mv;
    }
    if (opts.strict) {
        std::ostringstream os;
        os << "nested_vandermonde_quadrature: error estimate " << mv.err
           << " above tolerance " << opts.tol << " at " << mv.nodes << " nodes";
        throw NonConvergenceError(os.str());
    }
    return mv;
}

void validate_nested_family(const std::vector<ContourSpec>& nested, double ratio_base,
                            ScaledRelation relation,
                            const std::vector<cplx>& must_contain,
                            const std::vector<cplx>& must_exclude, double min_clearance) {
    auto check = [&](bool cond, const std::string& what) {
        if (!cond) fail("contour validation failed: " + what);
    };
    for (size_t a = 0; a < nested.size(); ++a) {
        const auto& ca = nested[a];
        check(!ca.components.empty(), "empty contour");
        for (const auto& c : ca.components) check(c.radius > 0, "nonpositive radius");
        // components pairwise disjoint
        for (size_t i = 0; i < ca.components.size(); ++i)
            for (size_t j = i + 1; j < ca.components.size(); ++j) {
                const auto &ci = ca.components[i], &cj = ca.components[j];
                check(dist(ci.center, cj.center) > ci.radius + cj.radius + min_clearance,
                      "overlapping union components");
            }
        for (cplx p : must_contain)
            check(ca.contains(p) && ca.clearance(p) > min_clearance, "required point not enclosed");
        for (cplx p : must_exclude)
            check(!ca.contains(p) && ca.clearance(p) > min_clearance, "excluded point enclosed");
        for (size_t b = a + 1; b < nested.size(); ++b) {
            for (const auto& cb : nested[b].components) {
                cplx sc = ratio_base * cb.center;
                double sr = std::abs(ratio_base) * cb.radius;
                if (relation == ScaledRelation::Contain) {
                    bool inside_some = false;
                    for (const auto& c : ca.components)
                        if (dist(sc, c.center) + sr < c.radius - min_clearance) inside_some = true;
                    check(inside_some, "scaled successor disk not strictly contained");
                } else {
                    // Points of the scaled successor curve must stay out of the
                    // enclosed region (the scaled curve may legitimately surround
                    // a smaller component from outside).
                    for (const auto& c : ca.components)
                        check(curve_to_region_clearance(sc, sr, c.center, c.radius) > min_clearance,
                              "scaled successor curve enters the enclosed region");
                }
            }
        }
    }
}

std::vector<ContourSpec> build_qtasep_nested_contours(int k, double q,
                                                      const std::vector<double>& a,
                                                      QTasepContourConfig cfg) {
    require(k >= 1, "build_qtasep_nested_contours: k >= 1");
    require(q > 0 && q < 1, "build_qtasep_nested_contours: 0 < q < 1");
    double spread = 0.0;
    for (double am : a) spread = std::max(spread, std::abs(am - 1.0));
    double r_inner = std::max(cfg.inner_radius_floor, 2.0 * spread);
    if (r_inner >= 0.9) fail("jump rates too spread out for circles centered at 1");

    std::vector<double> radii(static_cast<size_t>(k));
    radii[static_cast<size_t>(k - 1)] = r_inner;
    if (k > 1) {
        // Radial budget between the forced minimal outer radius and 1; part of
        // it buys the nesting margins, the rest keeps the outer circle off 0.
        double budget = std::pow(q, k - 1) * (1.0 - r_inner);
        double geom = (1.0 - std::pow(q, k - 1)) / (1.0 - q);
        double margin = cfg.margin_fraction * budget / geom;
        for (int j = k - 2; j >= 0; --j)
            radii[static_cast<size_t>(j)] = (1.0 - q) + q * radii[static_cast<size_t>(j + 1)] + margin;
    }
    std::vector<ContourSpec> out;
    out.reserve(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) out.push_back(ContourSpec::circle(1.0, radii[static_cast<size_t>(j)]));

    std::vector<cplx> contain;
    for (double am : a) contain.emplace_back(am, 0.0);
    contain.emplace_back(1.0, 0.0);
    validate_nested_family(out, q, ScaledRelation::Contain, contain, {cplx(0.0)}, cfg.min_clearance);
    return out;
}

std::vector<ContourSpec> build_qtasep_halfstat_contours(int k, double q,
                                                        const std::vector<double>& a,
                                                        double alpha,
                                                        QTasepContourConfig cfg) {
    require(k >= 1 && q > 0 && q < 1 && alpha > 0, "build_qtasep_halfstat_contours: bad arguments");
    double amin = 1.0, amax = 1.0;
    for (double am : a) {
        amin = std::min(amin, am);
        amax = std::max(amax, am);
    }
    if (!(alpha * std::pow(q, -k) < amin))
        fail("half-stationary feasibility requires alpha q^{-k} < min a_m");
    double c0 = 0.5 * (amin + amax);
    double spread = std::max(amax - c0, c0 - amin);

    std::vector<cplx> excl;
    for (int j = 1; j <= k; ++j) excl.emplace_back(alpha * std::pow(q, -j), 0.0);

    // rho_m = rho_0 * g^m with g slightly above q so each circle contains the
    // q-image of its successor level; caps come from the exclusion points and
    // the gaps between consecutive circle centers.
    double g = q * cfg.union_growth;
    double rho0 = std::numeric_limits<double>::infinity();
    for (int m = 0; m < k; ++m) {
        double cm = std::pow(q, m) * c0;
        double cap = 0.45 * std::pow(q, m) * c0 * (1.0 - q);  // stay clear of neighbor levels
        for (cplx p : excl) cap = std::min(cap, 0.55 * std::abs(cplx(cm) - p));
        if (m == 0) cap = std::max(cap, 0.0);
        rho0 = std::min(rho0, cap / std::pow(g, m));
    }
    if (!(rho0 > spread * 1.5 + 1e-6))
        fail("half-stationary contours infeasible: alpha/q^j too close to the a-cluster");

    std::vector<ContourSpec> out(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) {
        // z_{j+1} carries levels m = 0..k-1-j.
        for (int m = 0; m <= k - 1 - j; ++m)
            out[static_cast<size_t>(j)].components.push_back(
                Circle{std::pow(q, m) * c0, rho0 * std::pow(g, m)});
    }
    std::vector<cplx> contain;
    for (double am : a) contain.emplace_back(am, 0.0);
    validate_nested_family(out, q, ScaledRelation::Contain, contain, excl, cfg.min_clearance);
    return out;
}

ContourSpec build_c_minus_tau(double tau, double theta, AsepContourConfig cfg) {
    require(tau > 0 && tau < 1, "build_c_minus_tau: 0 < tau < 1");
    double lim = std::min(1.0 - tau, tau * (1.0 - tau) / (1.0 + tau) * (cfg.minus_tau_shrink / 2.0));
    if (std::isfinite(theta)) lim = std::min(lim, std::abs(tau * theta + tau));
    double r = lim / cfg.minus_tau_shrink;
    ContourSpec c = ContourSpec::circle(cplx(-tau), r);
    std::vector<cplx> excl{cplx(-1.0)};
    if (std::isfinite(theta)) excl.emplace_back(tau * theta, 0.0);
    validate_nested_family({c, c}, tau, ScaledRelation::Exclude, {cplx(-tau)}, excl,
                           cfg.min_clearance);
    return c;
}

std::vector<ContourSpec> build_asep_nested_contours(int k, double tau, double theta,
                                                    AsepContourConfig cfg) {
    require(k >= 1 && tau > 0 && tau < 1, "build_asep_nested_contours: bad arguments");
    ContourSpec cm = build_c_minus_tau(tau, theta, cfg);
    double r_minus = cm.components[0].radius;
    double r = (1.0 + cfg.growth_delta) / tau;

    double big_cap = std::min({1.0, tau * tau - tau * r_minus, tau - 1.05 * r_minus});
    if (std::isfinite(theta)) big_cap = std::min(big_cap, tau * theta);
    big_cap *= cfg.safety;
    if (big_cap <= 0) fail("asep contours infeasible for this (tau, theta)");
    double r0 = big_cap / std::pow(r, k);

    std::vector<ContourSpec> out(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) {
        out[static_cast<size_t>(j)].components.push_back(Circle{cplx(0.0), r0 * std::pow(r, j + 1)});
        out[static_cast<size_t>(j)].components.push_back(cm.components[0]);
    }
    std::vector<cplx> contain{cplx(0.0), cplx(-tau)};
    std::vector<cplx> excl{cplx(-1.0)};
    if (std::isfinite(theta)) excl.emplace_back(tau * theta, 0.0);
    validate_nested_family(out, tau, ScaledRelation::Exclude, contain, excl, cfg.min_clearance);
    return out;
}

ContourSpec build_asep_mb_contour(double tau, double theta) {
    double m = 1.0 - tau;
    if (std::isfinite(theta)) m = std::min(m, tau * theta);
    // max |w| over the circle must stay below sqrt(tau), so every dilation
    // tau^s w (Re s >= 1/2) keeps its distance from the essential singularity
    // at -tau; otherwise the inner-integral ratio is unbounded.
    double r_kernel = 0.88 * std::sqrt(tau) - tau / 2.0;
    double r = std::min(tau / 2.0 + m / 2.0, r_kernel);
    if (!(r > tau / 2.0 * 1.02))
        fail("asep MB contour infeasible: tau too large for the dilation-safe circle");
    ContourSpec c = ContourSpec::circle(cplx(-tau / 2.0), r);
    std::vector<cplx> excl{cplx(-1.0)};
    if (std::isfinite(theta)) excl.emplace_back(tau * theta, 0.0);
    validate_nested_family({c}, tau, ScaledRelation::Exclude, {cplx(0.0), cplx(-tau)}, excl, 1e-3);
    return c;
}

ContourSpec build_qtasep_star_contour(const std::vector<double>& a) {
    double amax = 0.0;
    for (double am : a) amax = std::max(amax, am);
    return ContourSpec::circle(cplx(0.0), std::max(1.5, 1.3 * amax));
}

ContourSpec build_qtasep_mb_contour(const std::vector<double>& a, double q, double delta) {
    require(delta > 0 && delta < 1, "build_qtasep_mb_contour: 0 < delta < 1");
    double dmax = (1.0 - std::pow(q, delta)) / (1.0 + std::pow(q, delta));
    double spread = 0.0;
    for (double am : a) spread = std::max(spread, std::abs(am - 1.0));
    double d = std::clamp(2.0 * spread + 0.1, 0.15, 0.85 * dmax);
    if (!(spread < d - 1e-3) || !(d < dmax))
        fail("qtasep MB contour infeasible: |a_m - 1| too large for (q, delta)");
    std::vector<cplx> contain;
    for (double am : a) contain.emplace_back(am, 0.0);
    ContourSpec c = ContourSpec::circle(cplx(1.0), d);
    validate_nested_family({c}, q, ScaledRelation::Contain, contain, {cplx(0.0)}, 1e-3);
    return c;
}

}  // namespace qlab::moments
