#include "qlab/experiments.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qlab/asymptotics.hpp"
#include "qlab/duality.hpp"
#include "qlab/fredholm.hpp"
#include "qlab/markov.hpp"
#include "qlab/moments.hpp"
#include "qlab/polymer.hpp"
#include "qlab/qfunc.hpp"
#include "qlab/transform.hpp"

namespace qlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

double ExperimentConfig::get(const std::string& key, double fallback) const {
    auto it = num.find(key);
    return it == num.end() ? fallback : it->second;
}

std::vector<double> ExperimentConfig::get_vec(const std::string& key,
                                              std::vector<double> fallback) const {
    auto it = vec.find(key);
    return it == vec.end() ? fallback : it->second;
}

namespace {

const std::vector<std::string> kKinds = {"simulate",       "moment",  "duality-check",
                                         "det-scan",       "invert",  "tw-convergence",
                                         "polymer",        "identity-suite"};

void validate(const ExperimentConfig& c) {
    if (std::find(kKinds.begin(), kKinds.end(), c.kind) == kKinds.end())
        throw std::invalid_argument("config.kind: unknown experiment kind '" + c.kind + "'");
    if (c.format != "csv" && c.format != "json" && c.format != "plot")
        throw std::invalid_argument("config.format: must be csv, json or plot");
    auto in_range = [&](const std::string& key, double lo, double hi) {
        auto it = c.num.find(key);
        if (it != c.num.end() && (it->second < lo || it->second > hi))
            throw std::invalid_argument("config.params." + key + ": out of range");
    };
    in_range("q", 0.0, 0.999999);
    in_range("tau", 1e-9, 0.999999);
    in_range("rho", 0.05, 1.0);
    in_range("alpha", 0.0, 0.999999);
    in_range("t", 0.0, 1e9);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    ExperimentConfig c;
    if (!j.contains("kind") || !j["kind"].is_string())
        throw std::invalid_argument("config.kind: required string field");
    c.kind = j["kind"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
    if (j.contains("params")) {
        if (!j["params"].is_object())
            throw std::invalid_argument("config.params: must be an object");
        for (auto& [key, val] : j["params"].items()) {
            if (val.is_number()) {
                c.num[key] = val.get<double>();
            } else if (val.is_string()) {
                c.str[key] = val.get<std::string>();
            } else if (val.is_array()) {
                std::vector<double> v;
                for (auto& e : val) {
                    if (!e.is_number())
                        throw std::invalid_argument("config.params." + key + ": numeric array expected");
                    v.push_back(e.get<double>());
                }
                c.vec[key] = v;
            } else {
                throw std::invalid_argument("config.params." + key + ": unsupported value type");
            }
        }
    }
    validate(c);
    return c;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void atomic_write(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
    }
    fs::rename(tmp, p);
}

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Report moment_experiment(const ExperimentConfig& c) {
    Report r;
    r.columns = {"k", "n_or_x", "t", "param_q_or_tau", "param_alpha_or_rho", "re", "im", "err"};
    std::string system = c.str.count("system") ? c.str.at("system") : "qtasep";
    double t = c.get("t", 1.0);
    if (system == "qtasep") {
        double q = c.get("q", 0.5);
        double alpha = c.get("alpha", 0.0);
        std::vector<double> nv = c.get_vec("nvec", {1});
        std::vector<long> nvec(nv.begin(), nv.end());
        std::vector<double> a = c.get_vec("a", {});
        auto mv = moments::qtasep_moment(nvec, t, q, a, alpha);
        r.rows.push_back({static_cast<double>(nvec.size()), static_cast<double>(nvec[0]), t, q,
                          alpha, mv.value.real(), mv.value.imag(), mv.err});
    } else if (system == "asep") {
        double tau = c.get("tau", 0.4);
        double rho = c.get("rho", 1.0);
        int n = static_cast<int>(c.get("n", 1));
        long x = static_cast<long>(c.get("x", 0));
        auto mv = moments::asep_moment(n, x, t, tau, rho);
        r.rows.push_back({static_cast<double>(n), static_cast<double>(x), t, tau, rho,
                          mv.value.real(), mv.value.imag(), mv.err});
    } else {
        throw std::invalid_argument("config.params.system: expected qtasep or asep");
    }
    r.summary = "moment evaluated";
    return r;
}

Report det_scan_experiment(const ExperimentConfig& c) {
    Report r;
    r.columns = {"zeta_re", "zeta_im", "det_re", "det_im", "err", "M"};
    std::string kernel = c.str.count("kernel") ? c.str.at("kernel") : "asep-mb";
    std::vector<double> zre = c.get_vec("zeta_re", {-0.4});
    std::vector<double> zim = c.get_vec("zeta_im", std::vector<double>(zre.size(), 0.0));
    if (zim.size() != zre.size())
        throw std::invalid_argument("config.params.zeta_im: length mismatch with zeta_re");
    int nodes = static_cast<int>(c.get("nodes", 32));
    for (size_t i = 0; i < zre.size(); ++i) {
        cplx zeta(zre[i], zim[i]);
        fredholm::DetValue dv;
        if (kernel == "qtasep-mb") {
            fredholm::QTasepMB spec{static_cast<long>(c.get("n", 1)), c.get("t", 1.0),
                                    c.get("q", 0.5), c.get_vec("a", {})};
            dv = fredholm::transform_via_mb(spec, zeta, nodes);
        } else if (kernel == "qtasep-cauchy") {
            fredholm::QTasepCauchy spec{static_cast<long>(c.get("n", 1)), c.get("t", 1.0),
                                        c.get("q", 0.5), c.get_vec("a", {})};
            dv = fredholm::transform_via_cauchy(spec, zeta, nodes);
        } else if (kernel == "asep-mb") {
            fredholm::AsepMB spec{static_cast<long>(c.get("x", 0)), c.get("t", 1.0),
                                  c.get("tau", 0.4), c.get("rho", 1.0)};
            dv = fredholm::transform_via_mb(spec, zeta, nodes);
        } else if (kernel == "asep-cauchy") {
            fredholm::AsepCauchy spec{static_cast<long>(c.get("x", 0)), c.get("t", 1.0),
                                      c.get("tau", 0.4), c.get("rho", 1.0)};
            dv = fredholm::transform_via_cauchy(spec, zeta, nodes);
        } else if (kernel == "asep-tw") {
            fredholm::AsepTW spec{static_cast<long>(c.get("x", 0)), c.get("t", 1.0),
                                  c.get("tau", 0.4), c.get("rho", 1.0)};
            dv = fredholm::transform_via_cauchy(spec, zeta, nodes);
        } else {
            throw std::invalid_argument("config.params.kernel: unknown kernel name");
        }
        r.rows.push_back({zeta.real(), zeta.imag(), dv.value.real(), dv.value.imag(), dv.err,
                          static_cast<double>(dv.nodes)});
    }
    r.summary = "determinant scan";
    return r;
}

Report invert_experiment(const ExperimentConfig& c) {
    Report r;
    r.columns = {"m", "probability"};
    std::string system = c.str.count("system") ? c.str.at("system") : "asep";
    transform::Pmf pmf;
    if (system == "asep") {
        pmf = transform::recover_pmf_asep(static_cast<long>(c.get("x", 0)), c.get("t", 1.0),
                                          c.get("tau", 0.4), c.get("rho", 1.0),
                                          static_cast<long>(c.get("m_max", 6)));
    } else if (system == "qtasep") {
        pmf = transform::recover_pmf_qtasep(static_cast<long>(c.get("n", 1)), c.get("t", 1.0),
                                            c.get("q", 0.5), c.get_vec("a", {}),
                                            static_cast<long>(c.get("m_count", 10)));
    } else {
        throw std::invalid_argument("config.params.system: expected qtasep or asep");
    }
    for (size_t i = 0; i < pmf.p.size(); ++i)
        r.rows.push_back({static_cast<double>(pmf.m_min + static_cast<long>(i)), pmf.p[i]});
    double defect = std::abs(pmf.total() - 1.0);
    r.header.emplace_back("normalization_defect", fmt17(defect));
    r.tolerance_ok = defect < c.get("normalization_tol", 1e-4);
    r.summary = "pmf recovered, normalization defect " + fmt17(defect);
    return r;
}

Report tw_experiment(const ExperimentConfig& c) {
    Report r;
    r.columns = {"t", "r", "det", "fgue", "gap"};
    asymptotics::TwQuery q;
    q.r = c.get("r", 0.0);
    q.tau = c.get("tau", 0.4);
    q.t_ladder = c.get_vec("t_ladder", {50.0, 100.0, 200.0});
    auto pts = asymptotics::asep_tw_convergence(q);
    for (const auto& p : pts) r.rows.push_back({p.t, q.r, p.det, p.fgue, p.gap});
    bool decreasing = true;
    for (size_t i = 1; i < pts.size(); ++i)
        if (pts[i].gap >= pts[i - 1].gap) decreasing = false;
    r.tolerance_ok = decreasing;
    r.summary = decreasing ? "gap decreasing along the t ladder" : "gap not monotone";
    return r;
}

Report polymer_experiment(const ExperimentConfig& c) {
    Report r;
    std::string what = c.str.count("observable") ? c.str.at("observable") : "moment";
    if (what == "moment") {
        r.columns = {"k", "n", "t", "c", "re", "im", "err"};
        std::vector<double> nv = c.get_vec("nvec", {1});
        std::vector<long> nvec(nv.begin(), nv.end());
        auto mv = polymer::she_moment(nvec, c.get("t", 0.5), c.get("c", 1.0));
        r.rows.push_back({static_cast<double>(nvec.size()), static_cast<double>(nvec[0]),
                          c.get("t", 0.5), c.get("c", 1.0), mv.value.real(), mv.value.imag(),
                          mv.err});
    } else if (what == "laplace") {
        r.columns = {"u_re", "u_im", "det_re", "det_im"};
        cplx u(c.get("u_re", 1.0), c.get("u_im", 0.0));
        cplx det = polymer::oy_laplace_det(u, static_cast<long>(c.get("n", 1)), c.get("t", 0.5));
        r.rows.push_back({u.real(), u.imag(), det.real(), det.imag()});
    } else if (what == "scaling") {
        r.columns = {"epsilon", "mean_z", "std_error", "limit", "gap"};
        auto pts = polymer::scaling_map_diagnostic(c.get_vec("eps_ladder", {0.2, 0.1, 0.05}),
                                                   c.get("t", 0.5),
                                                   static_cast<long>(c.get("trajectories", 20000)),
                                                   c.seed);
        for (const auto& p : pts)
            r.rows.push_back({p.epsilon, p.mean_z, p.std_error, p.limit, p.gap});
    } else {
        throw std::invalid_argument("config.params.observable: expected moment|laplace|scaling");
    }
    r.summary = "polymer " + what;
    return r;
}

Report duality_experiment(const ExperimentConfig& c) {
    Report r;
    r.columns = {"mc_mean", "mc_se", "dual_value", "diff", "truncation_bound", "pass"};
    std::string system = c.str.count("system") ? c.str.at("system") : "qtasep";
    double t = c.get("t", 0.5);
    long traj = static_cast<long>(c.get("trajectories", 20000));
    duality::DualityCheckResult res;
    if (system == "qtasep") {
        markov::RateParams rates;
        rates.q = c.get("q", 0.5);
        long n = static_cast<long>(c.get("n", 3));
        markov::ParticleConfig x0;
        for (long i = 1; i <= n; ++i) x0.positions.push_back(-i);
        std::vector<double> yv = c.get_vec("y", {0, 1, 1});
        markov::ZrpConfig y0;
        y0.counts.assign(yv.begin(), yv.end());
        y0.counts.resize(static_cast<size_t>(n) + 1, 0);
        res = duality::check_duality_dynamic_qtasep(x0, y0, rates, t, traj, c.seed);
    } else if (system == "asep") {
        markov::RateParams rates = markov::RateParams::asep(c.get("tau", 0.4));
        std::vector<double> xv = c.get_vec("x", {1});
        std::vector<long> xs(xv.begin(), xv.end());
        if (xs.empty()) throw std::invalid_argument("config.params.x: nonempty list required");
        long pad = markov::asep_window_pad(t);
        qlab::Rng rng(c.seed, 12345);
        markov::OccupancyConfig eta0 = markov::init_asep(
            markov::InitialData::step(), xs.front() - pad, xs.back() + pad, rng);
        res = duality::check_duality_dynamic_asep(eta0, xs, rates, t, traj, c.seed);
    } else {
        throw std::invalid_argument("config.params.system: expected qtasep or asep");
    }
    r.rows.push_back({res.mc_mean, res.mc_se, res.dual_value, res.diff(), res.truncation_bound,
                      res.pass() ? 1.0 : 0.0});
    r.tolerance_ok = res.pass();
    r.summary = r.tolerance_ok ? "duality check within 3 SE" : "duality check failed";
    return r;
}

Report simulate_experiment(const ExperimentConfig& c) {
    Report r;
    r.columns = {"events", "final_state_hash_low"};
    std::string system = c.str.count("system") ? c.str.at("system") : "qtasep";
    double t = c.get("t", 1.0);
    qlab::Rng rng(c.seed, 0);
    markov::EventLog log;
    std::uint64_t final_hash = 0;
    if (system == "qtasep") {
        markov::RateParams rates;
        rates.q = c.get("q", 0.5);
        long n = static_cast<long>(c.get("n", 10));
        auto x0 = markov::init_qtasep(n, markov::InitialData::step(), rates, rng);
        auto xt = markov::simulate_qtasep(x0, rates, t, rng, &log);
        final_hash = markov::state_hash(xt.positions);
    } else if (system == "tazrp") {
        markov::RateParams rates;
        rates.q = c.get("q", 0.5);
        long n = static_cast<long>(c.get("n", 5));
        markov::ZrpConfig y0;
        y0.counts.assign(static_cast<size_t>(n) + 1, 0);
        y0.counts.back() = static_cast<long>(c.get("k", 3));
        auto yt = markov::simulate_tazrp(y0, rates, t, rng, &log);
        final_hash = markov::state_hash(yt.counts);
    } else if (system == "asep") {
        markov::RateParams rates = markov::RateParams::asep(c.get("tau", 0.4));
        markov::InitialData init = markov::InitialData::step_bernoulli(c.get("rho", 1.0));
        long pad = markov::asep_window_pad(t);
        auto eta0 = markov::init_asep(init, -pad, pad, rng);
        auto etat = markov::simulate_asep(eta0, rates, t, rng, &log);
        std::vector<long> st(etat.occ.begin(), etat.occ.end());
        final_hash = markov::state_hash(st);
    } else {
        throw std::invalid_argument("config.params.system: expected qtasep|tazrp|asep");
    }
    // event dump with exact hashes
    std::ostringstream os;
    os << "# seed=" << c.seed << "\n";
    os << "time,event_site,state_hash\n";
    for (const auto& e : log) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%" PRIu64, e.state_hash);
        os << fmt17(e.time) << "," << e.site << "," << buf << "\n";
    }
    atomic_write((fs::path(c.out_dir) / "trajectory.csv").string(), os.str());
    r.rows.push_back({static_cast<double>(log.size()),
                      static_cast<double>(final_hash & 0xffffffffULL)});
    r.summary = "trajectory written to trajectory.csv";
    return r;
}

Report identity_suite_experiment(const ExperimentConfig& c) {
    Report r;
    r.columns = {"check_id", "residual", "tolerance", "pass"};
    qlab::Rng rng(c.seed, 7);
    bool all_ok = true;
    auto push = [&](int id, double residual, double tol) {
        bool ok = residual < tol;
        all_ok = all_ok && ok;
        r.rows.push_back({static_cast<double>(id), residual, tol, ok ? 1.0 : 0.0});
    };
    // 1: q-TASEP generator duality on random states
    {
        double worst = 0.0;
        for (int rep = 0; rep < 50; ++rep) {
            markov::RateParams rates;
            rates.q = 0.2 + 0.6 * rng.uniform01();
            long n = 2 + static_cast<long>(rng.below(4));
            markov::ParticleConfig x;
            long pos = 2 - static_cast<long>(rng.below(4));
            for (long i = 0; i < n; ++i) {
                x.positions.push_back(pos);
                pos -= 1 + static_cast<long>(rng.below(2));
                rates.a.push_back(0.5 + 1.5 * rng.uniform01());
            }
            markov::ZrpConfig y;
            y.counts.assign(static_cast<size_t>(n) + 1, 0);
            long k = 1 + static_cast<long>(rng.below(4));
            for (long j = 0; j < k; ++j) y.counts[rng.below(static_cast<std::uint64_t>(n)) + 1]++;
            worst = std::max(worst, duality::residual_qtasep_duality(x, y, rates));
        }
        push(1, worst, 1e-12);
    }
    // 2: exclusion generator duality, both pairings
    {
        double worst = 0.0;
        for (int rep = 0; rep < 50; ++rep) {
            markov::RateParams rates = markov::RateParams::asep(0.1 + 0.8 * rng.uniform01());
            markov::OccupancyConfig eta;
            eta.left = -6;
            eta.occ.assign(14, 0);
            eta.right_full = false;
            for (size_t i = 1; i + 1 < eta.occ.size(); ++i) eta.occ[i] = rng.bernoulli(0.5);
            std::vector<long> xs;
            long x = -4 + static_cast<long>(rng.below(3));
            long kk = 1 + static_cast<long>(rng.below(3));
            for (long j = 0; j < kk; ++j) {
                xs.push_back(x);
                x += 1 + static_cast<long>(rng.below(3));
            }
            markov::RateParams general = rates;
            general.bond_left = -8;
            for (int b = 0; b < 20; ++b) general.bond_a.push_back(0.5 + 1.5 * rng.uniform01());
            worst = std::max(worst, duality::residual_asep_duality_tilde(eta, xs, general));
            worst = std::max(worst, duality::residual_asep_duality_H(eta, xs, rates));
        }
        push(2, worst, 1e-12);
    }
    // 3: q-binomial theorem
    {
        double q = 0.5, a = 0.3, x = 0.4;
        cplx lhs = 0.0;
        for (int k = 0; k <= 60; ++k)
            lhs += qfunc::q_pochhammer(a, q, k) / qfunc::q_pochhammer(q, q, k).real() *
                   std::pow(x, k);
        cplx rhs = qfunc::q_pochhammer_inf(a * x, q) / qfunc::q_pochhammer_inf(x, q);
        push(3, std::abs(lhs - rhs), 1e-10);
    }
    // 4: symmetrization identities
    {
        std::vector<cplx> z;
        for (int i = 0; i < 3; ++i)
            z.push_back(cplx(2.0, 0.0) + 0.5 * std::exp(cplx(0, 2.0 * PI * (i + 0.13) / 3)));
        auto [r1, r2] = qfunc::check_symmetrization(z, 0.4);
        push(4, std::max(r1, r2), 1e-10);
    }
    r.tolerance_ok = all_ok;
    r.summary = all_ok ? "identity suite passed" : "identity suite failed";
    return r;
}

}  // namespace

Report run_experiment(const ExperimentConfig& config) {
    Report r;
    if (config.kind == "moment") {
        r = moment_experiment(config);
    } else if (config.kind == "det-scan") {
        r = det_scan_experiment(config);
    } else if (config.kind == "invert") {
        r = invert_experiment(config);
    } else if (config.kind == "tw-convergence") {
        r = tw_experiment(config);
    } else if (config.kind == "polymer") {
        r = polymer_experiment(config);
    } else if (config.kind == "duality-check") {
        r = duality_experiment(config);
    } else if (config.kind == "simulate") {
        r = simulate_experiment(config);
    } else if (config.kind == "identity-suite") {
        r = identity_suite_experiment(config);
    } else {
        throw std::invalid_argument("config.kind: unknown experiment kind");
    }
    r.header.emplace_back("seed", std::to_string(config.seed));
    r.header.emplace_back("kind", config.kind);
    r.header.emplace_back("version", "qlab-1.0");
    emit_report(r, config, config.kind);
    return r;
}

std::string render_report(const Report& report, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        json j;
        for (const auto& [k, v] : report.header) j["header"][k] = v;
        j["columns"] = report.columns;
        j["rows"] = report.rows;
        j["tolerance_ok"] = report.tolerance_ok;
        j["summary"] = report.summary;
        os << j.dump(2) << "\n";
        return os.str();
    }
    const char* sep = format == "plot" ? " " : ",";
    for (const auto& [k, v] : report.header) os << "# " << k << "=" << v << "\n";
    for (size_t i = 0; i < report.columns.size(); ++i)
        os << (i ? sep : (format == "plot" ? "# " : "")) << report.columns[i];
    os << "\n";
    for (const auto& row : report.rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? sep : "") << fmt17(row[i]);
        os << "\n";
    }
    return os.str();
}

void emit_report(const Report& report, const ExperimentConfig& config,
                 const std::string& filename_stem) {
    std::string ext = config.format == "json" ? ".json" : (config.format == "plot" ? ".dat" : ".csv");
    fs::path out = fs::path(config.out_dir) / (filename_stem + ext);
    atomic_write(out.string(), render_report(report, config.format));
}

}  // namespace qlab::cli
