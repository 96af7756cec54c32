#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "standout/abtest.hpp"
#include "standout/config.hpp"
#include "standout/depthlaw.hpp"
#include "standout/errors.hpp"
#include "standout/firststop.hpp"
#include "standout/likelihood.hpp"
#include "standout/policy.hpp"
#include "standout/survival.hpp"

namespace standout::cli {

using nlohmann::json;

int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* cap = std::getenv("STANDOUT_THREADS")) {
        const int c = std::atoi(cap);
        if (c >= 1) n = c;
    }
    return n;
}

namespace {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct Common {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    std::string format;
    std::optional<int> N;
    std::optional<double> sigma_x2, sigma_e2, v0, m0, x_b, c;
    std::optional<std::string> quantile_rule;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON environment config");
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--out", c.out, "output path (default stdout)");
    sub->add_option("--format", c.format, "json, csv or jsonl");
    sub->add_option("--N", c.N, "override N");
    sub->add_option("--sigma-x2", c.sigma_x2, "override sigma_x2");
    sub->add_option("--sigma-e2", c.sigma_e2, "override sigma_e2");
    sub->add_option("--v0", c.v0, "override v0");
    sub->add_option("--m0", c.m0, "override m0");
    sub->add_option("--x-b", c.x_b, "override x_b");
    sub->add_option("--c", c.c, "override c");
    sub->add_option("--quantile-rule", c.quantile_rule, "midpoint or blom");
}

EnvironmentConfig resolve(const Common& c) {
    json j = c.config.empty() ? params_to_json(EnvironmentParams{}) : read_json_file(c.config);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (c.N) j["N"] = *c.N;
    if (c.sigma_x2) j["sigma_x2"] = *c.sigma_x2;
    if (c.sigma_e2) j["sigma_e2"] = *c.sigma_e2;
    if (c.v0) j["v0"] = *c.v0;
    if (c.m0) j["m0"] = *c.m0;
    if (c.x_b) j["x_b"] = *c.x_b;
    if (c.c) j["c"] = *c.c;
    if (c.quantile_rule) j["quantile_rule"] = *c.quantile_rule;
    return config_from_json(j);
}

void require_format(const Common& c, std::initializer_list<const char*> allowed) {
    for (const char* f : allowed)
        if (c.format == f) return;
    throw ConfigError("unsupported --format '" + c.format + "' for this subcommand");
}

PolicyKind parse_kind(const std::string& s) {
    if (s == "optimal") return PolicyKind::optimal;
    if (s == "myopic") return PolicyKind::myopic;
    throw ConfigError("unknown policy kind '" + s + "'");
}

PolicyTable make_table(const Environment& env, PolicyKind kind) {
    return kind == PolicyKind::optimal ? optimal_table(env) : myopic_table(env);
}

class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot open output '" + path + "'");
            os_ = &file_;
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json meta_of(const std::string& cmd, const Common& c, const EnvironmentConfig& cfg, json extra = json::object()) {
    json m = {{"subcommand", cmd}, {"config", cfg.to_json()}, {"seed", c.seed}};
    for (auto& [k, v] : extra.items()) m[k] = v;
    return m;
}

std::vector<SessionRecord> read_sessions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sessions '" + path + "'");
    std::vector<SessionRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            SessionRecord r;
            r.features = j.at("features").get<std::vector<std::vector<double>>>();
            r.depth = j.at("depth").get<int>();
            if (j.contains("J") && !j["J"].is_null()) r.J = j["J"].get<int>();
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw ConfigError("sessions line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (out.empty()) throw ConfigError("sessions file is empty");
    return out;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + item + "'");
        }
    }
    return v;
}

std::vector<double> linspace(double lo, double hi, int steps) {
    if (steps < 1) throw ConfigError("--steps must be positive");
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i) v[i] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
    return v;
}

// ---------------------------------------------------------------------------------------------

int run_policy(const Common& c, const std::string& kind_s, std::ostream& out) {
    require_format(c, {"json", "csv"});
    const auto cfg = resolve(c);
    const Environment env = cfg.build();
    const PolicyTable table = make_table(env, parse_kind(kind_s));
    Sink sink(c.out, out);
    if (c.format == "json") {
        json j = {{"meta", meta_of("policy", c, cfg)},
                  {"kind", to_string(table.kind)},
                  {"kappa", table.kappa},
                  {"reservation", table.reservation},
                  {"kappa_inf", table.kappa_inf}};
        *sink << j.dump(2) << '\n';
    } else {
        *sink << "# meta " << meta_of("policy", c, cfg).dump() << '\n' << "t,kappa,reservation\n";
        for (int t = 0; t < table.horizon(); ++t)
            *sink << t << ',' << num(table.kappa[t]) << ',' << num(table.reservation[t]) << '\n';
    }
    return 0;
}

int run_first_stop(const Common& c, const std::string& kind_s, std::optional<double> mu, std::ostream& out) {
    require_format(c, {"json", "csv"});
    const auto cfg = resolve(c);
    const Environment env = cfg.build();
    const PolicyTable table = make_table(env, parse_kind(kind_s));
    const FirstStopReport r = classify_first_stop(env, table, FirstStopMeasure{mu});
    json extra = {{"kind", kind_s}};
    extra["mu"] = mu ? json(*mu) : json(nullptr);
    const json meta = meta_of("first-stop", c, cfg, extra);
    Sink sink(c.out, out);
    if (c.format == "json") {
        json j = {{"meta", meta},
                  {"regime", to_string(r.regime)},
                  {"s1_minus", finite_or_null(r.s1_minus)},
                  {"s1_plus", finite_or_null(r.s1_plus)},
                  {"p_tau1", r.p_tau1},
                  {"p_cut_losses", r.p_cut_losses},
                  {"p_commit", r.p_commit},
                  {"omega1", r.omega1},
                  {"kappa1", r.kappa1}};
        *sink << j.dump(2) << '\n';
    } else {
        *sink << "# meta " << meta.dump() << '\n'
              << "regime,s1_minus,s1_plus,p_tau1,p_cut_losses,p_commit,omega1,kappa1\n"
              << to_string(r.regime) << ',' << num(r.s1_minus) << ',' << num(r.s1_plus) << ',' << num(r.p_tau1)
              << ',' << num(r.p_cut_losses) << ',' << num(r.p_commit) << ',' << num(r.omega1) << ','
              << num(r.kappa1) << '\n';
    }
    return 0;
}

int run_curse_scan(const Common& c, const std::string& kind_s, double rho_min, double rho_max, int steps,
                   std::ostream& out) {
    require_format(c, {"json", "csv"});
    const auto cfg = resolve(c);
    if (!cfg.params) throw ConfigError("curse-scan needs an EnvironmentParams config");
    const PolicyKind kind = parse_kind(kind_s);
    const std::vector<double> grid = linspace(rho_min, rho_max, steps);
    std::vector<CurseScanRow> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        rows[i] = winners_curse_scan(*cfg.params, std::span<const double>(&grid[i], 1), kind).rows[0];
    });
    std::optional<double> smallest;
    for (const auto& r : rows)
        if (r.trust && (!smallest || r.rho < *smallest)) smallest = r.rho;
    const json meta = meta_of("curse-scan", c, cfg,
                              {{"kind", kind_s}, {"rho_min", rho_min}, {"rho_max", rho_max}, {"steps", steps}});
    Sink sink(c.out, out);
    if (c.format == "json") {
        json jr = json::array();
        for (const auto& r : rows)
            jr.push_back({{"rho", r.rho}, {"interior", r.interior}, {"trust", r.trust}, {"p_tau1", r.p_tau1}});
        json j = {{"meta", meta}, {"rows", jr}};
        j["smallest_trust_rho"] = smallest ? json(*smallest) : json(nullptr);
        *sink << j.dump(2) << '\n';
    } else {
        *sink << "# meta " << meta.dump() << '\n' << "rho,interior,trust,p_tau1\n";
        for (const auto& r : rows)
            *sink << num(r.rho) << ',' << (r.interior ? 1 : 0) << ',' << (r.trust ? 1 : 0) << ','
                  << (r.interior ? num(r.p_tau1) : std::string("nan")) << '\n';
    }
    return 0;
}

int run_depth_dist(const Common& c, const std::string& kind_s, int cells, std::optional<double> mu,
                   std::ostream& out) {
    require_format(c, {"json", "csv"});
    const auto cfg = resolve(c);
    const Environment env = cfg.build();
    const PolicyTable table = make_table(env, parse_kind(kind_s));
    DepthGridOptions gopts;
    gopts.cells = cells;
    const DepthDistribution dist = mu ? depth_distribution_conditional(env, table, *mu)
                                      : depth_distribution(env, table, gopts);
    json extra = {{"kind", kind_s}, {"cells", cells}};
    extra["mu"] = mu ? json(*mu) : json(nullptr);
    const json meta = meta_of("depth-dist", c, cfg, extra);
    Sink sink(c.out, out);
    if (c.format == "json") {
        json j = {{"meta", meta},
                  {"measure", mu ? "conditional" : "predictive"},
                  {"pmf", dist.pmf},
                  {"mean", dist.mean()},
                  {"propensity", position_propensity(dist)}};
        *sink << j.dump(2) << '\n';
    } else {
        *sink << "# meta " << meta.dump() << '\n' << "epoch,lead,mass\n";
        for (const auto& sm : dist.survival)
            for (std::size_t k = 0; k < sm.mass.size(); ++k)
                *sink << sm.t << ',' << num(sm.centre(k)) << ',' << num(sm.mass[k]) << '\n';
    }
    return 0;
}

json path_json(const SessionPath& p) {
    return {{"mu", p.mu}, {"x", p.x}, {"depth", p.depth}, {"J", p.J}, {"payoff", p.payoff}};
}

int run_simulate(const Common& c, const std::string& kind_s, std::size_t n, std::optional<double> mu,
                 std::ostream& out) {
    require_format(c, {"jsonl", "json"});
    const auto cfg = resolve(c);
    const Environment env = cfg.build();
    const PolicyTable table = make_table(env, parse_kind(kind_s));
    require_interior(env, "simulate");
    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<std::string> text(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t begin = b * kBlock;
        const std::size_t count = std::min(kBlock, n - begin);
        std::string s;
        for (const auto& p : simulate_sessions(env, table, MuSpec{mu}, count, c.seed, begin)) {
            s += path_json(p).dump();
            s += '\n';
        }
        text[b] = std::move(s);
    });
    json extra = {{"kind", kind_s}, {"n", n}};
    extra["mu"] = mu ? json(*mu) : json(nullptr);
    const json meta = meta_of("simulate", c, cfg, extra);
    Sink sink(c.out, out);
    if (c.format == "jsonl") {
        *sink << json{{"meta", meta}}.dump() << '\n';
        for (const auto& s : text) *sink << s;
    } else {
        json sessions = json::array();
        for (const auto& s : text) {
            std::stringstream ss(s);
            std::string line;
            while (std::getline(ss, line)) sessions.push_back(json::parse(line));
        }
        *sink << json{{"meta", meta}, {"sessions", sessions}}.dump(2) << '\n';
    }
    return 0;
}

int run_abtest_cmd(const Common& c, const std::string& kind_s, double dmin, double dmax, int steps,
                   const std::string& method_s, std::size_t n, const std::string& summary, std::ostream& out) {
    require_format(c, {"csv", "json"});
    const auto cfg = resolve(c);
    const Environment env = cfg.build();
    const PolicyTable table = make_table(env, parse_kind(kind_s));
    DepthMethod method;
    if (method_s == "closed-form") method = ClosedFormN2{};
    else if (method_s == "monte-carlo") method = MonteCarlo{n, c.seed};
    else throw ConfigError("unknown --method '" + method_s + "'");
    const std::vector<double> deltas = linspace(dmin, dmax, steps);

    // Every grid point is an independent task: SR, LR, then baseline and SR'(0).
    const std::size_t G = deltas.size();
    std::vector<double> sr(G), lr(G);
    std::vector<char> corner(G, 0);
    double baseline = 0.0, sr_prime = 0.0;
    parallel_for(2 * G + 2, [&](std::size_t i) {
        if (i < G) {
            sr[i] = sr_curve(env, table, std::span<const double>(&deltas[i], 1), method)[0];
        } else if (i < 2 * G) {
            const auto p = lr_curve(env, table, std::span<const double>(&deltas[i - G], 1), method)[0];
            lr[i - G] = p.depth;
            corner[i - G] = p.corner;
        } else if (i == 2 * G) {
            baseline = expected_depth(env, table, env.m0(), method);
        } else {
            sr_prime = sr_derivative_at_zero(env, table, method);
        }
    });
    const json meta = meta_of("abtest", c, cfg,
                              {{"kind", kind_s},
                               {"delta_min", dmin},
                               {"delta_max", dmax},
                               {"steps", steps},
                               {"method", method_s},
                               {"n", n}});
    json summary_json = {{"meta", meta}, {"sr_prime_0", sr_prime}, {"baseline", baseline}};
    Sink sink(c.out, out);
    if (c.format == "csv") {
        *sink << "# meta " << meta.dump() << '\n' << "delta,sr,lr,lr_corner\n";
        for (std::size_t i = 0; i < G; ++i)
            *sink << num(deltas[i]) << ',' << num(sr[i]) << ',' << num(lr[i]) << ',' << int(corner[i]) << '\n';
        if (!summary.empty()) {
            std::ofstream s(summary);
            if (!s) throw ConfigError("cannot open summary '" + summary + "'");
            s << summary_json.dump(2) << '\n';
        }
    } else {
        json rows = json::array();
        for (std::size_t i = 0; i < G; ++i)
            rows.push_back({{"delta", deltas[i]}, {"sr", sr[i]}, {"lr", lr[i]}, {"lr_corner", corner[i] != 0}});
        summary_json["rows"] = rows;
        *sink << summary_json.dump(2) << '\n';
    }
    return 0;
}

int run_region(const Common& c, const std::string& kind_s, int t, std::optional<int> j, int points,
               const std::string& cloud, std::ostream& out) {
    require_format(c, {"json", "csv"});
    const auto cfg = resolve(c);
    const Environment env = cfg.build();
    const PolicyTable table = make_table(env, parse_kind(kind_s));
    SurvivalRegion region = build_survival_region(t, env, table);
    if (j) region = restrict_to_conversion(std::move(region), *j, env);
    json extra = {{"kind", kind_s}, {"t", t}, {"points", points}};
    extra["j"] = j ? json(*j) : json(nullptr);
    const json meta = meta_of("region", c, cfg, extra);

    std::vector<std::array<double, 2>> verts;
    if (region.dimension() == 2) verts = polygon_vertices(region);
    auto write_cloud = [&](std::ostream& os) {
        if (region.dimension() != 2) throw ConfigError("boundary point cloud needs t = 3");
        os << "# meta " << meta.dump() << '\n' << "x1,x2\n";
        for (std::size_t v = 0; v < verts.size(); ++v) {
            const auto& a = verts[v];
            const auto& b = verts[(v + 1) % verts.size()];
            for (int k = 0; k < points; ++k) {
                const double f = static_cast<double>(k) / points;
                os << num(a[0] + f * (b[0] - a[0])) << ',' << num(a[1] + f * (b[1] - a[1])) << '\n';
            }
        }
    };
    auto rows_json = [](const std::vector<LinearInequality>& rows) {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"coeffs", r.coeffs},
                           {"rhs", r.rhs},
                           {"tag", {{"epoch", r.tag.epoch},
                                    {"candidate", r.tag.rank == 0 ? std::string("outside")
                                                                  : "rank " + std::to_string(r.tag.rank)}}}});
        return arr;
    };
    Sink sink(c.out, out);
    if (c.format == "json") {
        json jv = json::array();
        for (const auto& v : verts) jv.push_back({v[0], v[1]});
        json out_j = {{"meta", meta}, {"t", t}, {"rows", rows_json(region.inequalities)},
                      {"extra", rows_json(region.extra)}};
        if (region.dimension() == 2) out_j["vertices"] = jv;
        *sink << out_j.dump(2) << '\n';
        if (!cloud.empty()) {
            std::ofstream f(cloud);
            if (!f) throw ConfigError("cannot open cloud '" + cloud + "'");
            write_cloud(f);
        }
    } else {
        write_cloud(*sink);
    }
    return 0;
}

std::vector<double> template_alpha(const EnvironmentConfig& cfg) {
    return cfg.build().alphas();
}

int run_likelihood(const Common& c, const std::string& kind_s, const std::string& sessions,
                   const std::string& beta_s, bool intercept, std::size_t samples, std::uint64_t epoch,
                   std::ostream& out) {
    require_format(c, {"jsonl", "json"});
    const auto cfg = resolve(c);
    const auto records = read_sessions(sessions);
    const std::vector<double> beta = parse_list(beta_s);
    const std::size_t dims = records.front().features.empty() ? 0 : records.front().features.front().size();
    const AffineFeatureModel model(dims, intercept);
    if (beta.size() != model.num_params()) throw ConfigError("--beta has the wrong length for the feature model");
    const std::vector<double> alpha = template_alpha(cfg);
    const Environment base = cfg.build();
    const UserPrimitives prims{base.c(), base.x_b()};
    const Calibration cal = calibrate(records, model, beta, alpha);
    const Environment env = user_environment(prims, cal, alpha);
    const PolicyTable table = make_table(env, parse_kind(kind_s));
    EstimatorOptions est;
    est.n = samples;
    est.seed = c.seed;
    est.epoch = epoch;
    std::vector<SessionLikelihood> res(records.size());
    parallel_for(records.size(), [&](std::size_t i) {
        res[i] = session_likelihood(records[i], model, beta, env, table, est, i);
    });
    const json meta = meta_of("likelihood", c, cfg,
                              {{"kind", kind_s},
                               {"beta", beta},
                               {"intercept", intercept},
                               {"samples", samples},
                               {"epoch", epoch},
                               {"v0", cal.v0},
                               {"sigma_eta2", cal.sigma_eta2}});
    Sink sink(c.out, out);
    json rows = json::array();
    for (std::size_t i = 0; i < res.size(); ++i) {
        json r = {{"session", i},
                  {"depth", records[i].depth},
                  {"value", res[i].value},
                  {"std_error", res[i].std_error},
                  {"underflow", res[i].underflow}};
        r["J"] = records[i].J ? json(*records[i].J) : json(nullptr);
        r["log_lik"] = res[i].underflow ? json(nullptr) : json(std::log(res[i].value));
        rows.push_back(std::move(r));
    }
    if (c.format == "jsonl") {
        *sink << json{{"meta", meta}}.dump() << '\n';
        for (const auto& r : rows) *sink << r.dump() << '\n';
    } else {
        *sink << json{{"meta", meta}, {"sessions", rows}}.dump(2) << '\n';
    }
    return 0;
}

int run_fit(const Common& c, const std::string& kind_s, const std::string& sessions, const std::string& beta_s,
            bool intercept, std::size_t samples, int epochs, double lr, const std::string& optimizer,
            bool fixed_prims, bool resample, std::ostream& out) {
    require_format(c, {"json"});
    const auto cfg = resolve(c);
    const auto records = read_sessions(sessions);
    const std::size_t dims = records.front().features.empty() ? 0 : records.front().features.front().size();
    const AffineFeatureModel model(dims, intercept);
    std::vector<double> beta = beta_s.empty() ? std::vector<double>(model.num_params(), 0.5) : parse_list(beta_s);
    if (beta.size() != model.num_params()) throw ConfigError("--beta-init has the wrong length for the feature model");
    const std::vector<double> alpha = template_alpha(cfg);
    const Environment base = cfg.build();
    FitOptions opts;
    opts.nll.policy = parse_kind(kind_s);
    opts.nll.estimator.n = samples;
    opts.nll.estimator.seed = c.seed;
    opts.nll.executor = [](std::size_t count, const std::function<void(std::size_t)>& body) {
        parallel_for(count, body);
    };
    opts.max_epochs = epochs;
    opts.optimizer = optimizer_from_string(optimizer);
    opts.learning_rate = lr;
    opts.fit_prims = !fixed_prims;
    opts.resample_each_epoch = resample;
    const FitResult r = fit(records, model, beta, {base.c(), base.x_b()}, alpha, opts);
    json trace = json::array();
    for (const auto& e : r.trace)
        trace.push_back({{"epoch", e.epoch}, {"nll", e.nll}, {"beta", e.beta}, {"c", e.c}, {"x_b", e.x_b}});
    const json meta = meta_of("fit", c, cfg,
                              {{"kind", kind_s},
                               {"beta_init", beta},
                               {"intercept", intercept},
                               {"samples", samples},
                               {"epochs", epochs},
                               {"lr", lr},
                               {"optimizer", optimizer},
                               {"fixed_prims", fixed_prims},
                               {"resample", resample}});
    Sink sink(c.out, out);
    *sink << json{{"meta", meta},       {"beta", r.beta}, {"c", r.prims.c},   {"x_b", r.prims.x_b},
                  {"nll", r.nll},       {"converged", r.converged},           {"trace", trace}}
                 .dump(2)
          << '\n';
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rational inspection of ranked lists: thresholds, depth laws, A/B depth, regions, likelihoods"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Common common;
    std::map<CLI::App*, std::string> default_format;
    std::string kind = "optimal";
    std::optional<double> mu;
    auto* policy = app.add_subcommand("policy", "myopic or optimal thresholds");
    add_common(policy, common);
    default_format[policy] = "json";
    policy->add_option("--kind", kind, "optimal or myopic");

    auto* first = app.add_subcommand("first-stop", "trust/explore regime and Pr(tau = 1)");
    add_common(first, common);
    default_format[first] = "json";
    first->add_option("--kind", kind, "optimal or myopic");
    first->add_option("--mu", mu, "condition on a true page mean");

    double rho_min = 0.05, rho_max = 0.999;
    int steps = 60;
    auto* curse = app.add_subcommand("curse-scan", "trust condition along the reliability path");
    add_common(curse, common);
    default_format[curse] = "csv";
    curse->add_option("--kind", kind, "optimal or myopic");
    curse->add_option("--rho-min", rho_min);
    curse->add_option("--rho-max", rho_max);
    curse->add_option("--steps", steps);

    int cells = 4001;
    auto* depth = app.add_subcommand("depth-dist", "depth law via the lead-chain recursion");
    add_common(depth, common);
    default_format[depth] = "json";
    depth->add_option("--kind", kind, "optimal or myopic");
    depth->add_option("--cells", cells);
    depth->add_option("--mu", mu, "conditional law at this page mean (N = 2)");

    std::size_t n = 1000;
    auto* sim = app.add_subcommand("simulate", "simulate sessions");
    add_common(sim, common);
    default_format[sim] = "jsonl";
    sim->add_option("--kind", kind, "optimal or myopic");
    sim->add_option("--n", n);
    sim->add_option("--mu", mu, "fix the page mean instead of drawing it from the prior");

    double dmin = -1.0, dmax = 1.0;
    int ab_steps = 41;
    std::string method = "closed-form", summary;
    std::size_t ab_n = 100000;
    auto* ab = app.add_subcommand("abtest", "short-run vs long-run depth");
    add_common(ab, common);
    default_format[ab] = "csv";
    ab->add_option("--kind", kind, "optimal or myopic");
    ab->add_option("--delta-min", dmin);
    ab->add_option("--delta-max", dmax);
    ab->add_option("--steps", ab_steps);
    ab->add_option("--method", method, "closed-form or monte-carlo");
    ab->add_option("--n", ab_n, "sessions per point for monte-carlo");
    ab->add_option("--summary", summary, "JSON summary path (csv format)");

    int t = 3, points = 50;
    std::optional<int> j;
    std::string cloud;
    auto* region = app.add_subcommand("region", "survival polyhedron");
    add_common(region, common);
    default_format[region] = "json";
    region->add_option("--kind", kind, "optimal or myopic");
    region->add_option("--t", t, "target depth");
    region->add_option("--j", j, "restrict to conversion index j");
    region->add_option("--points", points, "boundary points per edge (t = 3)");
    region->add_option("--cloud", cloud, "also write the t = 3 boundary CSV here");

    std::string sessions, beta;
    bool intercept = false;
    std::size_t samples = 4096;
    std::uint64_t epoch = 0;
    auto* lik = app.add_subcommand("likelihood", "per-session likelihoods");
    add_common(lik, common);
    default_format[lik] = "jsonl";
    lik->add_option("--kind", kind, "optimal or myopic");
    lik->add_option("--sessions", sessions, "session log (JSONL)")->required();
    lik->add_option("--beta", beta, "comma-separated model parameters")->required();
    lik->add_flag("--intercept", intercept, "affine model with intercept");
    lik->add_option("--samples", samples);
    lik->add_option("--epoch", epoch);

    int epochs = 200;
    double lr = 0.05;
    std::string optimizer = "adam";
    bool fixed_prims = false, no_resample = false;
    auto* fitc = app.add_subcommand("fit", "fit model and user primitives");
    add_common(fitc, common);
    default_format[fitc] = "json";
    fitc->add_option("--kind", kind, "optimal or myopic");
    fitc->add_option("--sessions", sessions, "session log (JSONL)")->required();
    fitc->add_option("--beta-init", beta, "comma-separated initial parameters");
    fitc->add_flag("--intercept", intercept, "affine model with intercept");
    fitc->add_option("--samples", samples);
    fitc->add_option("--epochs", epochs);
    fitc->add_option("--lr", lr);
    fitc->add_option("--optimizer", optimizer, "adam or gradient-descent");
    fitc->add_flag("--fixed-prims", fixed_prims, "hold c and x_b at the config values");
    fitc->add_flag("--no-resample", no_resample, "reuse the same draws every epoch");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return 0;
        err << app.help();
        return 2;
    }
    for (const auto& [sub, fmt] : default_format)
        if (sub->parsed() && common.format.empty()) common.format = fmt;

    try {
        if (policy->parsed()) return run_policy(common, kind, out);
        if (first->parsed()) return run_first_stop(common, kind, mu, out);
        if (curse->parsed()) return run_curse_scan(common, kind, rho_min, rho_max, steps, out);
        if (depth->parsed()) return run_depth_dist(common, kind, cells, mu, out);
        if (sim->parsed()) return run_simulate(common, kind, n, mu, out);
        if (ab->parsed()) return run_abtest_cmd(common, kind, dmin, dmax, ab_steps, method, ab_n, summary, out);
        if (region->parsed()) return run_region(common, kind, t, j, points, cloud, out);
        if (lik->parsed()) return run_likelihood(common, kind, sessions, beta, intercept, samples, epoch, out);
        if (fitc->parsed())
            return run_fit(common, kind, sessions, beta, intercept, samples, epochs, lr, optimizer, fixed_prims,
                           !no_resample, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const HorizonError& e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const ContractError& e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const CalibrationError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 3;
    }
    err << app.help();
    return 2;
}

}  // namespace standout::cli
