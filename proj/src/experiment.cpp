#include "ssp/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ssp/dynsys.hpp"
#include "ssp/exponents.hpp"
#include "ssp/odeint.hpp"
#include "ssp/sweep.hpp"

namespace ssp::experiment {

namespace fs = std::filesystem;

Mode mode_from_string(const std::string& s) {
    if (s == "exponents") return Mode::Exponents;
    if (s == "portrait") return Mode::Portrait;
    if (s == "shoot") return Mode::Shoot;
    if (s == "find") return Mode::Find;
    if (s == "lepin") return Mode::Lepin;
    if (s == "residuals") return Mode::Residuals;
    throw ConfigError("unknown mode: " + s);
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Exponents: return "exponents";
        case Mode::Portrait: return "portrait";
        case Mode::Shoot: return "shoot";
        case Mode::Find: return "find";
        case Mode::Lepin: return "lepin";
        case Mode::Residuals: return "residuals";
    }
    return "?";
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json json_number(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    if (std::isnan(v)) return json("nan");
    return json(v);
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    static const std::vector<std::string> known = {
        "m", "N", "p", "mode", "C", "K", "tol_rel", "tol_abs", "tol_C",
        "delta", "span", "x_big", "drift_tol", "lepin_eta_end", "lepin_eta_start",
        "parallel", "out", "format"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("unknown config key: " + it.key());
    }
    try {
        if (j.contains("m")) c.params.m = j.at("m").get<double>();
        if (j.contains("N")) c.params.N = j.at("N").get<double>();
        if (j.contains("p")) c.params.p = j.at("p").get<double>();
        if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
        if (j.contains("C")) c.C_list = j.at("C").get<std::vector<double>>();
        if (j.contains("K")) c.K_max = j.at("K").get<int>();
        if (j.contains("tol_rel")) c.tol_rel = j.at("tol_rel").get<double>();
        if (j.contains("tol_abs")) c.tol_abs = j.at("tol_abs").get<double>();
        if (j.contains("tol_C")) c.tol_C = j.at("tol_C").get<double>();
        if (j.contains("delta")) c.delta = j.at("delta").get<double>();
        if (j.contains("span")) c.eta_span = j.at("span").get<double>();
        if (j.contains("x_big")) c.x_big = j.at("x_big").get<double>();
        if (j.contains("drift_tol")) c.drift_tol = j.at("drift_tol").get<double>();
        if (j.contains("lepin_eta_end")) c.lepin_eta_end = j.at("lepin_eta_end").get<double>();
        if (j.contains("lepin_eta_start"))
            c.lepin_eta_start = j.at("lepin_eta_start").get<double>();
        if (j.contains("parallel")) c.parallel = j.at("parallel").get<bool>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("format")) {
            const std::string f = j.at("format").get<std::string>();
            if (f == "csv")
                c.format = OutputFormat::CSV;
            else if (f == "json")
                c.format = OutputFormat::JSON;
            else
                throw ConfigError("unknown format: " + f);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value error: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open config file " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(j);
}

shooter::ShooterOptions shooter_options(const ExperimentConfig& c) {
    shooter::ShooterOptions o;
    o.tol.rel = c.tol_rel;
    o.tol.abs = c.tol_abs;
    o.tol_C = c.tol_C;
    o.delta = c.delta;
    o.eta_span = c.eta_span;
    o.x_big = c.x_big;
    o.drift_tol = c.drift_tol;
    return o;
}

void write_text_file(const fs::path& path, const std::string& body) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << body;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string trajectory_csv(const odeint::Trajectory& traj) {
    // samples and exact event points merged in eta order
    struct Row {
        double eta;
        dynsys::State y;
        std::string event;
    };
    std::vector<Row> rows;
    rows.reserve(traj.samples.size() + traj.events.size());
    for (const auto& s : traj.samples) rows.push_back(Row{s.eta, s.y, ""});
    for (const auto& e : traj.events)
        rows.push_back(Row{e.eta, e.state,
                           e.name + (e.direction > 0 ? "+" : e.direction < 0 ? "-" : "")});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.eta < b.eta; });
    std::string out = std::string(kTrajectoryHeader) + "\n";
    for (const auto& r : rows) {
        out += format_double(r.eta);
        for (std::size_t i = 0; i < traj.dim; ++i) out += "," + format_double(r.y[i]);
        for (std::size_t i = traj.dim; i < 3; ++i) out += ",";
        out += "," + r.event + "\n";
    }
    return out;
}

std::string profile_csv(const std::vector<profile::ProfilePoint>& samples) {
    std::string out = std::string(kProfileHeader) + "\n";
    for (const auto& s : samples)
        out += format_double(s.xi) + "," + format_double(s.f) + "\n";
    return out;
}

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n));
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i)
        g.push_back(std::exp(a + (b - a) * i / (n - 1.0)));
    return g;
}

}  // namespace

std::string reference_flat_csv(const ParamTriple& q, double xi_lo, double xi_hi, int n) {
    const double k = profile::flat_constant(q);
    std::string out = std::string(kProfileHeader) + "\n";
    for (double xi : log_grid(xi_lo, xi_hi, n))
        out += format_double(xi) + "," + format_double(k) + "\n";
    return out;
}

std::string reference_singular_csv(const ParamTriple& q, double xi_lo, double xi_hi,
                                   int n) {
    std::string out = std::string(kProfileHeader) + "\n";
    for (double xi : log_grid(xi_lo, xi_hi, n))
        out += format_double(xi) + "," +
               format_double(profile::exact_profile(profile::ExactKind::StationarySingular,
                                                    q, xi)) +
               "\n";
    return out;
}

std::vector<fs::path> emit_plot_data(const ExperimentConfig& config,
                                     const std::vector<shooter::ShotOutcome>& outcomes) {
    std::vector<fs::path> files;
    double xi_lo = 1e-2, xi_hi = 1e2;
    bool any = false;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& out = outcomes[i];
        const std::string tag = std::to_string(i + 1);
        fs::path tpath = config.out / ("traj_" + tag + ".csv");
        write_text_file(tpath, trajectory_csv(out.trajectory));
        files.push_back(tpath);
        std::vector<profile::ProfilePoint> pts;
        try {
            pts = profile::reconstruct(config.params, out, 0.0).samples;
        } catch (const std::domain_error&) {
            // trajectory carried no admissible profile samples
        }
        fs::path ppath = config.out / ("profile_" + tag + ".csv");
        write_text_file(ppath, profile_csv(pts));
        files.push_back(ppath);
        if (!pts.empty()) {
            xi_lo = any ? std::min(xi_lo, pts.front().xi) : pts.front().xi;
            xi_hi = any ? std::max(xi_hi, pts.back().xi) : pts.back().xi;
            any = true;
        }
    }
    if (!any) {
        // headers only
        write_text_file(config.out / "traj_0.csv", std::string(kTrajectoryHeader) + "\n");
        write_text_file(config.out / "profile_0.csv", std::string(kProfileHeader) + "\n");
        files.push_back(config.out / "traj_0.csv");
        files.push_back(config.out / "profile_0.csv");
        return files;
    }
    xi_lo = std::max(xi_lo, 1e-12);
    fs::path flat = config.out / "ref_flat.csv";
    write_text_file(flat, reference_flat_csv(config.params, xi_lo, xi_hi, 64));
    files.push_back(flat);
    fs::path sing = config.out / "ref_singular.csv";
    write_text_file(sing, reference_singular_csv(config.params, xi_lo, xi_hi, 64));
    files.push_back(sing);
    return files;
}

namespace {

json params_json(const ParamTriple& q) {
    return json{{"m", q.m}, {"N", q.N}, {"p", q.p}};
}

json outcome_json(const ParamTriple& q, const shooter::ShotOutcome& out, double C) {
    json shot;
    shot["C"] = C;
    shot["classification"] = shooter::to_string(out.classification);
    shot["oscillations"] = out.oscillations;
    if (out.first_event) {
        shot["first_event"] = json{{"name", out.first_event->name},
                                   {"eta", out.first_event->eta},
                                   {"direction", out.first_event->direction}};
    } else {
        shot["first_event"] = nullptr;
    }
    if (out.z_limit) {
        shot["Z_limit"] = *out.z_limit;
        const auto [decay, fit] = profile::extract_decay(q, out);
        shot["decay_C"] = decay;
        shot["decay_fit_quality"] = fit;
        shot["Z_drift"] = json_number(out.z_drift);
    }
    shot["reached_q3"] = out.reached_q3;
    shot["termination"] = odeint::to_string(out.trajectory.termination);
    return shot;
}

struct SummaryWriter {
    const ExperimentConfig& config;
    RunResult& result;

    void finish(json summary) {
        summary["files"] = json::array();
        for (const auto& f : result.files) summary["files"].push_back(f.filename().string());
        const fs::path path = config.out / "summary.json";
        write_text_file(path, summary.dump(2) + "\n");
        result.files.push_back(path);
        result.summary = std::move(summary);
    }
};

json base_summary(const ExperimentConfig& config) {
    json s;
    s["schema"] = "ssp-summary-v1";
    s["mode"] = to_string(config.mode);
    s["params"] = params_json(config.params);
    s["status"] = "ok";
    return s;
}

void run_exponents(const ExperimentConfig& config, RunResult& result) {
    const auto t = exponents::exponent_table(config.params.m, config.params.N);
    json s = base_summary(config);
    s["exponents"] = json{{"p_F", json_number(t.p_F)},
                          {"p_s", json_number(t.p_s)},
                          {"p_JL", json_number(t.p_JL)},
                          {"p_L", json_number(t.p_L)}};
    if (config.params.p > config.params.m)
        s["regime"] = exponents::to_string(exponents::classify_regime(config.params));
    if (config.format == OutputFormat::CSV) {
        std::string csv = std::string(kExponentsHeader) + "\n";
        csv += format_double(config.params.m) + "," + format_double(config.params.N) + "," +
               format_double(t.p_F) + "," + format_double(t.p_s) + "," +
               format_double(t.p_JL) + "," + format_double(t.p_L) + "\n";
        const fs::path path = config.out / "exponents.csv";
        write_text_file(path, csv);
        result.files.push_back(path);
    }
    SummaryWriter{config, result}.finish(std::move(s));
}

void run_portrait(const ExperimentConfig& config, RunResult& result) {
    const auto pts = dynsys::critical_points(config.params);
    json s = base_summary(config);
    json list = json::array();
    for (const auto& cp : pts) {
        json e;
        switch (cp.label) {
            case dynsys::PointLabel::P0: e["label"] = "P0"; break;
            case dynsys::PointLabel::P1: e["label"] = "P1"; break;
            case dynsys::PointLabel::P2: e["label"] = "P2"; break;
            case dynsys::PointLabel::P3: e["label"] = "P3"; break;
            case dynsys::PointLabel::Q1: e["label"] = "Q1"; break;
            case dynsys::PointLabel::Q2: e["label"] = "Q2"; break;
            case dynsys::PointLabel::Q3: e["label"] = "Q3"; break;
            case dynsys::PointLabel::Q4: e["label"] = "Q4"; break;
            case dynsys::PointLabel::Q5: e["label"] = "Q5"; break;
            case dynsys::PointLabel::Qgamma: e["label"] = "Qgamma"; break;
        }
        if (cp.label == dynsys::PointLabel::Qgamma) e["kappa"] = cp.kappa;
        e["chart"] = cp.has_chart ? json(dynsys::to_string(cp.chart)) : json(nullptr);
        e["at_infinity"] = cp.at_infinity;
        if (cp.has_chart)
            e["location"] = json::array({cp.location[0], cp.location[1], cp.location[2]});
        if (cp.at_infinity)
            e["sphere"] =
                json::array({cp.sphere[0], cp.sphere[1], cp.sphere[2], cp.sphere[3]});
        if (cp.dim > 0) {
            json ev = json::array();
            for (std::size_t i = 0; i < cp.dim; ++i)
                ev.push_back(json::array(
                    {cp.eigenvalues[i].real(), cp.eigenvalues[i].imag()}));
            e["eigenvalues"] = ev;
        }
        switch (cp.stability) {
            case dynsys::Stability::Saddle: e["stability"] = "saddle"; break;
            case dynsys::Stability::SaddleFocus: e["stability"] = "saddle-focus"; break;
            case dynsys::Stability::UnstableNode: e["stability"] = "unstable-node"; break;
            case dynsys::Stability::StableNode: e["stability"] = "stable-node"; break;
            case dynsys::Stability::CenterUnstable:
                e["stability"] = "center+unstable";
                break;
            case dynsys::Stability::Nonhyperbolic: e["stability"] = "nonhyperbolic"; break;
        }
        if (cp.no_admissible_connection) e["no_admissible_connection"] = true;
        if (cp.no_incoming_profiles) e["no_incoming_profiles"] = true;
        list.push_back(std::move(e));
    }
    s["critical_points"] = std::move(list);
    s["discriminant_F"] = dynsys::discriminant_F(config.params);

    // reference series in phase space: the two exact line orbits
    std::string csv = "eta,X,Y,Z,orbit\n";
    for (int i = 0; i <= 40; ++i) {
        const double eta = -2.0 + 4.0 * i / 40.0;
        const auto a =
            dynsys::exact_orbit_state(dynsys::ExactOrbit::ConstOrbit, config.params, eta);
        csv += format_double(eta) + "," + format_double(a[0]) + "," + format_double(a[1]) +
               "," + format_double(a[2]) + ",flat\n";
    }
    for (int i = 0; i <= 40; ++i) {
        const double eta = -2.0 + 4.0 * i / 40.0;
        const auto b =
            dynsys::exact_orbit_state(dynsys::ExactOrbit::StatOrbit, config.params, eta);
        csv += format_double(eta) + "," + format_double(b[0]) + "," + format_double(b[1]) +
               "," + format_double(b[2]) + ",singular\n";
    }
    const fs::path path = config.out / "portrait_reference.csv";
    write_text_file(path, csv);
    result.files.push_back(path);
    SummaryWriter{config, result}.finish(std::move(s));
}

void run_shoot(const ExperimentConfig& config, RunResult& result) {
    if (config.C_list.empty()) throw ConfigError("shoot mode requires a C list");
    auto opts = shooter_options(config);
    const auto outcomes =
        sweep::classify_sweep(config.params, config.C_list, opts, config.parallel);
    auto files = emit_plot_data(config, outcomes);
    result.files.insert(result.files.end(), files.begin(), files.end());
    json s = base_summary(config);
    json shots = json::array();
    bool undetermined = false;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        shots.push_back(outcome_json(config.params, outcomes[i], config.C_list[i]));
        if (outcomes[i].classification == shooter::SetLabel::Undetermined)
            undetermined = true;
    }
    s["shots"] = std::move(shots);
    if (undetermined) s["status"] = "undetermined";
    SummaryWriter{config, result}.finish(std::move(s));
    if (undetermined)
        throw NumericError("shoot: at least one classification is Undetermined");
}

void run_find(const ExperimentConfig& config, RunResult& result) {
    auto opts = shooter_options(config);
    const auto report = shooter::find_solutions(config.params, config.K_max, opts);
    std::vector<shooter::ShotOutcome> outcomes;
    outcomes.reserve(report.solutions.size());
    for (const auto& sol : report.solutions) outcomes.push_back(sol.outcome);
    auto files = emit_plot_data(config, outcomes);
    result.files.insert(result.files.end(), files.begin(), files.end());
    json s = base_summary(config);
    json sols = json::array();
    for (const auto& sol : report.solutions) {
        json e = outcome_json(config.params, sol.outcome, sol.C);
        if (sol.outcome.classification == shooter::SetLabel::ConnectsQ1) {
            const auto sp = profile::reconstruct(config.params, sol.outcome, sol.C);
            e["monotone"] = sp.monotone;
            e["f0"] = sp.f0;
        }
        sols.push_back(std::move(e));
    }
    s["solutions"] = std::move(sols);
    s["failures"] = report.failures;
    if (static_cast<int>(report.solutions.size()) < config.K_max)
        s["status"] = "incomplete";
    SummaryWriter{config, result}.finish(std::move(s));
    if (report.solutions.empty())
        throw NumericError("find: no connecting orbit could be certified");
}

void run_lepin(const ExperimentConfig& config, RunResult& result) {
    const int count = shooter::lepin_zero_count(config.params, config.lepin_eta_end,
                                                config.lepin_eta_start);
    json s = base_summary(config);
    s["lepin"] = json{{"count", count},
                      {"eta_end", config.lepin_eta_end},
                      {"eta_start", config.lepin_eta_start}};
    const auto [A, B] = shooter::lepin_coefficients(config.params);
    s["lepin"]["A"] = A;
    s["lepin"]["B"] = B;
    SummaryWriter{config, result}.finish(std::move(s));
}

void run_residuals(const ExperimentConfig& config, RunResult& result) {
    const ParamTriple q = config.params;
    std::string csv = std::string(kResidualsHeader) + "\n";
    // worst residuals are tracked relative to the reaction term's size
    double worst_flat = 0.0, worst_sing = 0.0, worst_sob = 0.0;
    const auto grid = log_grid(1e-2, 1e2, 33);
    const auto flat = profile::exact_profile_fn(profile::ExactKind::ConstantStar, q);
    const auto sing = profile::exact_profile_fn(profile::ExactKind::StationarySingular, q);
    auto rel = [](double r, double f, double p) {
        return std::abs(r) / std::max(1.0, std::pow(f, p));
    };
    for (double xi : grid) {
        const double r = profile::ode_residual(q, flat, xi);
        worst_flat = std::max(worst_flat, rel(r, flat.f(xi), q.p));
        csv += "flat," + format_double(xi) + "," + format_double(r) + "\n";
    }
    for (double xi : grid) {
        const double r = profile::ode_residual(q, sing, xi);
        worst_sing = std::max(worst_sing, rel(r, sing.f(xi), q.p));
        csv += "singular," + format_double(xi) + "," + format_double(r) + "\n";
    }
    // the stationary bubble family exists at the Sobolev-critical exponent
    ParamTriple qs = q;
    qs.p = sobolev_exponent(q.m, q.N);
    const auto sob = profile::exact_profile_fn(profile::ExactKind::SobolevFamily, qs);
    for (double xi : grid) {
        const double r = profile::stationary_residual(qs, sob, xi);
        worst_sob = std::max(worst_sob, rel(r, sob.f(xi), qs.p));
        csv += "sobolev," + format_double(xi) + "," + format_double(r) + "\n";
    }
    const fs::path path = config.out / "residuals.csv";
    write_text_file(path, csv);
    result.files.push_back(path);
    json s = base_summary(config);
    s["residuals"] = json{{"flat_max", worst_flat},
                          {"singular_max", worst_sing},
                          {"sobolev_stationary_max", worst_sob}};
    SummaryWriter{config, result}.finish(std::move(s));
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
    try {
        validate(config.params);
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    if (!(config.tol_rel > 0.0 && config.tol_abs > 0.0 && config.tol_C > 0.0))
        throw ConfigError("tolerances must be positive");
    RunResult result;
    try {
        switch (config.mode) {
            case Mode::Exponents: run_exponents(config, result); break;
            case Mode::Portrait: run_portrait(config, result); break;
            case Mode::Shoot: run_shoot(config, result); break;
            case Mode::Find: run_find(config, result); break;
            case Mode::Lepin: run_lepin(config, result); break;
            case Mode::Residuals: run_residuals(config, result); break;
        }
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::overflow_error& e) {
        throw NumericError(e.what());
    }
    return result;
}

int run_to_exit_code(const ExperimentConfig& config) noexcept {
    auto record = [&config](const char* kind, const std::string& what) noexcept {
        try {
            json err;
            err["schema"] = "ssp-error-v1";
            err["error"] = json{{"kind", kind}, {"what", what}};
            write_text_file(config.out / "error.json", err.dump(2) + "\n");
        } catch (...) {
        }
    };
    try {
        run(config);
        return kExitOk;
    } catch (const ConfigError& e) {
        record("config", e.what());
        return kExitConfig;
    } catch (const NumericError& e) {
        record("numeric", e.what());
        return kExitNumeric;
    } catch (const IoError& e) {
        record("io", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        record("numeric", e.what());
        return kExitNumeric;
    }
}

bool validate_schema(const json& value, const json& schema, std::string* error) {
    auto fail = [error](const std::string& msg) {
        if (error) *error = msg;
        return false;
    };
    if (schema.contains("type")) {
        const auto matches = [&](const std::string& t) {
            if (t == "object") return value.is_object();
            if (t == "array") return value.is_array();
            if (t == "string") return value.is_string();
            if (t == "number") return value.is_number();
            if (t == "integer") return value.is_number_integer();
            if (t == "boolean") return value.is_boolean();
            if (t == "null") return value.is_null();
            return false;
        };
        bool ok = false;
        if (schema["type"].is_array()) {
            for (const auto& t : schema["type"]) ok = ok || matches(t.get<std::string>());
        } else {
            ok = matches(schema["type"].get<std::string>());
        }
        if (!ok) return fail("type mismatch: " + value.dump().substr(0, 80));
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& e : schema["enum"]) ok = ok || (e == value);
        if (!ok) return fail("enum mismatch: " + value.dump().substr(0, 80));
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& r : schema["required"])
                if (!value.contains(r.get<std::string>()))
                    return fail("missing required key " + r.get<std::string>());
        }
        if (schema.contains("properties")) {
            for (auto it = schema["properties"].begin(); it != schema["properties"].end();
                 ++it) {
                if (value.contains(it.key()) &&
                    !validate_schema(value.at(it.key()), it.value(), error))
                    return false;
            }
        }
    }
    if (value.is_array() && schema.contains("items")) {
        for (const auto& v : value)
            if (!validate_schema(v, schema["items"], error)) return false;
    }
    return true;
}

}  // namespace ssp::experiment
