#include "sigexec/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json_util.hpp"
#include "sigexec/error.hpp"

namespace sigexec {

namespace fs = std::filesystem;
using detail::check_keys;
using detail::get_or;

// ---------------------------------------------------------------- config parsing

ModelParams model_params_from_json(const Json& j) {
    const std::string path = "model";
    ModelParams p;
    p.kind = model_kind_from_string(get_or<std::string>(j, "type", "bm", path));
    switch (p.kind) {
        case ModelKind::bm: check_keys(j, {"type", "sigma", "T", "steps"}, path); break;
        case ModelKind::ou_signal:
            check_keys(j, {"type", "sigma", "T", "steps", "I0", "gamma", "sigma0", "rho"}, path);
            break;
        case ModelKind::order_flow:
            check_keys(j, {"type", "sigma", "T", "steps", "k_flow", "kappa", "lambda0", "eta0", "mark_convention"},
                       path);
            break;
        case ModelKind::fbm: check_keys(j, {"type", "sigma", "T", "steps", "H"}, path); break;
    }
    p.sigma = get_or(j, "sigma", p.sigma, path);
    p.horizon = get_or(j, "T", p.horizon, path);
    p.steps = get_or(j, "steps", p.steps, path);
    p.signal_start = get_or(j, "I0", p.signal_start, path);
    p.signal_decay = get_or(j, "gamma", p.signal_decay, path);
    p.signal_vol = get_or(j, "sigma0", p.signal_vol, path);
    p.signal_corr = get_or(j, "rho", p.signal_corr, path);
    p.flow_impact = get_or(j, "k_flow", p.flow_impact, path);
    p.flow_decay = get_or(j, "kappa", p.flow_decay, path);
    p.flow_intensity = get_or(j, "lambda0", p.flow_intensity, path);
    p.flow_mark = get_or(j, "eta0", p.flow_mark, path);
    if (j.contains("mark_convention")) {
        p.marks = mark_convention_from_string(get_or<std::string>(j, "mark_convention", "rate", path));
    }
    p.hurst = get_or(j, "H", p.hurst, path);
    p.validate();
    return p;
}

int speed_level_for_order(int order) {
    if (order < 3) throw InputError("order: must be >= 3");
    return (order - 3) / 2;
}

void ExperimentConfig::validate() const {
    problem.validate();
    if (train_paths < 1) throw InputError("train_paths: must be >= 1");
    if (test_paths < 1) throw InputError("test_paths: must be >= 1");
    if (order && problem.level_es != *order) throw InputError("order: disagrees with problem.N");
    if (data) {
        if (!(data->window_length > 0)) throw InputError("data.window_length: must be > 0");
        if (data->train_csv.empty()) throw InputError("data.train_csv: missing");
        if (data->test_csv.empty()) throw InputError("data.test_csv: missing");
    } else {
        model.validate();
        if (std::abs(model.horizon - problem.horizon) > 1e-12 * problem.horizon) {
            throw InputError("model.T: must equal problem.T");
        }
    }
    for (const auto& b : benchmarks) {
        if (b != "twap" && b != "almgren_chriss") throw InputError("benchmarks: unknown benchmark \"" + b + "\"");
    }
    for (double phi : phi_sweep) {
        if (!(std::isfinite(phi) && phi >= 0)) throw InputError("phi_sweep: values must be >= 0");
    }
}

Json ExperimentConfig::to_json() const {
    Json j;
    j["name"] = name;
    j["model"] = model.to_json();
    j["problem"] = problem.to_json();
    j["order"] = order ? Json(*order) : Json(nullptr);
    j["train_paths"] = train_paths;
    j["test_paths"] = test_paths;
    j["seed"] = seed;
    if (data) {
        Json d;
        d["train_csv"] = data->train_csv.string();
        d["test_csv"] = data->test_csv.string();
        d["window_length"] = data->window_length;
        d["normalize"] = data->normalize;
        j["data"] = d;
    } else {
        j["data"] = nullptr;
    }
    j["benchmarks"] = benchmarks;
    j["trace_paths"] = trace_paths;
    j["phi_sweep"] = phi_sweep;
    j["solver"] = Json{{"method", sigexec::to_string(method)}};
    j["reference"] = reference;
    j["assumed"] = assumed;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    const std::string root = "config";
    check_keys(j, {"name", "model", "problem", "order", "train_paths", "test_paths", "seed", "data", "benchmarks",
                   "trace_paths", "phi_sweep", "solver", "reference", "assumed"},
               root);
    ExperimentConfig c;
    c.name = get_or<std::string>(j, "name", c.name, root);
    if (j.contains("model")) c.model = model_params_from_json(j.at("model"));
    if (!j.contains("problem")) throw InputError("problem: missing");
    const Json& pj = j.at("problem");
    if (j.contains("order") && !j.at("order").is_null()) {
        const int order = get_or<int>(j, "order", 0, root);
        const int m = speed_level_for_order(order);
        if (pj.is_object() && ((pj.contains("M") && pj.at("M") != m) || (pj.contains("N") && pj.at("N") != order))) {
            throw InputError("order: disagrees with problem.M/N (order " + std::to_string(order) + " means M=" +
                             std::to_string(m) + ", N=" + std::to_string(order) + ")");
        }
        Json resolved = pj;
        resolved["M"] = m;
        resolved["N"] = order;
        c.problem = ProblemSpec::from_json(resolved);
        c.order = order;
    } else {
        c.problem = ProblemSpec::from_json(pj);
    }
    c.train_paths = get_or(j, "train_paths", c.train_paths, root);
    c.test_paths = get_or(j, "test_paths", c.test_paths, root);
    c.seed = get_or(j, "seed", c.seed, root);
    if (j.contains("data") && !j.at("data").is_null()) {
        const Json& dj = j.at("data");
        check_keys(dj, {"train_csv", "test_csv", "window_length", "normalize"}, "data");
        DataSource d;
        d.train_csv = detail::get_required<std::string>(dj, "train_csv", "data");
        d.test_csv = detail::get_required<std::string>(dj, "test_csv", "data");
        d.window_length = detail::get_required<double>(dj, "window_length", "data");
        d.normalize = get_or(dj, "normalize", d.normalize, "data");
        c.data = d;
    }
    c.benchmarks = get_or(j, "benchmarks", c.benchmarks, root);
    c.trace_paths = get_or(j, "trace_paths", c.trace_paths, root);
    c.phi_sweep = get_or(j, "phi_sweep", c.phi_sweep, root);
    if (j.contains("solver")) {
        const Json& sj = j.at("solver");
        check_keys(sj, {"method"}, "solver");
        const auto m = get_or<std::string>(sj, "method", "automatic", "solver");
        if (m == "automatic") c.method = SolveMethod::automatic;
        else if (m == "quadratic_direct") c.method = SolveMethod::quadratic_direct;
        else if (m == "gradient_ascent") c.method = SolveMethod::gradient_ascent;
        else throw InputError("solver.method: unknown method \"" + m + "\"");
    }
    if (j.contains("reference")) c.reference = j.at("reference");
    c.assumed = get_or(j, "assumed", c.assumed, root);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const fs::path& file) { return from_json(read_json(file)); }

// ---------------------------------------------------------------- presets

std::vector<std::string> preset_names() { return {"bm", "signal", "orderflow", "fbm"}; }

namespace {

void set_order(ExperimentConfig& c, int order) {
    c.order = order;
    c.problem.level_es = order;
    c.problem.level_l = speed_level_for_order(order);
}

}  // namespace

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.model.horizon = 1.0;
    c.problem.horizon = 1.0;
    c.problem.q0 = 1.0;
    if (name == "bm") {
        c.model.kind = ModelKind::bm;
        c.model.sigma = 0.02;
        c.model.steps = 250;
        c.problem.impact = ImpactModel::temporary_plus_permanent(1e-3, 1e-4);
        c.problem.alpha = 10.0;
        c.problem.phi = 0.0;
        c.phi_sweep = {0.0, 1e-3, 1e-2};
        c.train_paths = 100000;
        c.test_paths = 1000;
        set_order(c, 7);
    } else if (name == "signal") {
        c.model.kind = ModelKind::ou_signal;
        c.model.sigma = 0.02;
        c.model.signal_vol = 0.02;
        c.model.signal_start = 0.02;
        c.model.signal_decay = 0.1;
        c.model.steps = 250;
        c.problem.impact = ImpactModel::temporary(1e-3);
        c.problem.alpha = 1e-2;
        c.problem.phi = 1e-3;
        c.train_paths = 10000;
        c.test_paths = 10000;
        c.assumed = {"model.sigma", "model.sigma0", "model.T"};
        c.reference = {{"signature_cost", 1.0169981}, {"optimal_cost", 1.0170877}};
        set_order(c, 9);
    } else if (name == "orderflow") {
        c.model.kind = ModelKind::order_flow;
        c.model.sigma = 0.1;
        c.model.flow_impact = 1e-4;
        c.model.flow_decay = 5.0;
        c.model.flow_intensity = 5.0;
        c.model.flow_mark = 0.8;
        c.model.marks = MarkConvention::rate;
        c.model.steps = 250;
        c.problem.impact = ImpactModel::temporary(5e-4);
        c.problem.alpha = 2.0;
        c.problem.phi = 5e-3;
        c.train_paths = 10000;
        c.test_paths = 10000;
        c.assumed = {"model.T", "model.mark_convention"};
        c.reference = {{"signature_cost", 0.995690}, {"optimal_cost", 0.995722}};
        set_order(c, 7);
    } else if (name == "fbm") {
        c.model.kind = ModelKind::fbm;
        c.model.sigma = 0.02;
        c.model.hurst = 1.0 / 3.0;
        c.model.steps = 250;
        c.problem.impact = ImpactModel::temporary(1e-3);
        c.problem.alpha = 0.1;
        c.problem.phi = 0.0;
        c.train_paths = 10000;
        c.test_paths = 10000;
        c.reference = {{"signature_cost", 1.0031300}, {"constant_speed_cost", 0.9991335}};
        set_order(c, 7);
    } else {
        throw InputError("unknown preset \"" + name + "\"");
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------- pipeline

std::uint64_t test_seed(std::uint64_t seed) { return path_seed(seed, std::numeric_limits<std::size_t>::max()); }

PathBatch train_batch(const ExperimentConfig& cfg) {
    if (cfg.data) {
        return load_windows_csv(cfg.data->train_csv, cfg.data->window_length, cfg.data->normalize,
                                cfg.problem.horizon);
    }
    return simulate(cfg.model, cfg.train_paths, cfg.seed);
}

PathBatch test_batch(const ExperimentConfig& cfg) {
    if (cfg.data) {
        return load_windows_csv(cfg.data->test_csv, cfg.data->window_length, cfg.data->normalize, cfg.problem.horizon);
    }
    return simulate(cfg.model, cfg.test_paths, test_seed(cfg.seed));
}

ExpectedSignature expected_signature_for(const ExperimentConfig& cfg) {
    if (cfg.data) return estimate(train_batch(cfg), cfg.problem.level_es);
    return estimate_streaming(cfg.model, cfg.train_paths, cfg.seed, cfg.problem.level_es);
}

double speed_variation(const BacktestReport& report) {
    std::vector<double> thetas;
    for (const auto& tr : report.traces) {
        thetas.insert(thetas.end(), tr.speed.begin(), tr.speed.end() - 1);
    }
    const SampleStats s = sample_stats(thetas);
    return s.std_dev / std::abs(s.mean);
}

PipelineResult run_pipeline(const ExperimentConfig& cfg, const ExpectedSignature& es, const PathBatch& test) {
    PipelineResult r;
    SolveOptions opt;
    opt.method = cfg.method;
    r.solved = solve(cfg.problem, es, opt);
    r.signature = run_strategy(r.solved.strategy, test, cfg.problem, cfg.trace_paths);
    r.speed_variation = speed_variation(r.signature);
    for (const auto& b : cfg.benchmarks) {
        if (b == "twap") {
            r.benchmarks.push_back(run_schedule(twap_schedule(cfg.problem), "twap", test, cfg.problem, cfg.trace_paths));
        } else if (b == "almgren_chriss") {
            r.benchmarks.push_back(run_schedule(almgren_chriss_schedule(cfg.problem), "almgren_chriss", test,
                                                cfg.problem, cfg.trace_paths));
            r.savings_bps = savings_series(r.signature, r.benchmarks.back(), cfg.problem.alpha);
        }
    }
    return r;
}

// ---------------------------------------------------------------- files

void write_json(const fs::path& file, const Json& j) {
    std::ofstream out(file);
    if (!out) throw InputError("cannot write " + file.string());
    out << j.dump(2) << '\n';
}

Json read_json(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw InputError("cannot read " + file.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(file.string() + ": " + e.what());
    }
}

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
}

void write_level_norms(const ExpectedSignature& es, const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw InputError("cannot write " + file.string());
    out << std::setprecision(17) << "level,norm,std_error\n";
    for (std::size_t k = 0; k < es.level_norms().size(); ++k) {
        out << k << ',' << es.level_norms()[k] << ',' << es.level_std_errors()[k] << '\n';
    }
}

Json stats_json(const BacktestReport& r) {
    return {{"mean_cost", r.cost.mean}, {"std_error", r.cost.std_error}, {"n_paths", r.cost.n}};
}

Json backtest_json(const ExperimentConfig& cfg, const PipelineResult& r) {
    Json j;
    j["config"] = cfg.to_json();
    j["replay"] = "impact evaluated with the training impact model on every test path";
    j["strategy"] = r.solved.strategy.to_json();
    j["signature"] = r.signature.to_json();
    j["speed_variation"] = r.speed_variation;
    Json bench = Json::object();
    for (const auto& b : r.benchmarks) bench[b.label] = b.to_json();
    j["benchmarks"] = bench;
    if (!r.savings_bps.empty()) {
        const SampleStats s = sample_stats(r.savings_bps);
        j["savings_per_share_bps"] = {{"mean", s.mean}, {"std_error", s.std_error}, {"per_path", r.savings_bps}};
    }
    return j;
}

void write_backtest_files(const ExperimentConfig& cfg, const PipelineResult& r, const fs::path& out,
                          const std::string& stem) {
    write_json(out / (stem + ".json"), backtest_json(cfg, r));
    write_traces_csv(r.signature, out / (stem + "_traces.csv"));
    for (const auto& b : r.benchmarks) write_traces_csv(b, out / (stem + "_" + b.label + "_traces.csv"));
    if (!r.savings_bps.empty()) {
        std::ofstream s(out / (stem + "_savings.csv"));
        s << std::setprecision(17) << "window_id,savings_bps\n";
        for (std::size_t i = 0; i < r.savings_bps.size(); ++i) s << i << ',' << r.savings_bps[i] << '\n';
    }
}

Json solve_json(const ExperimentConfig& cfg, const SolveResult& s) {
    Json j;
    j["config"] = cfg.to_json();
    j["strategy"] = s.strategy.to_json();
    j["report"] = s.report.to_json();
    return j;
}

}  // namespace

void cmd_expsig(const ExperimentConfig& cfg, const fs::path& out) {
    cfg.validate();
    ensure_dir(out);
    const ExpectedSignature es = expected_signature_for(cfg);
    Json j;
    j["config"] = cfg.to_json();
    j["expected_signature"] = to_json(es);
    write_json(out / "expsig.json", j);
    write_level_norms(es, out / "level_norms.csv");
}

void cmd_solve(const ExperimentConfig& cfg, const fs::path& out, const std::optional<fs::path>& expsig_file) {
    cfg.validate();
    ensure_dir(out);
    std::optional<ExpectedSignature> es;
    if (expsig_file) {
        const Json j = read_json(*expsig_file);
        es = expected_signature_from_json(j.contains("expected_signature") ? j.at("expected_signature") : j);
    } else {
        es = expected_signature_for(cfg);
    }
    SolveOptions opt;
    opt.method = cfg.method;
    SolveResult s = solve(cfg.problem, *es, opt);
    Json j = solve_json(cfg, s);
    if (!cfg.data) {
        // θ spread on a small validation batch drawn from the test stream
        const PathBatch validation = simulate(cfg.model, std::min<std::size_t>(cfg.test_paths, 100), test_seed(cfg.seed));
        const BacktestReport v = run_strategy(s.strategy, validation, cfg.problem, validation.size());
        j["validation"] = {{"n_paths", validation.size()}, {"speed_variation", speed_variation(v)}};
    }
    write_json(out / "strategy.json", j);
}

void cmd_backtest(const ExperimentConfig& cfg, const fs::path& out, const fs::path& strategy_file) {
    cfg.validate();
    ensure_dir(out);
    const Json sj = read_json(strategy_file);
    PipelineResult r;
    r.solved.strategy = Strategy::from_json(sj.contains("strategy") ? sj.at("strategy") : sj);
    const PathBatch test = test_batch(cfg);
    r.signature = run_strategy(r.solved.strategy, test, cfg.problem, cfg.trace_paths);
    r.speed_variation = speed_variation(r.signature);
    for (const auto& b : cfg.benchmarks) {
        if (b == "twap") {
            r.benchmarks.push_back(run_schedule(twap_schedule(cfg.problem), "twap", test, cfg.problem, cfg.trace_paths));
        } else {
            r.benchmarks.push_back(run_schedule(almgren_chriss_schedule(cfg.problem), "almgren_chriss", test,
                                                cfg.problem, cfg.trace_paths));
            r.savings_bps = savings_series(r.signature, r.benchmarks.back(), cfg.problem.alpha);
        }
    }
    write_backtest_files(cfg, r, out, "backtest");
}

Json cmd_reproduce(const ExperimentConfig& cfg, const fs::path& out) {
    cfg.validate();
    ensure_dir(out);
    const ExpectedSignature es = expected_signature_for(cfg);
    const PathBatch test = test_batch(cfg);

    Json es_doc;
    es_doc["config"] = cfg.to_json();
    es_doc["expected_signature"] = to_json(es);
    write_json(out / "expsig.json", es_doc);
    write_level_norms(es, out / "level_norms.csv");

    Json summary;
    summary["preset"] = cfg.name;
    summary["config"] = cfg.to_json();
    Json assumed = Json::object();
    const Json flat = cfg.to_json();
    for (const auto& field : cfg.assumed) {
        const auto dot = field.find('.');
        const Json& section = flat.at(field.substr(0, dot));
        const std::string key = field.substr(dot + 1);
        assumed[field] = section.contains(key) ? section.at(key) : Json(nullptr);
    }
    summary["assumed"] = assumed;
    summary["reference"] = cfg.reference;

    std::vector<double> sweep = cfg.phi_sweep;
    if (sweep.empty()) sweep.push_back(cfg.problem.phi);
    Json runs = Json::array();
    std::vector<std::vector<double>> curves;
    std::vector<double> grid;
    for (double phi : sweep) {
        ExperimentConfig run = cfg;
        run.problem.phi = phi;
        run.phi_sweep.clear();
        const PipelineResult r = run_pipeline(run, es, test);
        std::ostringstream stem;
        stem << "phi_" << phi;
        const std::string name = cfg.phi_sweep.empty() ? std::string("backtest") : "backtest_" + stem.str();
        write_backtest_files(run, r, out, name);
        write_json(out / (cfg.phi_sweep.empty() ? std::string("strategy.json") : "strategy_" + stem.str() + ".json"),
                   solve_json(run, r.solved));

        Json entry;
        entry["phi"] = phi;
        entry["solver"] = r.solved.report.to_json();
        entry["strategy"] = r.solved.strategy.to_json();
        entry["signature"] = stats_json(r.signature);
        for (const auto& b : r.benchmarks) entry[b.label] = stats_json(b);
        entry["speed_variation"] = r.speed_variation;
        if (!r.savings_bps.empty()) entry["mean_savings_bps"] = sample_stats(r.savings_bps).mean;
        if (!r.signature.grid.empty()) {
            grid = r.signature.grid;
            curves.push_back(r.signature.mean_inventory);
            // inventory at the grid point closest to T/2
            std::size_t mid = 0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                if (std::abs(grid[k] - 0.5 * cfg.problem.horizon) < std::abs(grid[mid] - 0.5 * cfg.problem.horizon)) {
                    mid = k;
                }
            }
            entry["mean_inventory_mid"] = r.signature.mean_inventory[mid];
        }
        if (cfg.reference.contains("signature_cost")) {
            entry["difference_to_reference"] = r.signature.cost.mean - cfg.reference.at("signature_cost").get<double>();
        }
        runs.push_back(entry);
    }
    summary["runs"] = runs;

    if (!curves.empty() && curves.size() == sweep.size()) {
        std::ofstream csv(out / "inventory_curves.csv");
        csv << std::setprecision(17) << "t";
        for (double phi : sweep) csv << ",phi_" << phi;
        csv << '\n';
        for (std::size_t k = 0; k < grid.size(); ++k) {
            csv << grid[k];
            for (const auto& c : curves) csv << ',' << c[k];
            csv << '\n';
        }
    }
    write_json(out / "summary.json", summary);
    return summary;
}

}  // namespace sigexec
