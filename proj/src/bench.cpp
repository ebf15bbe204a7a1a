#include "svip/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "svip/error.hpp"

namespace svip::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double number(const json& params, const char* key) {
    const auto& v = params.at(key);
    if (!v.is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(std::string("parameter '") + key + "' must be finite");
    return d;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

/// Fills defaults, rejects unknown keys and checks the parameter windows.
json checked_params(Algorithm a, const json& given) {
    json merged = default_params(a);
    if (!given.is_null()) {
        require(given.is_object(), "algorithm parameters must be a JSON object");
        for (const auto& [key, value] : given.items()) {
            require(merged.contains(key), "unknown parameter '" + key + "' for algorithm " +
                                              std::string(to_string(a)));
            merged[key] = value;
        }
    }
    const std::string name(to_string(a));
    switch (a) {
        case Algorithm::Alg31Hybrid:
        case Algorithm::Alg32ShrinkingAnchor:
        case Algorithm::Alg33ShrinkingPrevious: {
            number(merged, "alpha");
            const double beta = number(merged, "beta");
            const double sigma = number(merged, "sigma");
            require(beta > 0.0, name + ": beta must be positive");
            require(sigma > 0.0 && sigma < 2.0, name + ": sigma must lie in (0, 2)");
            require(number(merged, "dykstra_tol") > 0.0, name + ": dykstra_tol must be positive");
            require(number(merged, "max_sweeps") >= 1.0, name + ": max_sweeps must be >= 1");
            break;
        }
        case Algorithm::Byrne: {
            require(number(merged, "beta") > 0.0, name + ": beta must be positive");
            const double g = number(merged, "gamma_scale");
            require(g > 0.0 && g < 2.0, name + ": gamma_scale must lie in (0, 2)");
            const double d = number(merged, "delta_scale");
            require(d > 0.0 && d < 2.0, name + ": delta_scale must lie in (0, 2)");
            break;
        }
        case Algorithm::Long: {
            require(number(merged, "beta") > 0.0, name + ": beta must be positive");
            require(number(merged, "alpha") >= 0.0, name + ": alpha must be nonnegative");
            const double g = number(merged, "gamma_scale");
            require(g > 0.0 && g < 1.0, name + ": gamma_scale must lie in (0, 1)");
            const double d = number(merged, "delta_scale");
            require(d > 0.0 && d < 2.0, name + ": delta_scale must lie in (0, 2)");
            const double k = number(merged, "contraction");
            require(k >= 0.0 && k < 1.0, name + ": contraction must lie in [0, 1)");
            break;
        }
        case Algorithm::Anh: {
            require(number(merged, "beta") > 0.0, name + ": beta must be positive");
            require(number(merged, "alpha") >= 0.0, name + ": alpha must be nonnegative");
            const double g = number(merged, "gamma_scale");
            require(g > 0.0 && g < 1.0, name + ": gamma_scale must lie in (0, 1)");
            const double t = number(merged, "theta_scale");
            require(t > 0.0 && t < 2.0, name + ": theta_scale must lie in (0, 2)");
            const double d = number(merged, "delta_factor");
            require(d > 0.0 && d < 1.0, name + ": delta_factor must lie in (0, 1)");
            break;
        }
    }
    return merged;
}

template <typename T>
std::vector<T> scalar_or_list(const json& doc, const char* list_key, const char* scalar_key) {
    if (doc.contains(list_key)) {
        require(doc[list_key].is_array() && !doc[list_key].empty(),
                std::string("'") + list_key + "' must be a nonempty array");
        return doc[list_key].get<std::vector<T>>();
    }
    if (doc.contains(scalar_key)) return {doc[scalar_key].get<T>()};
    return {};
}

/// Counts must be nonnegative integers; the json getters would wrap negative values.
bool is_count(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

void require_counts(const json& doc) {
    for (const char* key : {"seed", "seeds", "dims", "max_iter", "workers"}) {
        if (!doc.contains(key)) continue;
        const json& v = doc[key];
        const bool ok = v.is_array() ? std::all_of(v.begin(), v.end(),
                                                   is_count)
                                     : is_count(v);
        require(ok, std::string("'") + key + "' must hold nonnegative integers");
    }
}

Vector vector_from_json(const json& v, const char* what) {
    require(v.is_array(), std::string("'") + what + "' must be an array of numbers");
    return Vector(v.get<std::vector<double>>());
}

std::string trace_name(const InstanceRecipe& recipe, Algorithm a, double epsilon) {
    return std::string(to_string(recipe.kind)) + "_m" + std::to_string(recipe.m1) + "_seed" +
           std::to_string(recipe.seed) + "_" + std::string(to_string(a)) + "_eps" +
           short_double(epsilon) + ".csv";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << content;
    out.close();
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

json default_params(Algorithm a) {
    switch (a) {
        case Algorithm::Alg31Hybrid:
        case Algorithm::Alg32ShrinkingAnchor:
        case Algorithm::Alg33ShrinkingPrevious:
            return {{"alpha", 0.5}, {"beta", 1.0}, {"sigma", 1.5}, {"dykstra_tol", 1e-12},
                    {"max_sweeps", 10000}};
        case Algorithm::Byrne:
            return {{"beta", 1.0}, {"gamma_scale", 1.5}, {"delta_scale", 1.0}};
        case Algorithm::Long:
            return {{"beta", 1.0}, {"alpha", 0.5}, {"gamma_scale", 0.5}, {"delta_scale", 1.0},
                    {"contraction", 0.8}};
        case Algorithm::Anh:
            return {{"beta", 1.0}, {"alpha", 0.5}, {"gamma_scale", 0.5}, {"theta_scale", 1.0},
                    {"delta_factor", 0.2}};
    }
    return json::object();
}

BenchConfig parse_config(const json& doc) {
    require(doc.is_object(), "config must be a JSON object");
    static const std::set<std::string> known = {
        "problem", "seed", "seeds", "dims", "algorithms", "epsilon", "epsilons", "max_iter",
        "out", "verify", "record_timing", "workers", "x0", "x1", "description"};
    for (const auto& [key, value] : doc.items()) {
        require(known.count(key) == 1, "unknown config key '" + key + "'");
    }

    require_counts(doc);
    BenchConfig config;
    try {
        if (doc.contains("problem")) {
            const json& p = doc["problem"];
            config.problem = recipe_from_json(p.is_string() ? json{{"kind", p}} : p);
        }
        auto seeds = scalar_or_list<std::uint64_t>(doc, "seeds", "seed");
        if (!seeds.empty()) config.seeds = std::move(seeds);
        if (doc.contains("dims")) config.dims = doc["dims"].get<std::vector<std::size_t>>();
        auto eps = scalar_or_list<double>(doc, "epsilons", "epsilon");
        if (!eps.empty()) config.epsilons = std::move(eps);
        config.max_iter = doc.value("max_iter", config.max_iter);
        config.out_dir = doc.value("out", config.out_dir.string());
        config.verify = doc.value("verify", false);
        config.record_timing = doc.value("record_timing", true);
        config.workers = doc.value("workers", std::size_t{1});
        if (doc.contains("x0")) config.x0 = vector_from_json(doc["x0"], "x0");
        if (doc.contains("x1")) config.x1 = vector_from_json(doc["x1"], "x1");

        if (doc.contains("algorithms")) {
            require(doc["algorithms"].is_array(), "'algorithms' must be an array");
            for (const json& entry : doc["algorithms"]) {
                AlgorithmSpec spec;
                std::string name;
                json params;
                if (entry.is_string()) {
                    name = entry.get<std::string>();
                } else {
                    require(entry.is_object() && entry.contains("name"),
                            "algorithm entries must be names or {\"name\": ..., \"params\": {...}}");
                    name = entry["name"].get<std::string>();
                    if (entry.contains("params")) params = entry["params"];
                }
                const auto a = parse_algorithm(name);
                require(a.has_value(), "unknown algorithm '" + name + "'");
                spec.algorithm = *a;
                spec.params = std::move(params);
                config.algorithms.push_back(std::move(spec));
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    validate(config);
    return config;
}

BenchConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

void validate(const BenchConfig& config) {
    require(!config.algorithms.empty(), "config needs at least one algorithm");
    require(!config.epsilons.empty(), "config needs at least one epsilon");
    require(!config.seeds.empty(), "config needs at least one seed");
    require(config.max_iter >= 1, "max_iter must be >= 1");
    require(config.workers >= 1, "workers must be >= 1");
    for (double e : config.epsilons) require(e > 0.0 && std::isfinite(e), "epsilons must be positive");
    for (std::size_t m : config.dims) require(m >= 1, "dims must be >= 1");
    require(config.dims.empty() || config.problem.kind == ProblemKind::Example51 ||
                config.problem.kind == ProblemKind::Inconsistent,
            "dimension sweeps are only supported for square instances");
    for (const AlgorithmSpec& spec : config.algorithms) {
        try {
            checked_params(spec.algorithm, spec.params);
        } catch (const json::exception& e) {
            throw ConfigError(std::string(to_string(spec.algorithm)) + ": " + e.what());
        }
    }
    const std::vector<std::size_t> dims =
        config.dims.empty() ? std::vector<std::size_t>{config.problem.m1} : config.dims;
    for (const auto* start : {&config.x0, &config.x1}) {
        if (!*start) continue;
        require(start->value().all_finite(), "starting points must be finite");
        for (std::size_t m : dims) {
            require(start->value().size() == m,
                    "starting point dimension " + std::to_string(start->value().size()) +
                        " does not match instance dimension " + std::to_string(m));
        }
    }
}

RunResult run_algorithm(const AlgorithmSpec& spec, const SvipProblem& problem, const Vector& x0,
                        const Vector& x1, double epsilon, std::size_t max_iter, bool verify) {
    const json params = checked_params(spec.algorithm, spec.params);
    switch (spec.algorithm) {
        case Algorithm::Alg31Hybrid:
        case Algorithm::Alg32ShrinkingAnchor:
        case Algorithm::Alg33ShrinkingPrevious: {
            SolverParams sp;
            const double alpha = params["alpha"].get<double>();
            sp.alpha = constant(alpha);
            sp.alpha_bound = std::abs(alpha);
            sp.beta = constant(params["beta"].get<double>());
            sp.sigma = constant(params["sigma"].get<double>());
            sp.max_iter = max_iter;
            sp.epsilon = epsilon;
            sp.verify = verify;
            sp.dykstra.tol = params["dykstra_tol"].get<double>();
            sp.dykstra.max_sweeps = params["max_sweeps"].get<std::size_t>();
            if (spec.algorithm == Algorithm::Alg31Hybrid) return run_alg31_hybrid(problem, sp, x0, x1);
            if (spec.algorithm == Algorithm::Alg32ShrinkingAnchor) {
                return run_alg32_shrinking_anchor(problem, sp, x0, x1);
            }
            return run_alg33_shrinking_previous(problem, sp, x0, x1);
        }
        case Algorithm::Byrne: {
            ByrneParams bp = default_byrne_params(problem);
            bp.gamma *= params["gamma_scale"].get<double>() / 1.5;
            bp.beta = params["beta"].get<double>();
            bp.delta = harmonic(params["delta_scale"].get<double>());
            bp.max_iter = max_iter;
            bp.epsilon = epsilon;
            return run_byrne_halpern(problem, bp, x1);
        }
        case Algorithm::Long: {
            LongParams lp = default_long_params(problem);
            lp.gamma *= params["gamma_scale"].get<double>() / 0.5;
            lp.beta = params["beta"].get<double>();
            lp.alpha_cap = params["alpha"].get<double>();
            lp.delta = harmonic(params["delta_scale"].get<double>());
            const double k = params["contraction"].get<double>();
            lp.contraction = [k](const Vector& x) { return k * x; };
            lp.contraction_coefficient = k;
            lp.max_iter = max_iter;
            lp.epsilon = epsilon;
            return run_long_viscosity(problem, lp, x0, x1);
        }
        case Algorithm::Anh: {
            AnhParams ap = default_anh_params(problem);
            ap.gamma *= params["gamma_scale"].get<double>() / 0.5;
            ap.beta = params["beta"].get<double>();
            ap.alpha_cap = params["alpha"].get<double>();
            const double theta_scale = params["theta_scale"].get<double>();
            const double delta_factor = params["delta_factor"].get<double>();
            ap.theta = harmonic(theta_scale);
            ap.delta = [theta_scale, delta_factor](std::size_t n) {
                return delta_factor * (1.0 - theta_scale / static_cast<double>(n + 1));
            };
            ap.max_iter = max_iter;
            ap.epsilon = epsilon;
            return run_anh_mann(problem, ap, x0, x1);
        }
    }
    throw ContractError("run_algorithm: unknown algorithm");
}

std::vector<TraceRow> trace_rows(const RunResult& result, bool record_timing) {
    std::vector<TraceRow> rows;
    rows.reserve(result.records.size());
    for (const IterationRecord& rec : result.records) {
        rows.push_back({rec.n, rec.error_to_solution, rec.residual, rec.gamma, rec.theta,
                        record_timing ? rec.elapsed_ms : 0.0, rec.projection_sweeps});
    }
    return rows;
}

void emit_trace_csv(const RunResult& result, const fs::path& path, bool record_timing) {
    std::string out = std::string(kTraceHeader) + "\n";
    for (const TraceRow& row : trace_rows(result, record_timing)) {
        out += std::to_string(row.n);
        out += ',';
        if (row.error) out += format_double(*row.error);
        out += ',' + format_double(row.residual);
        out += ',' + format_double(row.gamma);
        out += ',' + format_double(row.theta);
        out += ',' + format_double(row.elapsed_ms);
        out += ',';
        if (row.projection_sweeps) out += std::to_string(*row.projection_sweeps);
        out += '\n';
    }
    write_file(path, out);
}

std::vector<TraceRow> parse_trace_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open trace '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) {
        throw Error("trace '" + path.string() + "' has an unexpected header");
    }
    std::vector<TraceRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (fields.size() != 7) {
            throw Error("trace '" + path.string() + "' line " + std::to_string(line_no) +
                        ": expected 7 fields");
        }
        auto to_double = [&](const std::string& s) {
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size()) {
                throw Error("trace '" + path.string() + "' line " + std::to_string(line_no) +
                            ": bad number '" + s + "'");
            }
            return v;
        };
        TraceRow row;
        row.n = static_cast<std::size_t>(std::stoull(fields[0]));
        if (!fields[1].empty()) row.error = to_double(fields[1]);
        row.residual = to_double(fields[2]);
        row.gamma = to_double(fields[3]);
        row.theta = to_double(fields[4]);
        row.elapsed_ms = to_double(fields[5]);
        if (!fields[6].empty()) row.projection_sweeps = static_cast<std::size_t>(std::stoull(fields[6]));
        rows.push_back(row);
    }
    return rows;
}

std::vector<TerminationTable> build_tables(const std::vector<RunSummary>& runs) {
    std::map<std::pair<std::size_t, std::uint64_t>, TerminationTable> by_instance;
    std::vector<std::pair<std::size_t, std::uint64_t>> order;
    for (const RunSummary& run : runs) {
        const auto key = std::make_pair(run.m, run.seed);
        auto [it, inserted] = by_instance.try_emplace(key);
        TerminationTable& table = it->second;
        if (inserted) {
            order.push_back(key);
            table.m = run.m;
            table.seed = run.seed;
        }
        if (std::find(table.algorithms.begin(), table.algorithms.end(), run.algorithm) ==
            table.algorithms.end()) {
            table.algorithms.push_back(run.algorithm);
        }
        if (std::find(table.epsilons.begin(), table.epsilons.end(), run.epsilon) == table.epsilons.end()) {
            table.epsilons.push_back(run.epsilon);
        }
    }
    for (auto& [key, table] : by_instance) {
        table.iterations.assign(table.algorithms.size(),
                                std::vector<std::optional<std::size_t>>(table.epsilons.size()));
    }
    for (const RunSummary& run : runs) {
        TerminationTable& table = by_instance[{run.m, run.seed}];
        const auto row = static_cast<std::size_t>(
            std::find(table.algorithms.begin(), table.algorithms.end(), run.algorithm) -
            table.algorithms.begin());
        const auto col = static_cast<std::size_t>(
            std::find(table.epsilons.begin(), table.epsilons.end(), run.epsilon) - table.epsilons.begin());
        if (run.termination == Termination::ToleranceMet || run.termination == Termination::MaxIter) {
            table.iterations[row][col] = run.iterations;
        }
    }
    std::vector<TerminationTable> out;
    for (const auto& key : order) out.push_back(std::move(by_instance[key]));
    return out;
}

std::string format_table(const TerminationTable& table) {
    std::ostringstream os;
    os << "Termination iterations (m = " << table.m << ", seed = " << table.seed << ")\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-32s", "algorithm");
    os << buf;
    for (double e : table.epsilons) {
        std::snprintf(buf, sizeof buf, "%12s", ("eps=" + short_double(e)).c_str());
        os << buf;
    }
    os << '\n';
    for (std::size_t r = 0; r < table.algorithms.size(); ++r) {
        std::snprintf(buf, sizeof buf, "%-32s", std::string(display_name(table.algorithms[r])).c_str());
        os << buf;
        for (const auto& cell : table.iterations[r]) {
            std::snprintf(buf, sizeof buf, "%12s", cell ? std::to_string(*cell).c_str() : "failed");
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

json summary_to_json(const BenchSummary& summary, bool record_timing) {
    json runs = json::array();
    json timing = json::array();
    for (std::size_t i = 0; i < summary.runs.size(); ++i) {
        const RunSummary& r = summary.runs[i];
        runs.push_back({
            {"algorithm", std::string(to_string(r.algorithm))},
            {"seed", r.seed},
            {"m", r.m},
            {"epsilon", r.epsilon},
            {"iterations", r.iterations},
            {"termination", std::string(to_string(r.termination))},
            {"final_error", r.final_error ? json(*r.final_error) : json(nullptr)},
            {"final_residual", r.final_residual},
            {"trace", r.trace_file},
            {"diagnostics", r.diagnostics},
            {"monitor_violations", r.monitor_violations},
        });
        timing.push_back({{"run", i}, {"wall_ms", record_timing ? r.wall_ms : 0.0}});
    }
    json tables = json::array();
    for (const TerminationTable& t : summary.tables) {
        json algs = json::array();
        for (Algorithm a : t.algorithms) algs.push_back(std::string(to_string(a)));
        json cells = json::array();
        for (const auto& row : t.iterations) {
            json jr = json::array();
            for (const auto& c : row) jr.push_back(c ? json(*c) : json(nullptr));
            cells.push_back(std::move(jr));
        }
        tables.push_back({{"m", t.m}, {"seed", t.seed}, {"algorithms", algs},
                          {"epsilons", t.epsilons}, {"iterations", cells}});
    }
    return {
        {"format", "svip-bench-summary/1"},
        {"problem", to_json(summary.problem)},
        {"max_iter", summary.max_iter},
        {"runs", runs},
        {"tables", tables},
        {"timing", timing},
    };
}

BenchSummary summary_from_json(const json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "svip-bench-summary/1") {
            throw Error("unsupported summary format");
        }
        BenchSummary s;
        s.problem = recipe_from_json(doc.at("problem"));
        s.max_iter = doc.at("max_iter").get<std::size_t>();
        std::vector<double> wall;
        for (const json& t : doc.at("timing")) wall.push_back(t.at("wall_ms").get<double>());
        for (std::size_t i = 0; i < doc.at("runs").size(); ++i) {
            const json& r = doc.at("runs")[i];
            RunSummary run;
            const auto a = parse_algorithm(r.at("algorithm").get<std::string>());
            if (!a) throw Error("unknown algorithm in summary");
            run.algorithm = *a;
            run.seed = r.at("seed").get<std::uint64_t>();
            run.m = r.at("m").get<std::size_t>();
            run.epsilon = r.at("epsilon").get<double>();
            run.iterations = r.at("iterations").get<std::size_t>();
            const std::string tag = r.at("termination").get<std::string>();
            bool found = false;
            for (auto t : {Termination::ToleranceMet, Termination::MaxIter, Termination::InfeasibleSet,
                           Termination::NumericalFailure}) {
                if (to_string(t) == tag) {
                    run.termination = t;
                    found = true;
                }
            }
            if (!found) throw Error("unknown termination tag '" + tag + "'");
            if (!r.at("final_error").is_null()) run.final_error = r.at("final_error").get<double>();
            run.final_residual = r.at("final_residual").get<double>();
            run.trace_file = r.at("trace").get<std::string>();
            run.diagnostics = r.at("diagnostics").get<std::string>();
            run.monitor_violations = r.at("monitor_violations").get<std::size_t>();
            run.wall_ms = i < wall.size() ? wall[i] : 0.0;
            s.runs.push_back(std::move(run));
        }
        for (const json& t : doc.at("tables")) {
            TerminationTable table;
            table.m = t.at("m").get<std::size_t>();
            table.seed = t.at("seed").get<std::uint64_t>();
            for (const json& a : t.at("algorithms")) {
                const auto parsed = parse_algorithm(a.get<std::string>());
                if (!parsed) throw Error("unknown algorithm in table");
                table.algorithms.push_back(*parsed);
            }
            table.epsilons = t.at("epsilons").get<std::vector<double>>();
            for (const json& row : t.at("iterations")) {
                std::vector<std::optional<std::size_t>> cells;
                for (const json& c : row) {
                    cells.push_back(c.is_null() ? std::nullopt
                                                : std::optional<std::size_t>(c.get<std::size_t>()));
                }
                table.iterations.push_back(std::move(cells));
            }
            s.tables.push_back(std::move(table));
        }
        return s;
    } catch (const json::exception& e) {
        throw Error(std::string("summary: ") + e.what());
    }
}

void emit_summary_json(const BenchSummary& summary, const fs::path& path, bool record_timing) {
    write_file(path, summary_to_json(summary, record_timing).dump(2) + "\n");
}

BenchSummary run_benchmark(const BenchConfig& config) {
    validate(config);
    const fs::path trace_dir = config.out_dir / "traces";
    std::error_code ec;
    fs::create_directories(trace_dir, ec);
    if (ec) throw Error("cannot create '" + trace_dir.string() + "': " + ec.message());

    struct Job {
        InstanceRecipe recipe;
        std::size_t algorithm_index;
        double epsilon;
    };
    const std::vector<std::size_t> dims =
        config.dims.empty() ? std::vector<std::size_t>{config.problem.m1} : config.dims;
    std::vector<InstanceRecipe> recipes;
    std::vector<Job> jobs;
    for (std::size_t m : dims) {
        for (std::uint64_t seed : config.seeds) {
            InstanceRecipe recipe = config.problem;
            recipe.seed = seed;
            if (!config.dims.empty()) recipe.m1 = recipe.m2 = m;
            recipes.push_back(recipe);
            for (std::size_t a = 0; a < config.algorithms.size(); ++a)
                for (double eps : config.epsilons) jobs.push_back({recipe, a, eps});
        }
    }

    // Instances are generated up front and shared read-only between workers.
    std::map<std::pair<std::size_t, std::uint64_t>, SvipProblem> instances;
    for (const InstanceRecipe& r : recipes) instances.emplace(std::make_pair(r.m1, r.seed), generate(r));

    std::vector<RunSummary> runs(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            const AlgorithmSpec& spec = config.algorithms[job.algorithm_index];
            RunSummary& summary = runs[i];
            summary.algorithm = spec.algorithm;
            summary.seed = job.recipe.seed;
            summary.m = job.recipe.m1;
            summary.epsilon = job.epsilon;
            const fs::path trace = trace_dir / trace_name(job.recipe, spec.algorithm, job.epsilon);
            summary.trace_file = fs::relative(trace, config.out_dir).generic_string();
            try {
                const SvipProblem& problem = instances.at({job.recipe.m1, job.recipe.seed});
                auto [x0, x1] = default_starting_points(job.recipe);
                if (config.x0) x0 = *config.x0;
                if (config.x1) x1 = *config.x1;
                RunResult result = run_algorithm(spec, problem, x0, x1, job.epsilon,
                                                 config.max_iter, config.verify);
                summary.iterations = result.iterations();
                summary.termination = result.termination;
                const IterationRecord& last = result.records.back();
                summary.final_error = last.error_to_solution;
                summary.final_residual = last.residual;
                summary.diagnostics = result.diagnostics;
                summary.monitor_violations = result.violations.size();
                if (config.record_timing) {
                    for (const IterationRecord& rec : result.records) summary.wall_ms += rec.elapsed_ms;
                }
                emit_trace_csv(result, trace, config.record_timing);
            } catch (const std::exception& e) {
                summary.termination = Termination::NumericalFailure;
                summary.diagnostics = e.what();
            }
        }
    };
    const std::size_t n_workers = std::min(config.workers, std::max<std::size_t>(jobs.size(), 1));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }

    BenchSummary summary;
    summary.problem = config.problem;
    summary.problem.seed = config.seeds.front();
    summary.max_iter = config.max_iter;
    summary.runs = std::move(runs);
    summary.tables = build_tables(summary.runs);
    emit_summary_json(summary, config.out_dir / "summary.json", config.record_timing);
    return summary;
}

int exit_code(const BenchSummary& summary) {
    bool infeasible = false;
    bool failed = false;
    for (const RunSummary& r : summary.runs) {
        infeasible |= r.termination == Termination::InfeasibleSet;
        failed |= r.termination == Termination::NumericalFailure || r.monitor_violations > 0;
    }
    if (infeasible) return 4;
    if (failed) return 3;
    return 0;
}

}  // namespace svip::bench
