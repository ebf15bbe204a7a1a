// svip: benchmark harness for split variational inclusion solvers.
//
//   svip bench <config.json> [--problem K] [--seed S[,S...]] [--epsilon E[,E...]]
//              [--max-iter N] [--algorithms a,b,...] [--out DIR] [--verify]
//              [--workers N] [--no-timing]
//   svip verify <config.json> [same flags]
//   svip gen <kind> --m <dim> [--m2 <dim>] --seed <s>
//
// Output directory precedence: --out, then $SVIP_OUT_DIR, then "out" in the config.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "svip/bench.hpp"
#include "svip/error.hpp"
#include "svip/problems.hpp"

namespace {

using nlohmann::json;

struct Overrides {
    std::string problem;
    std::vector<std::uint64_t> seeds;
    std::vector<double> epsilons;
    std::optional<std::size_t> max_iter;
    std::vector<std::string> algorithms;
    std::string out;
    bool verify = false;
    std::optional<std::size_t> workers;
    bool no_timing = false;
};

void add_run_flags(CLI::App* cmd, std::string& config, Overrides& o) {
    cmd->add_option("config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--problem", o.problem, "problem kind");
    cmd->add_option("--seed", o.seeds, "seed list")->delimiter(',');
    cmd->add_option("--epsilon", o.epsilons, "stopping tolerances")->delimiter(',');
    cmd->add_option("--max-iter", o.max_iter, "iteration cap");
    cmd->add_option("--algorithms", o.algorithms, "alg31,alg32,alg33,byrne,long,anh")->delimiter(',');
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--workers", o.workers, "concurrent runs");
    cmd->add_flag("--no-timing", o.no_timing, "write zero elapsed times");
}

json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw svip::ConfigError("cannot read config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw svip::ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

void apply_overrides(json& doc, const Overrides& o) {
    if (!doc.is_object()) throw svip::ConfigError("config must be a JSON object");
    if (!o.problem.empty()) {
        json& p = doc["problem"];
        if (p.is_object()) {
            p["kind"] = o.problem;
        } else {
            p = json{{"kind", o.problem}};
        }
    }
    if (!o.seeds.empty()) {
        doc.erase("seed");
        doc["seeds"] = o.seeds;
    }
    if (!o.epsilons.empty()) {
        doc.erase("epsilon");
        doc["epsilons"] = o.epsilons;
    }
    if (o.max_iter) doc["max_iter"] = *o.max_iter;
    if (!o.algorithms.empty()) {
        // Keep parameter blocks of algorithms already listed in the file.
        json kept = json::array();
        for (const std::string& name : o.algorithms) {
            json entry = name;
            if (doc.contains("algorithms")) {
                for (const json& e : doc["algorithms"]) {
                    if (e.is_object() && e.value("name", "") == name) entry = e;
                }
            }
            kept.push_back(entry);
        }
        doc["algorithms"] = kept;
    }
    if (o.verify) doc["verify"] = true;
    if (o.workers) doc["workers"] = *o.workers;
    if (o.no_timing) doc["record_timing"] = false;

    if (!o.out.empty()) {
        doc["out"] = o.out;
    } else if (const char* env = std::getenv(svip::bench::kOutDirEnv); env && *env) {
        doc["out"] = env;
    }
}

int run(const std::string& config_path, Overrides o) {
    json doc = read_config(config_path);
    apply_overrides(doc, o);
    const svip::bench::BenchConfig config = svip::bench::parse_config(doc);

    const svip::bench::BenchSummary summary = svip::bench::run_benchmark(config);
    for (const auto& table : summary.tables) std::cout << svip::bench::format_table(table) << '\n';
    for (const auto& r : summary.runs) {
        if (r.termination == svip::Termination::ToleranceMet ||
            r.termination == svip::Termination::MaxIter) {
            if (r.monitor_violations == 0) continue;
        }
        std::cerr << svip::to_string(r.algorithm) << " m=" << r.m << " seed=" << r.seed
                  << " eps=" << r.epsilon << ": " << svip::to_string(r.termination);
        if (r.monitor_violations > 0) std::cerr << ", " << r.monitor_violations << " monitor violations";
        if (!r.diagnostics.empty()) std::cerr << " (" << r.diagnostics << ")";
        std::cerr << '\n';
    }
    std::cout << "results written to " << config.out_dir.string() << '\n';
    return svip::bench::exit_code(summary);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Split variational inclusion benchmark harness"};
    app.require_subcommand(1);

    std::string bench_config;
    Overrides bench_flags;
    CLI::App* bench = app.add_subcommand("bench", "run a benchmark config");
    add_run_flags(bench, bench_config, bench_flags);
    bench->add_flag("--verify", bench_flags.verify, "enable invariant monitors");

    std::string verify_config;
    Overrides verify_flags;
    CLI::App* verify = app.add_subcommand("verify", "run a config with invariant monitors on");
    add_run_flags(verify, verify_config, verify_flags);

    std::string kind;
    std::size_t m = 60;
    std::optional<std::size_t> m2;
    std::uint64_t seed = 1;
    CLI::App* gen = app.add_subcommand("gen", "print an instance recipe");
    gen->add_option("kind", kind, "example51, split-minimization, split-feasibility, inconsistent")
        ->required();
    gen->add_option("--m", m, "dimension")->required();
    gen->add_option("--m2", m2, "range dimension for rectangular kinds");
    gen->add_option("--seed", seed, "instance seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*bench) return run(bench_config, bench_flags);
        if (*verify) {
            verify_flags.verify = true;
            return run(verify_config, verify_flags);
        }
        json doc = {{"kind", kind}, {"m1", m}, {"m2", m2.value_or(m)}, {"seed", seed}};
        const svip::InstanceRecipe recipe = svip::recipe_from_json(doc);
        svip::generate(recipe);
        std::cout << svip::to_json(recipe).dump(2) << '\n';
        return 0;
    } catch (const svip::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const svip::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
