#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "svip/problems.hpp"
#include "svip/solvers.hpp"

namespace svip::bench {

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutDirEnv = "SVIP_OUT_DIR";

/// One algorithm with its validated parameter block.
struct AlgorithmSpec {
    Algorithm algorithm = Algorithm::Alg33ShrinkingPrevious;
    nlohmann::json params = nlohmann::json::object();
};

struct BenchConfig {
    /// Kind and dimensions; the seed is replaced per run.
    InstanceRecipe problem;
    std::vector<std::uint64_t> seeds{1};
    /// Dimension sweep for square instances. Empty means problem.m1 only.
    std::vector<std::size_t> dims;
    std::vector<AlgorithmSpec> algorithms;
    std::vector<double> epsilons{1e-5};
    std::size_t max_iter = 300;
    std::filesystem::path out_dir = "svip-results";
    bool verify = false;
    /// When false, elapsed-time fields are written as zero so outputs are byte-reproducible.
    bool record_timing = true;
    std::size_t workers = 1;
    std::optional<Vector> x0;
    std::optional<Vector> x1;
};

/// Parses and validates a config document. Throws ConfigError before any run starts.
BenchConfig parse_config(const nlohmann::json& doc);
BenchConfig load_config(const std::filesystem::path& path);
/// Re-checks every algorithm block and list; throws ConfigError.
void validate(const BenchConfig& config);

/// Parameter block defaults for the Example 5.1 settings.
nlohmann::json default_params(Algorithm a);

struct RunSummary {
    Algorithm algorithm = Algorithm::Alg33ShrinkingPrevious;
    std::uint64_t seed = 0;
    std::size_t m = 0;
    double epsilon = 0.0;
    std::size_t iterations = 0;
    Termination termination = Termination::MaxIter;
    std::optional<double> final_error;
    double final_residual = 0.0;
    std::string trace_file;
    std::string diagnostics;
    std::size_t monitor_violations = 0;
    double wall_ms = 0.0;

    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

/// Termination iterations, rows = algorithms and columns = epsilons, for one (m, seed).
struct TerminationTable {
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::vector<Algorithm> algorithms;
    std::vector<double> epsilons;
    /// Empty cells belong to runs that failed.
    std::vector<std::vector<std::optional<std::size_t>>> iterations;

    friend bool operator==(const TerminationTable&, const TerminationTable&) = default;
};

struct BenchSummary {
    InstanceRecipe problem;
    std::size_t max_iter = 300;
    std::vector<RunSummary> runs;
    std::vector<TerminationTable> tables;

    friend bool operator==(const BenchSummary&, const BenchSummary&) = default;
};

/// Runs one algorithm on one instance with the parameter block of `spec`.
RunResult run_algorithm(const AlgorithmSpec& spec, const SvipProblem& problem, const Vector& x0,
                        const Vector& x1, double epsilon, std::size_t max_iter, bool verify);

/// Executes every (dim, seed, algorithm, epsilon) run, writes one CSV trace per run into
/// <out>/traces and <out>/summary.json, and returns the summary.
BenchSummary run_benchmark(const BenchConfig& config);

/// One CSV row, as written.
struct TraceRow {
    std::size_t n = 0;
    std::optional<double> error;
    double residual = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    double elapsed_ms = 0.0;
    std::optional<std::size_t> projection_sweeps;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

inline constexpr const char* kTraceHeader =
    "n,E_n,residual,gamma_n,theta_n,elapsed_ms,projection_sweeps";

std::vector<TraceRow> trace_rows(const RunResult& result, bool record_timing = true);
void emit_trace_csv(const RunResult& result, const std::filesystem::path& path,
                    bool record_timing = true);
std::vector<TraceRow> parse_trace_csv(const std::filesystem::path& path);

nlohmann::json summary_to_json(const BenchSummary& summary, bool record_timing = true);
BenchSummary summary_from_json(const nlohmann::json& doc);
void emit_summary_json(const BenchSummary& summary, const std::filesystem::path& path,
                       bool record_timing = true);

/// Builds the tables from the run list (runs grouped by (m, seed)).
std::vector<TerminationTable> build_tables(const std::vector<RunSummary>& runs);
std::string format_table(const TerminationTable& table);

/// 0 ok, 3 numerical failure or monitor violation, 4 infeasibility.
int exit_code(const BenchSummary& summary);

}  // namespace svip::bench
