#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svip/numerics.hpp"
#include "svip/operators.hpp"
#include "svip/projections.hpp"

namespace svip {

/// Find x with 0 ∈ B1(x) and 0 ∈ B2(Ax); B1, B2 are given through their resolvents.
struct SvipProblem {
    SvipProblem(ResolventOp j1, ResolventOp j2, DenseMatrix a,
                std::optional<Vector> known_solution = std::nullopt);

    ResolventOp j1;
    ResolventOp j2;
    DenseMatrix a;
    std::optional<Vector> known_solution;

    std::size_t dim() const noexcept { return a.cols(); }
    std::size_t range_dim() const noexcept { return a.rows(); }
};

/// Parameter sequence indexed by the iteration counter n >= 1.
using Schedule = std::function<double(std::size_t n)>;

Schedule constant(double value);
/// scale / (n + 1)
Schedule harmonic(double scale = 1.0);

/// Parameters shared by the three self-adaptive projection algorithms.
struct SolverParams {
    Schedule alpha = constant(0.5);
    /// |alpha(n)| must stay below this finite bound.
    double alpha_bound = 0.5;
    Schedule beta = constant(1.0);
    Schedule sigma = constant(1.5);
    std::size_t max_iter = 300;
    double epsilon = 1e-5;
    double denom_guard = 1e-14;
    /// Run the invariant monitors (costs extra norms per iteration).
    bool verify = false;
    DykstraOptions dykstra{};
};

struct ByrneParams {
    double beta = 1.0;
    Schedule delta = harmonic();
    /// Must satisfy 0 < gamma < 2 / ||A^T A||.
    double gamma = 0.0;
    std::size_t max_iter = 300;
    double epsilon = 1e-5;
};

struct LongParams {
    double beta = 1.0;
    Schedule delta = harmonic();
    /// alpha_n = min(alpha_cap, 1 / ((n+1)^3 ||x_n - x_{n-1}||))
    double alpha_cap = 0.5;
    /// Must satisfy 0 < gamma < 1 / ||A||^2.
    double gamma = 0.0;
    VectorMap contraction = [](const Vector& x) { return 0.8 * x; };
    double contraction_coefficient = 0.8;
    std::size_t max_iter = 300;
    double epsilon = 1e-5;
};

struct AnhParams {
    double beta = 1.0;
    Schedule theta = harmonic();
    /// delta_n, with 0 < delta_n < 1 - theta_n.
    Schedule delta = [](std::size_t n) { return 0.2 * (1.0 - 1.0 / static_cast<double>(n + 1)); };
    double alpha_cap = 0.5;
    /// Must satisfy 0 < gamma < 1 / ||A||^2.
    double gamma = 0.0;
    std::size_t max_iter = 300;
    double epsilon = 1e-5;
};

/// Parameter settings of the randomized example51 benchmark for the baselines.
ByrneParams default_byrne_params(const SvipProblem& p);
LongParams default_long_params(const SvipProblem& p);
AnhParams default_anh_params(const SvipProblem& p);

struct IterationRecord {
    std::size_t n = 0;
    Vector x;
    Vector z;
    Vector u;
    double gamma = 0.0;
    /// gamma (2 ||r||^2 - gamma ||s||^2), the guaranteed decrease of the step.
    double theta = 0.0;
    std::optional<double> error_to_solution;
    double residual = 0.0;
    double elapsed_ms = 0.0;
    std::optional<std::size_t> projection_sweeps;
};

enum class Termination { ToleranceMet, MaxIter, InfeasibleSet, NumericalFailure };

std::string_view to_string(Termination t);

struct MonitorViolation {
    std::size_t n = 0;
    std::string invariant;
    double amount = 0.0;
};

struct RunResult {
    std::vector<IterationRecord> records;
    Termination termination = Termination::MaxIter;
    Vector final_x;
    std::string diagnostics;
    std::vector<MonitorViolation> violations;

    std::size_t iterations() const noexcept { return records.size(); }
};

/// z = x_n + alpha (x_n - x_prev)
Vector inertial_extrapolate(const Vector& x_n, const Vector& x_prev, double alpha);

struct StepsizeResult {
    double gamma = 0.0;
    /// (I - J2)(A z)
    Vector r;
    /// A^T r
    Vector s;
};

/// Self-adaptive stepsize gamma = sigma ||r||^2 / ||s||^2, or 0 when A z is numerically a
/// zero of B2 (||r|| <= guard (1 + ||Az||)) or ||s||^2 <= guard.
StepsizeResult adaptive_stepsize(const DenseMatrix& a, const ResolventOp& j2, double beta,
                                 double sigma, const Vector& z, double guard = 1e-14);

/// gamma (2 ||r||^2 - gamma ||s||^2)
double theta(double gamma, const Vector& r, const Vector& s);

struct StepCore {
    Vector u;
    double gamma = 0.0;
    double theta = 0.0;
    Vector r;
    Vector s;
};

/// u = J1(beta, z - gamma A^T (I - J2) A z) with the self-adaptive gamma.
StepCore svip_step_core(const SvipProblem& p, double beta, double sigma, const Vector& z,
                        double guard = 1e-14);

/// ||x - J1(beta, x)|| + ||(I - J2(beta, .))(A x)||
double residual(const SvipProblem& p, const Vector& x, double beta);

/// Inertial hybrid projection: x_{n+1} = P_{C_n ∩ Q_n} x_1.
RunResult run_alg31_hybrid(const SvipProblem& p, const SolverParams& params, const Vector& x0,
                           const Vector& x1);
/// Inertial shrinking projection of the anchor: x_{n+1} = P_{C_{n+1}} x_1.
RunResult run_alg32_shrinking_anchor(const SvipProblem& p, const SolverParams& params,
                                     const Vector& x0, const Vector& x1);
/// Inertial shrinking projection of the previous iterate: x_{n+1} = P_{C_{n+1}} x_n.
RunResult run_alg33_shrinking_previous(const SvipProblem& p, const SolverParams& params,
                                       const Vector& x0, const Vector& x1);

/// Halpern-anchored forward-backward step (no inertia).
RunResult run_byrne_halpern(const SvipProblem& p, const ByrneParams& params, const Vector& x1);
/// Inertial viscosity iteration x_{n+1} = delta_n f(x_n) + (1 - delta_n) u_n.
RunResult run_long_viscosity(const SvipProblem& p, const LongParams& params, const Vector& x0,
                             const Vector& x1);
/// Inertial Mann iteration x_{n+1} = (1 - delta_n - theta_n) x_n + delta_n u_n.
RunResult run_anh_mann(const SvipProblem& p, const AnhParams& params, const Vector& x0,
                       const Vector& x1);

enum class Algorithm { Alg31Hybrid, Alg32ShrinkingAnchor, Alg33ShrinkingPrevious, Byrne, Long, Anh };

std::string_view to_string(Algorithm a);
/// Parses the short names alg31, alg32, alg33, byrne, long, anh.
std::optional<Algorithm> parse_algorithm(std::string_view name);
/// Display name used in summary tables.
std::string_view display_name(Algorithm a);

}  // namespace svip
