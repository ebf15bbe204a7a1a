#include "svip/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "svip/error.hpp"

namespace svip {

SvipProblem::SvipProblem(ResolventOp j1_, ResolventOp j2_, DenseMatrix a_,
                         std::optional<Vector> known_solution_)
    : j1(std::move(j1_)), j2(std::move(j2_)), a(std::move(a_)),
      known_solution(std::move(known_solution_)) {
    if (j1.dim() != a.cols() || j2.dim() != a.rows()) {
        throw ContractError("SvipProblem: resolvent dimensions do not match the linear map");
    }
    if (known_solution && known_solution->size() != a.cols()) {
        throw ContractError("SvipProblem: known solution has the wrong dimension");
    }
}

Schedule constant(double value) {
    return [value](std::size_t) { return value; };
}

Schedule harmonic(double scale) {
    return [scale](std::size_t n) { return scale / static_cast<double>(n + 1); };
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::ToleranceMet: return "tolerance-met";
        case Termination::MaxIter: return "max-iter";
        case Termination::InfeasibleSet: return "infeasible-set";
        case Termination::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Alg31Hybrid: return "alg31";
        case Algorithm::Alg32ShrinkingAnchor: return "alg32";
        case Algorithm::Alg33ShrinkingPrevious: return "alg33";
        case Algorithm::Byrne: return "byrne";
        case Algorithm::Long: return "long";
        case Algorithm::Anh: return "anh";
    }
    return "unknown";
}

std::string_view display_name(Algorithm a) {
    switch (a) {
        case Algorithm::Alg31Hybrid: return "Alg 3.1 (hybrid)";
        case Algorithm::Alg32ShrinkingAnchor: return "Alg 3.2 (shrinking, anchor)";
        case Algorithm::Alg33ShrinkingPrevious: return "Alg 3.3 (shrinking, previous)";
        case Algorithm::Byrne: return "Byrne et al. (Halpern)";
        case Algorithm::Long: return "Long et al. (viscosity)";
        case Algorithm::Anh: return "Anh et al. (Mann)";
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::Alg31Hybrid, Algorithm::Alg32ShrinkingAnchor,
                   Algorithm::Alg33ShrinkingPrevious, Algorithm::Byrne, Algorithm::Long,
                   Algorithm::Anh}) {
        if (to_string(a) == name) return a;
    }
    return std::nullopt;
}

Vector inertial_extrapolate(const Vector& x_n, const Vector& x_prev, double alpha) {
    if (x_n.size() != x_prev.size()) throw ContractError("inertial_extrapolate: dimension mismatch");
    Vector z = x_n;
    if (alpha != 0.0) z.axpy(alpha, x_n - x_prev);
    return z;
}

StepsizeResult adaptive_stepsize(const DenseMatrix& a, const ResolventOp& j2, double beta,
                                 double sigma, const Vector& z, double guard) {
    if (!(sigma > 0.0 && sigma < 2.0)) throw ConfigError("adaptive_stepsize: sigma must lie in (0, 2)");
    if (!(beta > 0.0)) throw ConfigError("adaptive_stepsize: beta must be positive");
    const Vector az = apply(a, z);
    StepsizeResult out;
    out.r = az - j2(beta, az);
    out.s = apply_adjoint(a, out.r);
    const double r_sq = norm_sq(out.r);
    const double s_sq = norm_sq(out.s);
    if (std::sqrt(r_sq) <= guard * (1.0 + norm(az)) || s_sq <= guard) {
        out.gamma = 0.0;
    } else {
        out.gamma = sigma * r_sq / s_sq;
    }
    return out;
}

double theta(double gamma, const Vector& r, const Vector& s) {
    return gamma * (2.0 * norm_sq(r) - gamma * norm_sq(s));
}

StepCore svip_step_core(const SvipProblem& p, double beta, double sigma, const Vector& z,
                        double guard) {
    StepsizeResult step = adaptive_stepsize(p.a, p.j2, beta, sigma, z, guard);
    Vector arg = z;
    if (step.gamma != 0.0) arg.axpy(-step.gamma, step.s);
    StepCore core;
    core.u = p.j1(beta, arg);
    core.gamma = step.gamma;
    core.theta = theta(step.gamma, step.r, step.s);
    core.r = std::move(step.r);
    core.s = std::move(step.s);
    return core;
}

double residual(const SvipProblem& p, const Vector& x, double beta) {
    const Vector ax = apply(p.a, x);
    return distance(x, p.j1(beta, x)) + distance(ax, p.j2(beta, ax));
}

namespace {

using Clock = std::chrono::steady_clock;

struct Inner {
    Vector z;
    Vector u;
    double gamma = 0.0;
    double theta = 0.0;
};

/// One algorithm plugged into the shared iteration loop.
struct Stepper {
    std::function<Inner(std::size_t n, const Vector& x, const Vector& prev)> inner;
    /// Returns x_{n+1}; may set the sweep count and append monitor violations.
    std::function<Vector(std::size_t n, const Inner& in, const Vector& x, const Vector& prev,
                         IterationRecord& rec, std::vector<MonitorViolation>& violations)>
        outer;
    std::function<double(std::size_t n)> residual_beta;
};

RunResult run_loop(const SvipProblem& p, std::size_t max_iter, double epsilon, const Vector& x0,
                   const Vector& x1, const Stepper& stepper) {
    if (x0.size() != p.dim() || x1.size() != p.dim()) {
        throw ContractError("solver: initial points have the wrong dimension");
    }
    if (max_iter == 0) throw ConfigError("solver: max_iter must be >= 1");
    if (!(epsilon > 0.0)) throw ConfigError("solver: epsilon must be positive");

    RunResult result;
    Vector prev = x0;
    Vector x = x1;
    for (std::size_t n = 1; n <= max_iter; ++n) {
        IterationRecord rec;
        rec.n = n;
        rec.x = x;
        if (p.known_solution) rec.error_to_solution = distance(x, *p.known_solution);
        rec.residual = residual(p, x, stepper.residual_beta(n));
        const bool done = rec.error_to_solution ? *rec.error_to_solution < epsilon
                                                : rec.residual < epsilon;
        const auto start = Clock::now();
        auto elapsed = [&start] {
            return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        };
        try {
            const Inner in = stepper.inner(n, x, prev);
            rec.z = in.z;
            rec.u = in.u;
            rec.gamma = in.gamma;
            rec.theta = in.theta;
            if (done) {
                rec.elapsed_ms = elapsed();
                result.records.push_back(std::move(rec));
                result.termination = Termination::ToleranceMet;
                result.final_x = x;
                return result;
            }
            Vector next = stepper.outer(n, in, x, prev, rec, result.violations);
            rec.elapsed_ms = elapsed();
            if (!next.all_finite() || !std::isfinite(rec.gamma) || !std::isfinite(rec.theta)) {
                result.records.push_back(std::move(rec));
                result.termination = Termination::NumericalFailure;
                result.diagnostics = "non-finite value produced at iteration " + std::to_string(n);
                result.final_x = x;
                return result;
            }
            result.records.push_back(std::move(rec));
            prev = std::move(x);
            x = std::move(next);
        } catch (const InfeasibleError& e) {
            rec.elapsed_ms = elapsed();
            result.records.push_back(std::move(rec));
            result.termination = Termination::InfeasibleSet;
            result.diagnostics = e.what();
            result.final_x = x;
            return result;
        } catch (const ProjectionNonConvergence& e) {
            rec.elapsed_ms = elapsed();
            rec.projection_sweeps = e.sweeps();
            result.records.push_back(std::move(rec));
            result.termination = Termination::NumericalFailure;
            result.diagnostics = e.what();
            result.final_x = x;
            return result;
        }
    }
    result.termination = Termination::MaxIter;
    result.final_x = std::move(x);
    return result;
}

void validate(const SolverParams& params) {
    if (!params.alpha || !params.beta || !params.sigma) {
        throw ConfigError("solver params: alpha, beta and sigma rules must be set");
    }
    if (!std::isfinite(params.alpha_bound) || params.alpha_bound < 0.0) {
        throw ConfigError("solver params: alpha bound must be finite and nonnegative");
    }
    if (!(params.denom_guard > 0.0)) throw ConfigError("solver params: denom_guard must be positive");
}

struct Rates {
    double alpha;
    double beta;
    double sigma;
};

Rates rates_at(const SolverParams& params, std::size_t n) {
    Rates r{params.alpha(n), params.beta(n), params.sigma(n)};
    if (!std::isfinite(r.alpha) || std::abs(r.alpha) > params.alpha_bound) {
        throw ConfigError("alpha_n = " + std::to_string(r.alpha) + " exceeds the recorded bound " +
                          std::to_string(params.alpha_bound));
    }
    if (!(r.beta > 0.0) || !std::isfinite(r.beta)) {
        throw ConfigError("beta_n must be positive at n = " + std::to_string(n));
    }
    if (!(r.sigma > 0.0 && r.sigma < 2.0)) {
        throw ConfigError("sigma_n must lie in (0, 2) at n = " + std::to_string(n));
    }
    return r;
}

Inner adaptive_inner(const SvipProblem& p, const SolverParams& params, std::size_t n,
                     const Vector& x, const Vector& prev) {
    const Rates r = rates_at(params, n);
    Inner in;
    in.z = inertial_extrapolate(x, prev, r.alpha);
    StepCore core = svip_step_core(p, r.beta, r.sigma, in.z, params.denom_guard);
    in.u = std::move(core.u);
    in.gamma = core.gamma;
    in.theta = core.theta;
    return in;
}

/// Monitors shared by the three projection algorithms.
void check_descent(const SvipProblem& p, std::size_t n, const Inner& in, const HalfSpace& c,
                   std::vector<MonitorViolation>& out) {
    if (in.theta < -1e-12) out.push_back({n, "theta-nonnegative", -in.theta});
    if (!p.known_solution) return;
    const Vector& xs = *p.known_solution;
    const double zd = norm_sq(in.z - xs);
    const double slack = 1e-9 * (1.0 + zd);
    const double excess = norm_sq(in.u - xs) - (zd - in.theta);
    if (excess > slack) out.push_back({n, "descent-inequality", excess});
    if (c.is_regular() && c.excess(xs) > slack) {
        out.push_back({n, "solution-in-C", c.excess(xs)});
    }
}

void check_anchor(std::size_t n, const Vector& x, const Vector& next, const Vector& anchor,
                  std::vector<MonitorViolation>& out) {
    const double drop = distance(x, anchor) - distance(next, anchor);
    if (drop > 1e-10) out.push_back({n, "anchor-monotone", drop});
}

Inner forward_backward_inner(const SvipProblem& p, double beta, double gamma, Vector z) {
    const Vector az = apply(p.a, z);
    const Vector r = az - p.j2(beta, az);
    const Vector s = apply_adjoint(p.a, r);
    Vector arg = z;
    arg.axpy(-gamma, s);
    Inner in;
    in.u = p.j1(beta, arg);
    in.z = std::move(z);
    in.gamma = gamma;
    in.theta = theta(gamma, r, s);
    return in;
}

double fixed_gamma_bound(const SvipProblem& p) {
    const auto est = op_norm_sq(p.a);
    return est.value;
}

/// min(cap, 1 / ((n+1)^3 ||x - prev||)), zero at stationarity.
double summable_inertia(double cap, std::size_t n, const Vector& x, const Vector& prev) {
    const double step = distance(x, prev);
    if (step <= 1e-14) return 0.0;
    const double np1 = static_cast<double>(n + 1);
    return std::min(cap, 1.0 / (np1 * np1 * np1 * step));
}

}  // namespace

RunResult run_alg31_hybrid(const SvipProblem& p, const SolverParams& params, const Vector& x0,
                           const Vector& x1) {
    validate(params);
    Stepper stepper;
    stepper.residual_beta = [&params](std::size_t n) { return rates_at(params, n).beta; };
    stepper.inner = [&](std::size_t n, const Vector& x, const Vector& prev) {
        return adaptive_inner(p, params, n, x, prev);
    };
    stepper.outer = [&](std::size_t n, const Inner& in, const Vector& x, const Vector&,
                        IterationRecord&, std::vector<MonitorViolation>& violations) {
        const HalfSpace c = halfspace_from_descent(in.z, in.u, in.theta);
        // Q_n = {y : <x_n - x_1, x_n - y> <= 0}; Q_1 is the whole space.
        const Vector q_normal = x1 - x;
        const HalfSpace q(q_normal, dot(q_normal, x));
        Vector next = project_two_halfspaces(c, q, x1);
        if (params.verify) {
            check_descent(p, n, in, c, violations);
            if (p.known_solution && q.is_regular()) {
                const Vector& xs = *p.known_solution;
                const double slack = 1e-9 * (1.0 + distance(x, x1) * distance(x, xs));
                if (q.excess(xs) > slack) violations.push_back({n, "solution-in-Q", q.excess(xs)});
            }
            check_anchor(n, x, next, x1, violations);
        }
        return next;
    };
    return run_loop(p, params.max_iter, params.epsilon, x0, x1, stepper);
}

namespace {

RunResult run_shrinking(const SvipProblem& p, const SolverParams& params, const Vector& x0,
                        const Vector& x1, bool project_anchor) {
    validate(params);
    Polyhedron shrinking(p.dim());
    DykstraWarmStart warm;
    Stepper stepper;
    stepper.residual_beta = [&params](std::size_t n) { return rates_at(params, n).beta; };
    stepper.inner = [&](std::size_t n, const Vector& x, const Vector& prev) {
        return adaptive_inner(p, params, n, x, prev);
    };
    stepper.outer = [&](std::size_t n, const Inner& in, const Vector& x, const Vector&,
                        IterationRecord& rec, std::vector<MonitorViolation>& violations) {
        const HalfSpace c = halfspace_from_descent(in.z, in.u, in.theta);
        shrinking = shrinking.with(c);
        if (!shrinking.feasible()) {
            throw InfeasibleError("shrinking set C_" + std::to_string(n + 1) +
                                  " is empty (degenerate half-space with negative offset)");
        }
        // The anchor is fixed for Alg 3.2, so the previous multipliers remain dual feasible
        // and warm-start the next projection.
        PolyhedronProjection proj =
            project_anchor ? project_polyhedron(shrinking, x1, params.dykstra, &warm)
                           : project_polyhedron(shrinking, x, params.dykstra);
        rec.projection_sweeps = proj.sweeps;
        if (params.verify) {
            check_descent(p, n, in, c, violations);
            check_anchor(n, x, proj.point, x1, violations);
        }
        return std::move(proj.point);
    };
    return run_loop(p, params.max_iter, params.epsilon, x0, x1, stepper);
}

}  // namespace

RunResult run_alg32_shrinking_anchor(const SvipProblem& p, const SolverParams& params,
                                     const Vector& x0, const Vector& x1) {
    return run_shrinking(p, params, x0, x1, true);
}

RunResult run_alg33_shrinking_previous(const SvipProblem& p, const SolverParams& params,
                                       const Vector& x0, const Vector& x1) {
    return run_shrinking(p, params, x0, x1, false);
}

RunResult run_byrne_halpern(const SvipProblem& p, const ByrneParams& params, const Vector& x1) {
    if (!(params.beta > 0.0)) throw ConfigError("byrne: beta must be positive");
    if (!params.delta) throw ConfigError("byrne: delta rule must be set");
    const double bound = 2.0 / fixed_gamma_bound(p);
    if (!(params.gamma > 0.0 && params.gamma < bound)) {
        throw ConfigError("byrne: gamma must lie in (0, 2/||A^T A||) = (0, " +
                          std::to_string(bound) + ")");
    }
    Stepper stepper;
    stepper.residual_beta = [&params](std::size_t) { return params.beta; };
    stepper.inner = [&](std::size_t, const Vector& x, const Vector&) {
        return forward_backward_inner(p, params.beta, params.gamma, x);
    };
    stepper.outer = [&](std::size_t n, const Inner& in, const Vector&, const Vector&,
                        IterationRecord&, std::vector<MonitorViolation>&) {
        const double delta = params.delta(n);
        if (!(delta >= 0.0 && delta <= 1.0)) {
            throw ConfigError("byrne: delta_n must lie in [0, 1] at n = " + std::to_string(n));
        }
        Vector next = (1.0 - delta) * in.u;
        next.axpy(delta, x1);
        return next;
    };
    return run_loop(p, params.max_iter, params.epsilon, x1, x1, stepper);
}

RunResult run_long_viscosity(const SvipProblem& p, const LongParams& params, const Vector& x0,
                             const Vector& x1) {
    if (!(params.beta > 0.0)) throw ConfigError("long: beta must be positive");
    if (!params.delta || !params.contraction) throw ConfigError("long: delta and f must be set");
    if (!(params.contraction_coefficient >= 0.0 && params.contraction_coefficient < 1.0)) {
        throw ConfigError("long: contraction coefficient must lie in [0, 1)");
    }
    if (!(params.alpha_cap >= 0.0) || !std::isfinite(params.alpha_cap)) {
        throw ConfigError("long: alpha cap must be finite and nonnegative");
    }
    const double bound = 1.0 / fixed_gamma_bound(p);
    if (!(params.gamma > 0.0 && params.gamma < bound)) {
        throw ConfigError("long: gamma must lie in (0, 1/||A||^2) = (0, " + std::to_string(bound) + ")");
    }
    Stepper stepper;
    stepper.residual_beta = [&params](std::size_t) { return params.beta; };
    stepper.inner = [&](std::size_t n, const Vector& x, const Vector& prev) {
        const double alpha = summable_inertia(params.alpha_cap, n, x, prev);
        return forward_backward_inner(p, params.beta, params.gamma, inertial_extrapolate(x, prev, alpha));
    };
    stepper.outer = [&](std::size_t n, const Inner& in, const Vector& x, const Vector&,
                        IterationRecord&, std::vector<MonitorViolation>&) {
        const double delta = params.delta(n);
        if (!(delta > 0.0 && delta < 1.0)) {
            throw ConfigError("long: delta_n must lie in (0, 1) at n = " + std::to_string(n));
        }
        Vector next = (1.0 - delta) * in.u;
        next.axpy(delta, params.contraction(x));
        return next;
    };
    return run_loop(p, params.max_iter, params.epsilon, x0, x1, stepper);
}

RunResult run_anh_mann(const SvipProblem& p, const AnhParams& params, const Vector& x0,
                       const Vector& x1) {
    if (!(params.beta > 0.0)) throw ConfigError("anh: beta must be positive");
    if (!params.delta || !params.theta) throw ConfigError("anh: delta and theta rules must be set");
    if (!(params.alpha_cap >= 0.0) || !std::isfinite(params.alpha_cap)) {
        throw ConfigError("anh: alpha cap must be finite and nonnegative");
    }
    const double bound = 1.0 / fixed_gamma_bound(p);
    if (!(params.gamma > 0.0 && params.gamma < bound)) {
        throw ConfigError("anh: gamma must lie in (0, 1/||A||^2) = (0, " + std::to_string(bound) + ")");
    }
    Stepper stepper;
    stepper.residual_beta = [&params](std::size_t) { return params.beta; };
    stepper.inner = [&](std::size_t n, const Vector& x, const Vector& prev) {
        const double alpha = summable_inertia(params.alpha_cap, n, x, prev);
        return forward_backward_inner(p, params.beta, params.gamma, inertial_extrapolate(x, prev, alpha));
    };
    stepper.outer = [&](std::size_t n, const Inner& in, const Vector& x, const Vector&,
                        IterationRecord&, std::vector<MonitorViolation>&) {
        const double th = params.theta(n);
        const double delta = params.delta(n);
        if (!(th > 0.0 && th < 1.0) || !(delta > 0.0) || !(delta + th < 1.0)) {
            throw ConfigError("anh: need theta_n in (0,1), delta_n > 0 and delta_n + theta_n < 1 at n = " +
                              std::to_string(n));
        }
        Vector next = (1.0 - delta - th) * x;
        next.axpy(delta, in.u);
        return next;
    };
    return run_loop(p, params.max_iter, params.epsilon, x0, x1, stepper);
}

ByrneParams default_byrne_params(const SvipProblem& p) {
    ByrneParams params;
    params.gamma = 1.5 / fixed_gamma_bound(p);
    return params;
}

LongParams default_long_params(const SvipProblem& p) {
    LongParams params;
    params.gamma = 0.5 / fixed_gamma_bound(p);
    return params;
}

AnhParams default_anh_params(const SvipProblem& p) {
    AnhParams params;
    params.gamma = 0.5 / fixed_gamma_bound(p);
    return params;
}

}  // namespace svip
