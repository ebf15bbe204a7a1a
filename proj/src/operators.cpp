#include "svip/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "svip/error.hpp"

namespace svip {

std::string_view to_string(ResolventKind kind) {
    switch (kind) {
        case ResolventKind::LinearPsd: return "linear-psd";
        case ResolventKind::ProxL1: return "prox-l1";
        case ResolventKind::Projection: return "projection-onto-set";
        case ResolventKind::Zero: return "zero-operator";
        case ResolventKind::Custom: return "custom";
    }
    return "unknown";
}

ResolventOp::ResolventOp(std::size_t dim, ResolventKind kind, Evaluate evaluate)
    : dim_(dim), kind_(kind), evaluate_(std::move(evaluate)) {
    if (dim_ == 0) throw ContractError("ResolventOp: dimension must be >= 1");
    if (!evaluate_) throw ContractError("ResolventOp: empty evaluation function");
}

Vector ResolventOp::operator()(double beta, const Vector& v) const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ContractError("resolvent: beta must be a positive finite scalar");
    }
    if (v.size() != dim_) {
        throw ContractError("resolvent: expected dimension " + std::to_string(dim_) + ", got " +
                            std::to_string(v.size()));
    }
    return evaluate_(beta, v);
}

struct LinearPsdOperator::Cache {
    std::mutex mutex;
    std::map<double, std::shared_ptr<const Cholesky>> factors;
};

LinearPsdOperator::LinearPsdOperator(DenseMatrix m)
    : m_(std::move(m)), cache_(std::make_shared<Cache>()) {
    if (!m_.is_square() || m_.rows() == 0) {
        throw ContractError("LinearPsdOperator: matrix must be square and nonempty");
    }
    if (max_asymmetry(m_) > 1e-10) {
        throw ContractError("LinearPsdOperator: matrix is not symmetric within 1e-10");
    }
}

std::shared_ptr<const Cholesky> LinearPsdOperator::factor(double beta) const {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->factors.find(beta);
    if (it != cache_->factors.end()) return it->second;
    DenseMatrix shifted = scale(beta, m_);
    for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) += 1.0;
    // I + beta M is SPD for PSD M; a failure here is an internal fault.
    auto chol = std::make_shared<const Cholesky>(shifted);
    cache_->factors.emplace(beta, chol);
    return chol;
}

Vector resolvent_linear_psd(const LinearPsdOperator& op, double beta, const Vector& v) {
    if (!(beta > 0.0)) throw ContractError("resolvent_linear_psd: beta must be positive");
    return op.factor(beta)->solve(v);
}

Vector prox_l1(double lambda, double gamma, const Vector& v) {
    if (!(lambda >= 0.0)) throw ContractError("prox_l1: lambda must be nonnegative");
    if (!(gamma > 0.0)) throw ContractError("prox_l1: gamma must be positive");
    const double t = gamma * lambda;
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]) - t;
        out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
    }
    return out;
}

void validate(const ConvexSet& set) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Box>) {
                if (s.lo.size() != s.hi.size() || s.lo.size() == 0) {
                    throw ConfigError("box: lo and hi must have the same nonzero dimension");
                }
                for (std::size_t i = 0; i < s.lo.size(); ++i) {
                    if (std::isnan(s.lo[i]) || std::isnan(s.hi[i]) || s.lo[i] > s.hi[i]) {
                        throw ConfigError("box: lo > hi in coordinate " + std::to_string(i));
                    }
                }
            } else {
                if (s.center.size() == 0 || !s.center.all_finite()) {
                    throw ConfigError("ball: center must be a finite nonempty vector");
                }
                if (!(s.radius >= 0.0) || !std::isfinite(s.radius)) {
                    throw ConfigError("ball: radius must be finite and nonnegative");
                }
            }
        },
        set);
}

std::size_t set_dim(const ConvexSet& set) {
    return std::visit(
        [](const auto& s) -> std::size_t {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Box>) return s.lo.size();
            else return s.center.size();
        },
        set);
}

Vector project(const ConvexSet& set, const Vector& v) {
    if (v.size() != set_dim(set)) throw ContractError("project: dimension mismatch");
    return std::visit(
        [&v](const auto& s) -> Vector {
            using T = std::decay_t<decltype(s)>;
            Vector out(v.size());
            if constexpr (std::is_same_v<T, Box>) {
                for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i], s.lo[i], s.hi[i]);
            } else {
                const double d = distance(v, s.center);
                if (d <= s.radius) return v;
                const double t = s.radius / d;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    out[i] = s.center[i] + t * (v[i] - s.center[i]);
                }
            }
            return out;
        },
        set);
}

Vector resolvent_normal_cone(const ConvexSet& set, double beta, const Vector& v) {
    if (!(beta > 0.0)) throw ContractError("resolvent_normal_cone: beta must be positive");
    validate(set);
    return project(set, v);
}

ResolventOp make_zero_resolvent(std::size_t dim) {
    return ResolventOp(dim, ResolventKind::Zero, [](double, const Vector& v) { return v; });
}

ResolventOp make_linear_psd_resolvent(LinearPsdOperator op) {
    const std::size_t dim = op.dim();
    return ResolventOp(dim, ResolventKind::LinearPsd,
                       [op = std::move(op)](double beta, const Vector& v) {
                           return resolvent_linear_psd(op, beta, v);
                       });
}

ResolventOp make_projection_resolvent(ConvexSet set) {
    validate(set);
    const std::size_t dim = set_dim(set);
    return ResolventOp(dim, ResolventKind::Projection,
                       [set = std::move(set)](double, const Vector& v) { return project(set, v); });
}

ResolventOp make_prox_resolvent(const ProxFunction& fn, std::size_t dim) {
    return std::visit(
        [dim](const auto& f) -> ResolventOp {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, L1Norm>) {
                if (!(f.lambda >= 0.0)) throw ConfigError("l1 prox: lambda must be nonnegative");
                const double lambda = f.lambda;
                return ResolventOp(dim, ResolventKind::ProxL1,
                                   [lambda](double gamma, const Vector& v) {
                                       return prox_l1(lambda, gamma, v);
                                   });
            } else if constexpr (std::is_same_v<T, Quadratic>) {
                if (f.m.rows() != dim) throw ConfigError("quadratic prox: dimension mismatch");
                return make_linear_psd_resolvent(LinearPsdOperator(f.m));
            } else {
                if (set_dim(f.set) != dim) throw ConfigError("indicator prox: dimension mismatch");
                return make_projection_resolvent(f.set);
            }
        },
        fn);
}

FirmNonexpansivenessReport check_firmly_nonexpansive(const VectorMap& map, std::size_t dim,
                                                     std::size_t samples, std::uint64_t seed,
                                                     double scale) {
    if (samples == 0) throw ContractError("check_firmly_nonexpansive: samples must be >= 1");
    Rng rng(seed);
    FirmNonexpansivenessReport report;
    report.samples = samples;
    report.max_violation = -std::numeric_limits<double>::infinity();
    report.max_relative_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples; ++k) {
        const Vector x = scale * gaussian_vector(dim, rng);
        const Vector y = scale * gaussian_vector(dim, rng);
        const Vector diff_in = x - y;
        const Vector diff_out = map(x) - map(y);
        const double violation = norm_sq(diff_out) - dot(diff_out, diff_in);
        const double bound = 1e-9 * (1.0 + norm_sq(diff_in));
        report.max_violation = std::max(report.max_violation, violation);
        report.max_relative_violation =
            std::max(report.max_relative_violation, violation / (1.0 + norm_sq(diff_in)));
        if (violation > bound) report.passed = false;
    }
    return report;
}

FirmNonexpansivenessReport check_firmly_nonexpansive(const ResolventOp& op, double beta,
                                                     std::size_t samples, std::uint64_t seed) {
    return check_firmly_nonexpansive([&op, beta](const Vector& v) { return op(beta, v); },
                                     op.dim(), samples, seed);
}

}  // namespace svip
