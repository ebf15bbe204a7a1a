#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "svip/numerics.hpp"

namespace svip {

enum class ResolventKind { LinearPsd, ProxL1, Projection, Zero, Custom };

std::string_view to_string(ResolventKind kind);

/// A maximal monotone operator B, known only through v -> (I + beta B)^{-1} v.
class ResolventOp {
public:
    using Evaluate = std::function<Vector(double beta, const Vector& v)>;

    ResolventOp(std::size_t dim, ResolventKind kind, Evaluate evaluate);

    std::size_t dim() const noexcept { return dim_; }
    ResolventKind kind() const noexcept { return kind_; }

    /// Throws ContractError for beta <= 0 or a dimension mismatch.
    Vector operator()(double beta, const Vector& v) const;

private:
    std::size_t dim_;
    ResolventKind kind_;
    Evaluate evaluate_;
};

/// Symmetric positive semidefinite linear operator M.
class LinearPsdOperator {
public:
    /// Validates squareness and symmetry within 1e-10.
    explicit LinearPsdOperator(DenseMatrix m);

    const DenseMatrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return m_.rows(); }

    /// Cholesky factor of I + beta M, computed once per beta.
    std::shared_ptr<const Cholesky> factor(double beta) const;

private:
    struct Cache;
    DenseMatrix m_;
    std::shared_ptr<Cache> cache_;
};

/// Axis-aligned box {x : lo <= x <= hi}.
struct Box {
    Vector lo;
    Vector hi;
};

/// Euclidean ball {x : ||x - center|| <= radius}.
struct Ball {
    Vector center;
    double radius = 1.0;
};

using ConvexSet = std::variant<Box, Ball>;

/// Throws ConfigError for lo > hi, negative radius or non-finite data.
void validate(const ConvexSet& set);
std::size_t set_dim(const ConvexSet& set);
Vector project(const ConvexSet& set, const Vector& v);

Vector resolvent_linear_psd(const LinearPsdOperator& op, double beta, const Vector& v);

/// prox of gamma * lambda ||.||_1: componentwise soft threshold.
Vector prox_l1(double lambda, double gamma, const Vector& v);

/// Resolvent of the normal cone of `set`, i.e. the metric projection. Independent of beta.
Vector resolvent_normal_cone(const ConvexSet& set, double beta, const Vector& v);

/// Closed-form prox families.
struct L1Norm {
    double lambda = 1.0;
};
struct Quadratic {
    DenseMatrix m;
};
struct Indicator {
    ConvexSet set;
};
using ProxFunction = std::variant<L1Norm, Quadratic, Indicator>;

ResolventOp make_zero_resolvent(std::size_t dim);
ResolventOp make_linear_psd_resolvent(LinearPsdOperator op);
ResolventOp make_prox_resolvent(const ProxFunction& fn, std::size_t dim);
ResolventOp make_projection_resolvent(ConvexSet set);

struct FirmNonexpansivenessReport {
    std::size_t samples = 0;
    /// max over pairs of ||Jx-Jy||^2 - <Jx-Jy, x-y>
    double max_violation = 0.0;
    /// max over pairs of the violation divided by (1 + ||x-y||^2)
    double max_relative_violation = 0.0;
    bool passed = true;
};

using VectorMap = std::function<Vector(const Vector&)>;

/// Samples pairs x, y ~ N(0, scale^2 I) and checks ||Sx-Sy||^2 <= <Sx-Sy, x-y>
/// up to 1e-9 (1 + ||x-y||^2).
FirmNonexpansivenessReport check_firmly_nonexpansive(const VectorMap& map, std::size_t dim,
                                                     std::size_t samples, std::uint64_t seed,
                                                     double scale = 3.0);
FirmNonexpansivenessReport check_firmly_nonexpansive(const ResolventOp& op, double beta,
                                                     std::size_t samples, std::uint64_t seed);

}  // namespace svip
