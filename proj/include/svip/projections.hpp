#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "svip/error.hpp"
#include "svip/numerics.hpp"

namespace svip {

/// {x : <a, x> <= b}, with degenerate normals classified at construction.
class HalfSpace {
public:
    enum class Kind { Regular, WholeSpace, Empty };

    /// Offsets in [-1e-12, 0) on a zero normal count as roundoff and give the whole space.
    static constexpr double degenerate_offset_tol = 1e-12;

    HalfSpace(Vector normal, double offset);
    static HalfSpace whole_space(std::size_t dim);

    Kind kind() const noexcept { return kind_; }
    bool is_regular() const noexcept { return kind_ == Kind::Regular; }
    std::size_t dim() const noexcept { return normal_.size(); }
    const Vector& normal() const noexcept { return normal_; }
    double offset() const noexcept { return offset_; }
    double normal_norm_sq() const noexcept { return normal_norm_sq_; }

    /// <a, x> - b; positive means x lies outside.
    double excess(const Vector& x) const;
    bool contains(const Vector& x, double tol = 0.0) const;

private:
    Vector normal_;
    double offset_;
    double normal_norm_sq_;
    Kind kind_;
};

/// The half-space {x : ||u - x||^2 <= ||z - x||^2 - theta}, which expands to
/// <2(z - u), x> <= ||z||^2 - ||u||^2 - theta.
HalfSpace halfspace_from_descent(const Vector& z, const Vector& u, double theta);

/// Throws InfeasibleError for an empty half-space.
Vector project_halfspace(const HalfSpace& h, const Vector& x);

/// Exact projection onto h1 ∩ h2. Throws InfeasibleError when the intersection is empty.
Vector project_two_halfspaces(const HalfSpace& h1, const HalfSpace& h2, const Vector& x);

/// Intersection of half-spaces, stored as a persistent list: extending shares the prefix.
/// Whole-space members are dropped on insertion; an empty member marks the set infeasible.
/// An empty member list is the whole space.
class Polyhedron {
public:
    explicit Polyhedron(std::size_t dim);

    Polyhedron with(const HalfSpace& h) const;

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return node_ ? node_->count : 0; }
    bool feasible() const noexcept { return feasible_; }

    /// Members in insertion order.
    std::vector<const HalfSpace*> members() const;

    /// max(0, max_i excess_i(x))
    double max_violation(const Vector& x) const;

private:
    struct Node {
        HalfSpace h;
        std::shared_ptr<const Node> prev;
        std::size_t count;
    };

    std::size_t dim_;
    std::shared_ptr<const Node> node_;
    bool feasible_ = true;
};

/// Multipliers carried between calls of project_polyhedron on nested polyhedra.
/// Entry i belongs to member i; missing entries start at zero.
struct DykstraWarmStart {
    std::vector<double> multipliers;
};

struct PolyhedronProjection {
    Vector point;
    std::size_t sweeps = 0;
    double max_violation = 0.0;
    /// True when the result came from a KKT-certified active-set solve.
    bool certified = false;
};

class ProjectionNonConvergence : public Error {
public:
    ProjectionNonConvergence(Vector last, double residual, std::size_t sweeps);

    const Vector& last_iterate() const noexcept { return last_; }
    double residual() const noexcept { return residual_; }
    std::size_t sweeps() const noexcept { return sweeps_; }

private:
    Vector last_;
    double residual_;
    std::size_t sweeps_;
};

struct DykstraOptions {
    double tol = 1e-12;
    std::size_t max_sweeps = 10000;
    /// Every this many sweeps, solve the KKT system on the support of the multipliers and
    /// stop if it certifies an exact projection. Zero disables the check.
    std::size_t certify_every = 10;
    /// When the sweeps run out, solve the problem exactly with a dual active-set method
    /// before reporting non-convergence.
    bool exact_fallback = true;
};

/// Dykstra's cyclic projection (Hildreth's dual ascent for half-spaces). Stops when the
/// maximum violation and the largest single move within a sweep are both <= tol, or when
/// the periodic KKT check certifies the current active set. Throws ProjectionNonConvergence only if the
/// sweeps run out and the exact fallback is disabled or fails.
PolyhedronProjection project_polyhedron(const Polyhedron& p, const Vector& x,
                                        const DykstraOptions& options = {},
                                        DykstraWarmStart* warm = nullptr);

/// Exhaustive active-set enumeration. Limited to 12 members and dimension 16.
Vector project_polyhedron_oracle(const Polyhedron& p, const Vector& x);

}  // namespace svip
