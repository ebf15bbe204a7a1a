#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "svip/solvers.hpp"

namespace svip {

enum class ProblemKind { Example51, SplitMinimization, SplitFeasibility, Inconsistent };

std::string_view to_string(ProblemKind kind);
std::optional<ProblemKind> parse_problem_kind(std::string_view name);

/// Everything needed to regenerate an instance bit-identically. Matrices are never stored.
struct InstanceRecipe {
    ProblemKind kind = ProblemKind::Example51;
    /// Dimension of H1 (m for the square example51 maps).
    std::size_t m1 = 60;
    /// Dimension of H2.
    std::size_t m2 = 60;
    std::uint64_t seed = 1;
    /// l1 weight of the split minimization instance.
    double lambda = 0.1;

    friend bool operator==(const InstanceRecipe&, const InstanceRecipe&) = default;
};

nlohmann::json to_json(const InstanceRecipe& recipe);
/// Throws ConfigError on unknown kinds or missing fields.
InstanceRecipe recipe_from_json(const nlohmann::json& doc);

/// A, A1, A2 square Gaussian; B_i = A_i^T A_i; the zero vector is the minimum-norm solution.
SvipProblem gen_example51(std::size_t m, std::uint64_t seed);

/// B1 = ∂(lambda ||.||_1), B2 = normal cone of a random box around the origin, A Gaussian.
SvipProblem gen_split_minimization(std::size_t m1, std::size_t m2, double lambda, std::uint64_t seed);

/// B1 = N_C with C the unit ball, B2 = N_Q with Q = [-1, 1]^{m2}, A Gaussian / sqrt(m1).
SvipProblem gen_split_feasibility(std::size_t m1, std::size_t m2, std::uint64_t seed);

/// Negative fixture with an empty solution set: A = I, B1 and B2 are the normal cones of
/// the distinct points e_1 and -e_1.
SvipProblem gen_inconsistent(std::size_t m);

SvipProblem generate(const InstanceRecipe& recipe);

/// Random starting points (x0, x1) derived from the instance seed.
std::pair<Vector, Vector> default_starting_points(const InstanceRecipe& recipe);

}  // namespace svip
