#include "svip/problems.hpp"

#include <cmath>

#include "svip/error.hpp"

namespace svip {

namespace {

constexpr std::uint64_t kStartStream = 0x51a27;
constexpr std::uint64_t kBoxStream = 0xb0c5;

}  // namespace

std::string_view to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Example51: return "example51";
        case ProblemKind::SplitMinimization: return "split-minimization";
        case ProblemKind::SplitFeasibility: return "split-feasibility";
        case ProblemKind::Inconsistent: return "inconsistent";
    }
    return "unknown";
}

std::optional<ProblemKind> parse_problem_kind(std::string_view name) {
    for (auto k : {ProblemKind::Example51, ProblemKind::SplitMinimization,
                   ProblemKind::SplitFeasibility, ProblemKind::Inconsistent}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

nlohmann::json to_json(const InstanceRecipe& recipe) {
    nlohmann::json doc = {
        {"kind", std::string(to_string(recipe.kind))},
        {"seed", recipe.seed},
        {"rng", std::string(Rng::algorithm)},
    };
    switch (recipe.kind) {
        case ProblemKind::Example51:
        case ProblemKind::Inconsistent:
            doc["m"] = recipe.m1;
            break;
        case ProblemKind::SplitMinimization:
            doc["m1"] = recipe.m1;
            doc["m2"] = recipe.m2;
            doc["lambda"] = recipe.lambda;
            break;
        case ProblemKind::SplitFeasibility:
            doc["m1"] = recipe.m1;
            doc["m2"] = recipe.m2;
            break;
    }
    return doc;
}

InstanceRecipe recipe_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("instance recipe must be a JSON object");
    InstanceRecipe recipe;
    const std::string kind = doc.value("kind", std::string("example51"));
    const auto parsed = parse_problem_kind(kind);
    if (!parsed) throw ConfigError("unknown problem kind '" + kind + "'");
    recipe.kind = *parsed;
    try {
        if (doc.contains("rng") && doc["rng"].get<std::string>() != Rng::algorithm) {
            throw ConfigError("recipe was generated with rng '" + doc["rng"].get<std::string>() +
                              "', this build uses '" + std::string(Rng::algorithm) + "'");
        }
        recipe.seed = doc.value("seed", std::uint64_t{1});
        if (doc.contains("m")) {
            recipe.m1 = recipe.m2 = doc["m"].get<std::size_t>();
        }
        recipe.m1 = doc.value("m1", recipe.m1);
        recipe.m2 = doc.value("m2", recipe.m2);
        recipe.lambda = doc.value("lambda", recipe.lambda);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("instance recipe: ") + e.what());
    }
    if (recipe.kind == ProblemKind::Example51 || recipe.kind == ProblemKind::Inconsistent) {
        recipe.m2 = recipe.m1;
    }
    if (recipe.m1 == 0 || recipe.m2 == 0) throw ConfigError("instance recipe: dimensions must be >= 1");
    if (!(recipe.lambda >= 0.0)) throw ConfigError("instance recipe: lambda must be nonnegative");
    return recipe;
}

SvipProblem gen_example51(std::size_t m, std::uint64_t seed) {
    if (m == 0) throw ContractError("gen_example51: m must be >= 1");
    Rng rng(seed);
    DenseMatrix a = gaussian_matrix(m, m, rng);
    const DenseMatrix a1 = gaussian_matrix(m, m, rng);
    const DenseMatrix a2 = gaussian_matrix(m, m, rng);
    return SvipProblem(make_linear_psd_resolvent(LinearPsdOperator(gram(a1))),
                       make_linear_psd_resolvent(LinearPsdOperator(gram(a2))), std::move(a),
                       Vector(m));
}

SvipProblem gen_split_minimization(std::size_t m1, std::size_t m2, double lambda, std::uint64_t seed) {
    if (!(lambda >= 0.0)) throw ContractError("gen_split_minimization: lambda must be nonnegative");
    Rng rng(seed);
    DenseMatrix a = gaussian_matrix(m2, m1, rng);
    Rng box_rng = Rng::derived(seed, kBoxStream);
    Box box{Vector(m2), Vector(m2)};
    for (std::size_t i = 0; i < m2; ++i) {
        box.lo[i] = -(0.1 + box_rng.uniform());
        box.hi[i] = 0.1 + box_rng.uniform();
    }
    return SvipProblem(make_prox_resolvent(L1Norm{lambda}, m1),
                       make_prox_resolvent(Indicator{std::move(box)}, m2), std::move(a), Vector(m1));
}

SvipProblem gen_split_feasibility(std::size_t m1, std::size_t m2, std::uint64_t seed) {
    Rng rng(seed);
    DenseMatrix a = scale(1.0 / std::sqrt(static_cast<double>(m1)), gaussian_matrix(m2, m1, rng));
    return SvipProblem(make_projection_resolvent(Ball{Vector(m1), 1.0}),
                       make_projection_resolvent(Box{Vector(m2, -1.0), Vector(m2, 1.0)}),
                       std::move(a), Vector(m1));
}

SvipProblem gen_inconsistent(std::size_t m) {
    if (m == 0) throw ContractError("gen_inconsistent: m must be >= 1");
    Vector c(m);
    c[0] = 1.0;
    Vector d(m);
    d[0] = -1.0;
    return SvipProblem(make_projection_resolvent(Ball{c, 0.0}),
                       make_projection_resolvent(Ball{d, 0.0}), DenseMatrix::identity(m));
}

SvipProblem generate(const InstanceRecipe& recipe) {
    switch (recipe.kind) {
        case ProblemKind::Example51: return gen_example51(recipe.m1, recipe.seed);
        case ProblemKind::SplitMinimization:
            return gen_split_minimization(recipe.m1, recipe.m2, recipe.lambda, recipe.seed);
        case ProblemKind::SplitFeasibility:
            return gen_split_feasibility(recipe.m1, recipe.m2, recipe.seed);
        case ProblemKind::Inconsistent: return gen_inconsistent(recipe.m1);
    }
    throw ContractError("generate: unknown problem kind");
}

std::pair<Vector, Vector> default_starting_points(const InstanceRecipe& recipe) {
    if (recipe.kind == ProblemKind::Inconsistent) {
        // Starting on the zero of B1 makes u_1 = z_1 and the first shrinking set empty.
        Vector c(recipe.m1);
        c[0] = 1.0;
        return {c, c};
    }
    Rng rng = Rng::derived(recipe.seed, kStartStream);
    Vector x0 = gaussian_vector(recipe.m1, rng);
    Vector x1 = gaussian_vector(recipe.m1, rng);
    return {std::move(x0), std::move(x1)};
}

}  // namespace svip
