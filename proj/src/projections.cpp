#include "svip/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <string>

namespace svip {

namespace {

double feasibility_tol(const HalfSpace& h, const Vector& x) {
    return 1e-12 * (1.0 + std::sqrt(h.normal_norm_sq()) * norm(x) + std::abs(h.offset()));
}

bool nearly_inside(const HalfSpace& h, const Vector& x) {
    return h.excess(x) <= feasibility_tol(h, x);
}

/// Least-distance projection of x onto the hyperplanes of `active`: returns x - A_S^T mu with
/// G_S mu = A_S x - b_S, or nothing if the active normals are dependent.
std::optional<std::pair<Vector, Vector>> equality_projection(
    const std::vector<const HalfSpace*>& members, const std::vector<std::size_t>& active,
    const Vector& x) {
    const std::size_t s = active.size();
    if (s == 0) return std::make_pair(x, Vector());
    DenseMatrix g(s, s);
    Vector rhs(s);
    for (std::size_t i = 0; i < s; ++i) {
        const HalfSpace& hi = *members[active[i]];
        rhs[i] = hi.excess(x);
        for (std::size_t j = 0; j <= i; ++j) {
            g(i, j) = g(j, i) = dot(hi.normal(), members[active[j]]->normal());
        }
    }
    Vector mu;
    try {
        mu = Cholesky(g).solve(rhs);
    } catch (const NotSpdError&) {
        return std::nullopt;
    }
    Vector p = x;
    for (std::size_t i = 0; i < s; ++i) p.axpy(-mu[i], members[active[i]]->normal());
    return std::make_pair(std::move(p), std::move(mu));
}

/// Starting from the support of the Dykstra multipliers, run a few primal-dual active-set
/// corrections and return the projection if the KKT conditions certify it.
std::optional<Vector> certify_projection(const std::vector<const HalfSpace*>& members,
                                         std::vector<std::size_t> active, const Vector& x,
                                         double tol) {
    const std::size_t max_rounds = 2 * members.size() + 2;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        auto solved = equality_projection(members, active, x);
        if (!solved) return std::nullopt;
        auto& [p, mu] = *solved;

        std::size_t most_negative = active.size();
        double worst_mu = 0.0;
        for (std::size_t i = 0; i < active.size(); ++i) {
            if (mu[i] < worst_mu) {
                worst_mu = mu[i];
                most_negative = i;
            }
        }
        if (most_negative < active.size()) {
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(most_negative));
            continue;
        }
        std::size_t most_violated = members.size();
        double worst_excess = tol;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const double e = members[i]->excess(p);
            if (e > worst_excess) {
                worst_excess = e;
                most_violated = i;
            }
        }
        if (most_violated == members.size()) return std::move(p);
        if (std::find(active.begin(), active.end(), most_violated) != active.end()) {
            return std::nullopt;
        }
        active.push_back(most_violated);
    }
    return std::nullopt;
}

/// Orthonormal basis of the active normals by modified Gram-Schmidt with one
/// reorthogonalisation pass, plus the triangular factor.
struct ActiveFactor {
    std::vector<Vector> q;
    std::vector<std::vector<double>> r;  // r[j][i], i <= j

    explicit ActiveFactor(const std::vector<const Vector*>& normals) {
        for (const Vector* a : normals) {
            Vector v = *a;
            std::vector<double> col(q.size() + 1, 0.0);
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t i = 0; i < q.size(); ++i) {
                    const double c = dot(q[i], v);
                    col[i] += c;
                    v.axpy(-c, q[i]);
                }
            }
            const double len = norm(v);
            col.back() = len;
            q.push_back((1.0 / len) * v);
            r.push_back(std::move(col));
        }
    }

    /// Component of a orthogonal to the active span, and coefficients c with
    /// the in-span component equal to sum_j c_j normal_j.
    std::pair<Vector, std::vector<double>> split(const Vector& a) const {
        Vector z = a;
        std::vector<double> w(q.size(), 0.0);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < q.size(); ++i) {
                const double c = dot(q[i], z);
                w[i] += c;
                z.axpy(-c, q[i]);
            }
        }
        std::vector<double> c(q.size(), 0.0);
        for (std::size_t j = q.size(); j-- > 0;) {
            double acc = w[j];
            for (std::size_t k = j + 1; k < q.size(); ++k) acc -= r[k][j] * c[k];
            c[j] = acc / r[j][j];
        }
        return {std::move(z), std::move(c)};
    }
};

/// Dual active-set method (Goldfarb-Idnani with identity Hessian) for the least-distance
/// problem. Returns the projection and the multiplier of every member.
std::optional<std::pair<Vector, std::vector<double>>> dual_active_set(
    const std::vector<const HalfSpace*>& members, const Vector& x) {
    const std::size_t k = members.size();
    std::vector<std::size_t> active;
    std::vector<double> u;
    Vector y = x;
    const std::size_t max_steps = 50 * (k + x.size()) + 100;
    std::size_t steps = 0;

    while (true) {
        std::size_t p = k;
        double worst = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const HalfSpace& h = *members[i];
            const double e = h.excess(y);
            if (e > feasibility_tol(h, y) && e / std::sqrt(h.normal_norm_sq()) > worst) {
                worst = e / std::sqrt(h.normal_norm_sq());
                p = i;
            }
        }
        if (p == k) break;
        const HalfSpace& hp = *members[p];
        double up = 0.0;
        while (true) {
            if (++steps > max_steps) return std::nullopt;
            std::vector<const Vector*> normals;
            for (std::size_t i : active) normals.push_back(&members[i]->normal());
            const ActiveFactor factor(normals);
            auto [z, r] = factor.split(hp.normal());
            const double z_sq = norm_sq(z);
            const bool dependent = z_sq <= 1e-24 * hp.normal_norm_sq();

            double t1 = std::numeric_limits<double>::infinity();
            std::size_t drop = active.size();
            for (std::size_t i = 0; i < active.size(); ++i) {
                if (r[i] > 0.0 && u[i] / r[i] < t1) {
                    t1 = u[i] / r[i];
                    drop = i;
                }
            }
            const double excess = hp.excess(y);
            const double t2 = dependent ? std::numeric_limits<double>::infinity()
                                        : std::max(0.0, excess) / z_sq;
            if (std::isinf(t1) && std::isinf(t2)) {
                throw InfeasibleError("project_polyhedron: polyhedron is empty");
            }
            const double t = std::min(t1, t2);
            if (!dependent) y.axpy(-t, z);
            for (std::size_t i = 0; i < active.size(); ++i) u[i] = std::max(0.0, u[i] - t * r[i]);
            up += t;
            if (t2 <= t1) {
                active.push_back(p);
                u.push_back(up);
                break;
            }
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
            u.erase(u.begin() + static_cast<std::ptrdiff_t>(drop));
        }
    }
    std::vector<double> multipliers(k, 0.0);
    for (std::size_t i = 0; i < active.size(); ++i) multipliers[active[i]] = u[i];
    return std::make_pair(std::move(y), std::move(multipliers));
}

}  // namespace

HalfSpace::HalfSpace(Vector normal, double offset)
    : normal_(std::move(normal)), offset_(offset), normal_norm_sq_(norm_sq(normal_)) {
    if (!normal_.all_finite() || !std::isfinite(offset_)) {
        throw ContractError("HalfSpace: non-finite normal or offset");
    }
    if (normal_norm_sq_ > 0.0) {
        kind_ = Kind::Regular;
    } else if (offset_ >= -degenerate_offset_tol) {
        offset_ = std::max(offset_, 0.0);
        kind_ = Kind::WholeSpace;
    } else {
        kind_ = Kind::Empty;
    }
}

HalfSpace HalfSpace::whole_space(std::size_t dim) { return HalfSpace(Vector(dim), 0.0); }

double HalfSpace::excess(const Vector& x) const { return dot(normal_, x) - offset_; }

bool HalfSpace::contains(const Vector& x, double tol) const {
    switch (kind_) {
        case Kind::WholeSpace: return true;
        case Kind::Empty: return false;
        case Kind::Regular: return excess(x) <= tol;
    }
    return false;
}

HalfSpace halfspace_from_descent(const Vector& z, const Vector& u, double theta) {
    if (z.size() != u.size()) throw ContractError("halfspace_from_descent: dimension mismatch");
    if (!std::isfinite(theta)) throw ContractError("halfspace_from_descent: theta not finite");
    Vector a = z - u;
    a *= 2.0;
    return HalfSpace(std::move(a), norm_sq(z) - norm_sq(u) - theta);
}

Vector project_halfspace(const HalfSpace& h, const Vector& x) {
    if (h.dim() != x.size()) throw ContractError("project_halfspace: dimension mismatch");
    switch (h.kind()) {
        case HalfSpace::Kind::Empty: throw InfeasibleError("project_halfspace: half-space is empty");
        case HalfSpace::Kind::WholeSpace: return x;
        case HalfSpace::Kind::Regular: break;
    }
    const double excess = h.excess(x);
    if (excess <= 0.0) return x;
    Vector p = x;
    p.axpy(-excess / h.normal_norm_sq(), h.normal());
    return p;
}

Vector project_two_halfspaces(const HalfSpace& h1, const HalfSpace& h2, const Vector& x) {
    if (h1.dim() != x.size() || h2.dim() != x.size()) {
        throw ContractError("project_two_halfspaces: dimension mismatch");
    }
    if (h1.kind() == HalfSpace::Kind::Empty || h2.kind() == HalfSpace::Kind::Empty) {
        throw InfeasibleError("project_two_halfspaces: a member half-space is empty");
    }
    if (!h2.is_regular()) return project_halfspace(h1, x);
    if (!h1.is_regular()) return project_halfspace(h2, x);

    if (h1.excess(x) <= 0.0 && h2.excess(x) <= 0.0) return x;

    const Vector& a1 = h1.normal();
    const Vector& a2 = h2.normal();
    const double g11 = h1.normal_norm_sq();
    const double g22 = h2.normal_norm_sq();
    const double g12 = dot(a1, a2);
    const double det = g11 * g22 - g12 * g12;

    if (det <= 1e-14 * g11 * g22) {
        // Parallel normals: the intersection is a half-space or a slab along a1.
        const double n1 = std::sqrt(g11);
        const double n2 = std::sqrt(g22);
        const double b1 = h1.offset() / n1;
        const double b2 = h2.offset() / n2;
        if (g12 > 0.0) {
            return project_halfspace(b1 <= b2 ? h1 : h2, x);
        }
        // <e, x> <= b1 and <e, x> >= -b2 with e = a1 / |a1|.
        const double lo = -b2;
        const double hi = b1;
        if (lo > hi + 1e-12 * (1.0 + std::abs(lo) + std::abs(hi))) {
            throw InfeasibleError("project_two_halfspaces: antiparallel half-spaces do not intersect");
        }
        const double t = dot(a1, x) / n1;
        const double target = std::clamp(t, std::min(lo, hi), std::max(lo, hi));
        Vector p = x;
        p.axpy((target - t) / n1, a1);
        return p;
    }

    Vector p1 = project_halfspace(h1, x);
    if (nearly_inside(h2, p1)) return p1;
    Vector p2 = project_halfspace(h2, x);
    if (nearly_inside(h1, p2)) return p2;

    // Both constraints active: G lambda = (<a1,x> - b1, <a2,x> - b2).
    const double r1 = h1.excess(x);
    const double r2 = h2.excess(x);
    const double l1 = (g22 * r1 - g12 * r2) / det;
    const double l2 = (g11 * r2 - g12 * r1) / det;
    Vector p = x;
    p.axpy(-l1, a1);
    p.axpy(-l2, a2);
    return p;
}

Polyhedron::Polyhedron(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw ContractError("Polyhedron: dimension must be >= 1");
}

Polyhedron Polyhedron::with(const HalfSpace& h) const {
    if (h.dim() != dim_) throw ContractError("Polyhedron::with: dimension mismatch");
    Polyhedron out = *this;
    switch (h.kind()) {
        case HalfSpace::Kind::WholeSpace: break;
        case HalfSpace::Kind::Empty: out.feasible_ = false; break;
        case HalfSpace::Kind::Regular:
            out.node_ = std::make_shared<const Node>(Node{h, node_, size() + 1});
            break;
    }
    return out;
}

std::vector<const HalfSpace*> Polyhedron::members() const {
    std::vector<const HalfSpace*> out(size());
    std::size_t i = out.size();
    for (const Node* n = node_.get(); n != nullptr; n = n->prev.get()) out[--i] = &n->h;
    return out;
}

double Polyhedron::max_violation(const Vector& x) const {
    double worst = 0.0;
    for (const Node* n = node_.get(); n != nullptr; n = n->prev.get()) {
        worst = std::max(worst, n->h.excess(x));
    }
    return worst;
}

ProjectionNonConvergence::ProjectionNonConvergence(Vector last, double residual, std::size_t sweeps)
    : Error("project_polyhedron: no convergence after " + std::to_string(sweeps) +
            " sweeps (residual " + std::to_string(residual) + ")"),
      last_(std::move(last)), residual_(residual), sweeps_(sweeps) {}

PolyhedronProjection project_polyhedron(const Polyhedron& p, const Vector& x,
                                        const DykstraOptions& options, DykstraWarmStart* warm) {
    if (x.size() != p.dim()) throw ContractError("project_polyhedron: dimension mismatch");
    if (!(options.tol > 0.0)) throw ContractError("project_polyhedron: tol must be positive");
    if (!p.feasible()) throw InfeasibleError("project_polyhedron: polyhedron is empty");

    const auto members = p.members();
    const std::size_t k = members.size();
    PolyhedronProjection result{x, 0, 0.0};
    if (k == 0) return result;

    // Dykstra increments for half-spaces are multiples of the normals: p_i = lambda_i a_i.
    std::vector<double> lambda(k, 0.0);
    Vector y = x;
    if (warm != nullptr) {
        for (std::size_t i = 0; i < std::min(k, warm->multipliers.size()); ++i) {
            lambda[i] = std::max(0.0, warm->multipliers[i]);
            if (lambda[i] != 0.0) y.axpy(-lambda[i], members[i]->normal());
        }
    }

    double change = std::numeric_limits<double>::infinity();
    double violation = std::numeric_limits<double>::infinity();
    std::size_t sweep = 0;
    while (sweep < options.max_sweeps) {
        ++sweep;
        // Largest single move in the sweep; the net displacement can vanish while the
        // iterate still cycles between nearly dependent members.
        change = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const HalfSpace& h = *members[i];
            // Restore the previous correction, then project.
            const double excess = h.excess(y) + lambda[i] * h.normal_norm_sq();
            const double next = std::max(0.0, excess / h.normal_norm_sq());
            const double delta = next - lambda[i];
            if (delta != 0.0) {
                y.axpy(-delta, h.normal());
                change = std::max(change, std::abs(delta) * std::sqrt(h.normal_norm_sq()));
            }
            lambda[i] = next;
        }
        violation = p.max_violation(y);
        if (violation <= options.tol && change <= options.tol) break;
        if (options.certify_every != 0 && sweep % options.certify_every == 0) {
            std::vector<std::size_t> support;
            for (std::size_t i = 0; i < k; ++i)
                if (lambda[i] > 0.0) support.push_back(i);
            if (auto exact = certify_projection(members, std::move(support), x, options.tol)) {
                if (warm != nullptr) warm->multipliers = std::move(lambda);
                result.point = std::move(*exact);
                result.sweeps = sweep;
                result.max_violation = p.max_violation(result.point);
                result.certified = true;
                return result;
            }
        }
    }
    if (!(violation <= options.tol && change <= options.tol)) {
        auto exact = options.exact_fallback ? dual_active_set(members, x)
                                            : std::nullopt;
        if (!exact || !std::all_of(members.begin(), members.end(), [&](const HalfSpace* h) {
                return nearly_inside(*h, exact->first);
            })) {
            throw ProjectionNonConvergence(y, std::max(violation, change), sweep);
        }
        if (warm != nullptr) warm->multipliers = std::move(exact->second);
        result.point = std::move(exact->first);
        result.sweeps = sweep;
        result.max_violation = p.max_violation(result.point);
        result.certified = true;
        return result;
    }
    if (warm != nullptr) warm->multipliers = std::move(lambda);
    result.point = std::move(y);
    result.sweeps = sweep;
    result.max_violation = violation;
    return result;
}

Vector project_polyhedron_oracle(const Polyhedron& p, const Vector& x) {
    if (x.size() != p.dim()) throw ContractError("project_polyhedron_oracle: dimension mismatch");
    if (!p.feasible()) throw InfeasibleError("project_polyhedron_oracle: polyhedron is empty");
    const auto members = p.members();
    const std::size_t k = members.size();
    if (k > 12 || p.dim() > 16) {
        throw ContractError("project_polyhedron_oracle: at most 12 half-spaces in dimension <= 16");
    }

    double best_dist = std::numeric_limits<double>::infinity();
    std::optional<Vector> best;
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (1u << i)) active.push_back(i);
        if (active.size() > p.dim()) continue;

        Vector candidate = x;
        if (!active.empty()) {
            const std::size_t s = active.size();
            DenseMatrix g(s, s);
            Vector rhs(s);
            for (std::size_t i = 0; i < s; ++i) {
                const HalfSpace& hi = *members[active[i]];
                rhs[i] = hi.excess(x);
                for (std::size_t j = 0; j < s; ++j) g(i, j) = dot(hi.normal(), members[active[j]]->normal());
            }
            Vector lambda;
            try {
                lambda = Cholesky(g).solve(rhs);
            } catch (const NotSpdError&) {
                continue;  // dependent normals; an independent subset covers the same point
            }
            for (std::size_t i = 0; i < s; ++i) candidate.axpy(-lambda[i], members[active[i]]->normal());
        }
        bool feasible = true;
        for (const HalfSpace* h : members) {
            const double tol = 1e-10 * (1.0 + std::sqrt(h->normal_norm_sq()) * norm(candidate) +
                                        std::abs(h->offset()));
            if (h->excess(candidate) > tol) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        const double d = distance(candidate, x);
        if (d < best_dist) {
            best_dist = d;
            best = std::move(candidate);
        }
    }
    if (!best) throw InfeasibleError("project_polyhedron_oracle: no feasible active set");
    return *best;
}

}  // namespace svip
