#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "svip/error.hpp"
#include "svip/projections.hpp"

using namespace svip;

namespace {

/// Random half-space that contains `anchor` with some slack.
HalfSpace containing(const Vector& anchor, Rng& rng) {
    Vector a = gaussian_vector(anchor.size(), rng);
    return HalfSpace(a, dot(a, anchor) + 0.5 * rng.uniform());
}

void check_characterization(const Polyhedron& p, const Vector& x, const Vector& proj, Rng& rng) {
    // Members of the set: project random points with the oracle.
    for (int k = 0; k < 10; ++k) {
        const Vector y = project_polyhedron_oracle(p, x + 3.0 * gaussian_vector(x.size(), rng));
        CHECK(dot(proj - x, proj - y) <= 1e-8 * (1.0 + norm(x)) * (1.0 + norm(y)));
    }
}

}  // namespace

TEST_CASE("degenerate half-spaces") {
    CHECK(HalfSpace(Vector(3), 0.0).kind() == HalfSpace::Kind::WholeSpace);
    CHECK(HalfSpace(Vector(3), 2.0).kind() == HalfSpace::Kind::WholeSpace);
    const HalfSpace roundoff(Vector(3), -5e-13);
    CHECK(roundoff.kind() == HalfSpace::Kind::WholeSpace);
    CHECK(roundoff.offset() == 0.0);
    CHECK(HalfSpace(Vector(3), -1e-6).kind() == HalfSpace::Kind::Empty);
    CHECK(HalfSpace(Vector{1, 0}, 0.0).is_regular());
    CHECK_THROWS_AS(project_halfspace(HalfSpace(Vector(2), -1.0), Vector{1, 1}), InfeasibleError);
}

TEST_CASE("halfspace_from_descent") {
    const Vector z{1, 0};
    CHECK(halfspace_from_descent(z, z, 0.0).kind() == HalfSpace::Kind::WholeSpace);

    const HalfSpace h = halfspace_from_descent(z, Vector{0, 0}, 0.0);
    CHECK(h.normal() == Vector{2, 0});
    CHECK(h.offset() == 1.0);
    auto quadratic = [](const Vector& x) { return norm_sq(Vector{0, 0} - x) <= norm_sq(Vector{1, 0} - x); };
    CHECK(h.contains(Vector{0, 0}));
    CHECK(quadratic(Vector{0, 0}));
    CHECK_FALSE(h.contains(Vector{1, 0}));
    CHECK_FALSE(quadratic(Vector{1, 0}));
}

TEST_CASE("linear form of the descent set equals the quadratic definition") {
    Rng rng(3);
    std::size_t agree = 0;
    std::size_t total = 0;
    for (int t = 0; t < 20; ++t) {
        const Vector z = gaussian_vector(5, rng);
        const Vector u = gaussian_vector(5, rng);
        const double th = rng.uniform() * 2.0;
        const HalfSpace h = halfspace_from_descent(z, u, th);
        for (int k = 0; k < 100; ++k) {
            const Vector x = 2.0 * gaussian_vector(5, rng);
            const double lhs = norm_sq(u - x);
            const double rhs = norm_sq(z - x) - th;
            // Skip points within roundoff of the boundary.
            if (std::abs(lhs - rhs) < 1e-9) continue;
            ++total;
            agree += h.contains(x) == (lhs <= rhs);
        }
    }
    CHECK(agree == total);
    CHECK(total > 1900);
}

TEST_CASE("project_halfspace") {
    const HalfSpace h(Vector{1, 0}, 0.0);
    CHECK(project_halfspace(h, Vector{-1, 3}) == Vector{-1, 3});
    CHECK(project_halfspace(h, Vector{2, 3}) == Vector{0, 3});
    CHECK(project_halfspace(HalfSpace::whole_space(2), Vector{5, 5}) == Vector{5, 5});

    Rng rng(4);
    for (int t = 0; t < 30; ++t) {
        const Vector a = gaussian_vector(4, rng);
        const double b = rng.normal();
        const Vector x = 3.0 * gaussian_vector(4, rng);
        const Vector p = project_halfspace(HalfSpace(a, b), x);
        CHECK(dot(a, p) - b <= 1e-12 * (1.0 + norm(a) * norm(p)));
        const auto ref = oracle::halfspace_projection_by_search(a.raw(), b, x.raw());
        CHECK(distance(p, Vector(ref)) <= 1e-6);
    }
}

TEST_CASE("project_two_halfspaces") {
    const HalfSpace h1(Vector{1, 0}, 0.0);
    const HalfSpace h2(Vector{0, 1}, 0.0);
    const Vector x{2, 3};
    CHECK(project_two_halfspaces(h1, HalfSpace::whole_space(2), x) == project_halfspace(h1, x));
    CHECK(project_two_halfspaces(h1, h2, Vector{1, 1}) == Vector{0, 0});
    CHECK(project_two_halfspaces(h1, h2, Vector{-1, -1}) == Vector{-1, -1});

    // Parallel normals: the tighter constraint wins.
    const Vector p = project_two_halfspaces(HalfSpace(Vector{1, 0}, 1.0), HalfSpace(Vector{2, 0}, 0.0),
                                            Vector{3, 1});
    CHECK(distance(p, Vector{0, 1}) <= 1e-15);
    // Antiparallel slab.
    const Vector q = project_two_halfspaces(HalfSpace(Vector{1, 0}, 1.0), HalfSpace(Vector{-1, 0}, 1.0),
                                            Vector{-3, 2});
    CHECK(distance(q, Vector{-1, 2}) <= 1e-15);
    CHECK_THROWS_AS(project_two_halfspaces(HalfSpace(Vector{1, 0}, -1.0), HalfSpace(Vector{-1, 0}, -1.0),
                                           Vector{0, 0}),
                    InfeasibleError);
    CHECK_THROWS_AS(project_two_halfspaces(HalfSpace(Vector(2), -1.0), h1, x), InfeasibleError);
}

TEST_CASE("project_two_halfspaces matches a tightly converged Dykstra run") {
    Rng rng(5);
    DykstraOptions tight;
    tight.tol = 1e-13;
    tight.certify_every = 0;
    tight.max_sweeps = 2000000;
    for (int t = 0; t < 50; ++t) {
        const Vector anchor = gaussian_vector(4, rng);
        const HalfSpace h1 = containing(anchor, rng);
        const HalfSpace h2 = containing(anchor, rng);
        const Vector x = anchor + 3.0 * gaussian_vector(4, rng);
        const Vector exact = project_two_halfspaces(h1, h2, x);
        const Polyhedron p = Polyhedron(4).with(h1).with(h2);
        CHECK(distance(exact, project_polyhedron(p, x, tight).point) <= 1e-8);
    }
}

TEST_CASE("Polyhedron membership rules") {
    const Polyhedron empty(3);
    CHECK(empty.size() == 0);
    CHECK(empty.feasible());
    const Polyhedron one = empty.with(HalfSpace(Vector{1, 0, 0}, 1.0));
    const Polyhedron dropped = one.with(HalfSpace(Vector(3), 0.0));
    CHECK(dropped.size() == 1);
    CHECK_FALSE(one.with(HalfSpace(Vector(3), -1.0)).feasible());
    // Persistence: extending leaves the original untouched.
    const Polyhedron two = one.with(HalfSpace(Vector{0, 1, 0}, 1.0));
    CHECK(one.size() == 1);
    CHECK(two.size() == 2);
    CHECK(two.members()[0]->normal() == Vector{1, 0, 0});
    CHECK(two.max_violation(Vector{3, 0, 0}) == 2.0);
    CHECK(two.max_violation(Vector{0, 0, 0}) == 0.0);
    CHECK_THROWS_AS(one.with(HalfSpace(Vector{1, 0}, 0.0)), ContractError);
}

TEST_CASE("project_polyhedron") {
    const HalfSpace h(Vector{1, 1}, 1.0);
    const Vector x{3, 2};
    const PolyhedronProjection single = project_polyhedron(Polyhedron(2).with(h), x);
    CHECK(distance(single.point, project_halfspace(h, x)) <= 1e-15);

    const Polyhedron quadrant = Polyhedron(2).with(HalfSpace(Vector{1, 0}, 0.0)).with(HalfSpace(Vector{0, 1}, 0.0));
    CHECK(norm(project_polyhedron(quadrant, Vector{1, 1}).point) <= 1e-12);

    CHECK(project_polyhedron(Polyhedron(2), x).point == x);
    CHECK_THROWS_AS(project_polyhedron(Polyhedron(2).with(HalfSpace(Vector(2), -1.0)), x), InfeasibleError);
}

TEST_CASE("project_polyhedron reports non-convergence") {
    // Two nearly parallel half-spaces make plain Dykstra crawl.
    const Polyhedron p = Polyhedron(2)
                             .with(HalfSpace(Vector{1, 1e-4}, 0.0))
                             .with(HalfSpace(Vector{-1, 1e-4}, 0.0));
    DykstraOptions opts;
    opts.certify_every = 0;
    opts.max_sweeps = 5;
    opts.exact_fallback = false;
    try {
        project_polyhedron(p, Vector{0.3, 5.0}, opts);
        FAIL("expected ProjectionNonConvergence");
    } catch (const ProjectionNonConvergence& e) {
        CHECK(e.sweeps() == 5);
        CHECK(e.residual() > 0.0);
        CHECK(e.last_iterate().size() == 2);
    }
}

TEST_CASE("exact fallback after exhausted sweeps") {
    const Polyhedron slow = Polyhedron(2)
                                .with(HalfSpace(Vector{1, 1e-4}, 0.0))
                                .with(HalfSpace(Vector{-1, 1e-4}, 0.0));
    DykstraOptions opts;
    opts.certify_every = 0;
    opts.max_sweeps = 5;
    const PolyhedronProjection got = project_polyhedron(slow, Vector{0.3, 5.0}, opts);
    CHECK(got.certified);
    CHECK(got.sweeps == 5);
    CHECK(norm(got.point) <= 1e-12);

    opts.max_sweeps = 1;
    Rng rng(16);
    for (int t = 0; t < 40; ++t) {
        const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 11);
        const Vector anchor = gaussian_vector(5, rng);
        Polyhedron p(5);
        for (std::size_t i = 0; i < k; ++i) p = p.with(containing(anchor, rng));
        const Vector x = anchor + 3.0 * gaussian_vector(5, rng);
        const PolyhedronProjection fast = project_polyhedron(p, x, opts);
        CHECK(distance(fast.point, project_polyhedron_oracle(p, x)) <= 1e-10 * (1.0 + norm(x)));
    }
}

TEST_CASE("exact fallback on many redundant constraints in low dimension") {
    // More members than the dimension, many nearly parallel: the regime of growing
    // intersections of descent half-spaces.
    Rng rng(17);
    const Vector anchor = gaussian_vector(6, rng);
    Polyhedron p(6);
    const Vector base = gaussian_vector(6, rng);
    for (int i = 0; i < 200; ++i) {
        const Vector a = base + 0.01 * gaussian_vector(6, rng);
        p = p.with(HalfSpace(a, dot(a, anchor) + 0.01 * rng.uniform()));
    }
    const Vector x = anchor + 4.0 * base;
    DykstraOptions quick;
    quick.max_sweeps = 1;
    quick.certify_every = 0;
    const PolyhedronProjection fast = project_polyhedron(p, x, quick);
    DykstraOptions tight;
    tight.max_sweeps = 200000;
    tight.certify_every = 0;
    tight.tol = 1e-11;
    const PolyhedronProjection slow = project_polyhedron(p, x, tight);
    CHECK(fast.certified);
    CHECK(p.max_violation(fast.point) <= 1e-11 * (1.0 + norm(x)));
    CHECK(distance(fast.point, slow.point) <= 1e-7);
    // Variational characterization against feasible points near the anchor.
    int tested = 0;
    for (int k = 0; k < 200; ++k) {
        const Vector y = anchor + 0.01 * gaussian_vector(6, rng);
        if (p.max_violation(y) > 0.0) continue;
        ++tested;
        CHECK(dot(fast.point - x, fast.point - y) <= 1e-9 * (1.0 + norm(x)) * (1.0 + norm(y)));
    }
    CHECK(tested > 10);
}

TEST_CASE("project_polyhedron agrees with the active-set oracle") {
    Rng rng(6);
    for (int t = 0; t < 30; ++t) {
        const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 5);
        const Vector anchor = gaussian_vector(4, rng);
        Polyhedron p(4);
        for (std::size_t i = 0; i < k; ++i) p = p.with(containing(anchor, rng));
        const Vector x = anchor + 3.0 * gaussian_vector(4, rng);
        const PolyhedronProjection got = project_polyhedron(p, x);
        const Vector ref = project_polyhedron_oracle(p, x);
        CHECK(distance(got.point, ref) <= 1e-7);
        CHECK(got.max_violation <= 1e-12 * (1.0 + norm(x)));
        check_characterization(p, x, got.point, rng);
    }
}

TEST_CASE("oracle: trivial cases and self-consistency") {
    const Polyhedron p = Polyhedron(2).with(HalfSpace(Vector{1, 0}, 1.0));
    CHECK(project_polyhedron_oracle(p, Vector{0, 4}) == Vector{0, 4});
    CHECK(distance(project_polyhedron_oracle(p, Vector{3, 4}), Vector{1, 4}) <= 1e-15);
    CHECK_THROWS_AS(project_polyhedron_oracle(
                        Polyhedron(1).with(HalfSpace(Vector{1}, -1.0)).with(HalfSpace(Vector{-1}, -1.0)),
                        Vector{0}),
                    InfeasibleError);

    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        const Vector anchor = gaussian_vector(5, rng);
        Polyhedron q(5);
        for (int i = 0; i < 4; ++i) q = q.with(containing(anchor, rng));
        const Vector x = anchor + 2.0 * gaussian_vector(5, rng);
        const Vector o = project_polyhedron_oracle(q, x);
        CHECK(q.max_violation(o) <= 1e-10);
        DykstraOptions loose;
        loose.tol = 1e-6;
        loose.certify_every = 0;
        CHECK(distance(o, project_polyhedron(q, x, loose).point) <= 1e-4);
    }
}

TEST_CASE("warm start reproduces the cold projection") {
    Rng rng(8);
    const Vector anchor = gaussian_vector(6, rng);
    const Vector x = anchor + 4.0 * gaussian_vector(6, rng);
    Polyhedron p(6);
    DykstraWarmStart warm;
    for (int i = 0; i < 10; ++i) {
        p = p.with(containing(anchor, rng));
        const Vector w = project_polyhedron(p, x, {}, &warm).point;
        const Vector c = project_polyhedron(p, x).point;
        CHECK(distance(w, c) <= 1e-9);
    }
}

TEST_CASE("projection properties: idempotence and nonexpansiveness") {
    Rng rng(9);
    for (int t = 0; t < 20; ++t) {
        const Vector anchor = gaussian_vector(3, rng);
        Polyhedron p(3);
        for (int i = 0; i < 4; ++i) p = p.with(containing(anchor, rng));
        const Vector x = anchor + 3.0 * gaussian_vector(3, rng);
        const Vector y = anchor + 3.0 * gaussian_vector(3, rng);
        const Vector px = project_polyhedron(p, x).point;
        const Vector py = project_polyhedron(p, y).point;
        CHECK(distance(project_polyhedron(p, px).point, px) <= 1e-12 * (1.0 + norm(px)));
        CHECK(distance(px, py) <= distance(x, y) + 1e-10);

        const auto hs = p.members();
        const Vector p2 = project_two_halfspaces(*hs[0], *hs[1], x);
        const Vector q2 = project_two_halfspaces(*hs[0], *hs[1], y);
        CHECK(distance(p2, q2) <= distance(x, y) + 1e-10);
        CHECK(distance(project_two_halfspaces(*hs[0], *hs[1], p2), p2) <= 1e-12 * (1.0 + norm(p2)));
    }
}
