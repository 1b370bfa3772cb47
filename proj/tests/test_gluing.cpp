#include <catch2/catch_amalgamated.hpp>
#include <quilthedra/gluing.hpp>
#include <quilthedra/polytopes.hpp>

using namespace quilthedra;

TEST_CASE("constructed delays pass all compatibility axioms", "[gluing]") {
    for (int d = 1; d <= 4; ++d) {
        DelayFamily fam = construct_delays(d);
        DelayReport rep = check_delay_compatibility(fam);
        for (const auto& v : rep.violations) INFO(v);
        CHECK(rep.ok);
    }
}

TEST_CASE("trivial delays fail positivity only", "[gluing]") {
    DelayFamily fam = construct_delays(3);
    for (auto& [k, a] : fam.by_type)
        for (auto& [e, lam] : a.lambda) lam = Rational(1);
    DelayReport rep = check_delay_compatibility(fam);
    CHECK_FALSE(rep.ok);
    bool pos = false;
    for (const auto& v : rep.violations) {
        CHECK(v.rfind("positivity", 0) == 0);
        pos = true;
    }
    CHECK(pos);
}

TEST_CASE("perturbing a coarse type breaks the refinement axiom", "[gluing]") {
    DelayFamily fam = construct_delays(3);
    // the corolla of three biquilted bubbles is a contraction image of the
    // nested type, so changing one of its multipliers must surface as a
    // refinement violation
    Tree coarse = parse_expression("[h1h2](a1)[h1h2](a2)[h1h2](a3)", Family::bicolored);
    auto& a = fam.by_type.at(serialize(coarse));
    REQUIRE_FALSE(a.lambda.empty());
    a.lambda.begin()->second *= Rational(7);
    DelayReport rep = check_delay_compatibility(fam);
    CHECK_FALSE(rep.ok);
    bool refinement = false;
    for (const auto& v : rep.violations)
        if (v.rfind("refinement", 0) == 0) refinement = true;
    CHECK(refinement);
}

TEST_CASE("forced distinct multipliers at d=2", "[gluing]") {
    DelayFamily fam = construct_delays(2);
    Tree t = parse_expression("[h1h2](a1)[h1h2](a2)", Family::bicolored);
    const auto& a = fam.by_type.at(serialize(t));
    REQUIRE(a.lambda.size() == 2);
    auto it = a.lambda.begin();
    Rational l1 = it->second;
    Rational l2 = std::next(it)->second;
    CHECK(l1 != l2);
    CHECK(l1 < l2);
}

TEST_CASE("delayed evaluation", "[gluing]") {
    Tree t = parse_expression("[h1h2](a1)[h1h2](a2)", Family::bicolored);
    {
        // lambda = 1 everywhere acts as the identity on ratios
        DelayAssignment triv;
        triv.tree = t;
        std::vector<Rational> r = {Rational(5), Rational(1, 3)};
        CHECK(delayed_evaluation(t, triv, r) == r);
    }
    {
        // products 2 and 3 along the two paths send (3,2) to the diagonal
        FlatTree f = flatten(t);
        auto ce = core_edges(t, f);
        REQUIRE(ce.size() == 2);
        DelayAssignment a;
        a.tree = t;
        a.lambda[ce[0]] = Rational(2);
        a.lambda[ce[1]] = Rational(3);
        auto out = delayed_evaluation(t, a, {Rational(3), Rational(2)});
        CHECK(out == std::vector<Rational>{Rational(6), Rational(6)});
    }
    CHECK_THROWS_AS(delayed_evaluation(t, DelayAssignment{}, {Rational(1)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(delayed_evaluation(t, DelayAssignment{}, {Rational(1), Rational(-2)}),
                    std::domain_error);
}

TEST_CASE("diagonal system has full rank k-1 with a rational base point", "[gluing]") {
    for (int d = 2; d <= 4; ++d) {
        DelayFamily fam = construct_delays(d);
        for (const auto& [key, a] : fam.by_type) {
            if (flavor(a.tree) != Flavor::biquilted) continue;
            FlatTree f = flatten(a.tree);
            size_t k = designated_vertices(a.tree, f).size();
            if (k < 2) continue;
            DiagonalSolution sol = delayed_diagonal(a.tree, a);
            CHECK(sol.rank == static_cast<int>(k) - 1);
            auto out = delayed_evaluation(a.tree, a, sol.base);
            for (const auto& x : out) CHECK(x == out[0]);
        }
    }
}

TEST_CASE("formal dimension bookkeeping", "[gluing]") {
    {
        FormalModuliDims fd{{0}, {0}};
        CHECK(formal_dimension(fd) == 0);
        REQUIRE(zero_bubble_index(fd).has_value());
        CHECK(*zero_bubble_index(fd) == 0);
    }
    {
        // root disk of dimension 0 plus bubbles of dimensions (1,1,0)
        FormalModuliDims fd{{0, 1, 1, 0}, {1, 2, 3}};
        CHECK(formal_dimension(fd) == 0);
        REQUIRE(zero_bubble_index(fd).has_value());
        CHECK(*zero_bubble_index(fd) == 2);  // the third bubble
    }
    {
        FormalModuliDims fd{{1, 1, 1}, {1, 2}};
        CHECK(formal_dimension(fd) == 2);
        CHECK_FALSE(zero_bubble_index(fd).has_value());
    }
    {
        // two zero-dimensional bubbles: the regular pattern fails
        FormalModuliDims fd{{2, 0, 0}, {1, 2}};
        CHECK(formal_dimension(fd) == 1);
        CHECK_FALSE(zero_bubble_index(fd).has_value());
    }
    CHECK_THROWS_AS(formal_dimension(FormalModuliDims{{-1}, {0}}), std::invalid_argument);
}

TEST_CASE("delay assignments are trivial away from finite-ratio types", "[gluing]") {
    DelayFamily fam = construct_delays(3);
    for (const auto& [key, a] : fam.by_type) {
        if (flavor(a.tree) == Flavor::biquilted) continue;
        CHECK(a.lambda.empty());
    }
}
