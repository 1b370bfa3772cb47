#include <catch2/catch_amalgamated.hpp>
#include <quilthedra/json_io.hpp>

#include "ainfty_fixtures.hpp"

#ifndef QUILTHEDRA_FIXTURES_DIR
#define QUILTHEDRA_FIXTURES_DIR "fixtures"
#endif

using namespace quilthedra;

TEST_CASE("tree JSON round trip", "[json]") {
    struct Case { Family fam; int d; int e; };
    std::vector<Case> cases = {{Family::stable, 4, 0},   {Family::stable, 5, 0},
                               {Family::colored, 3, 0},  {Family::colored, 4, 0},
                               {Family::seam, 2, 1},     {Family::seam, 3, 1},
                               {Family::seam, 2, 2},     {Family::bicolored, 3, 0}};
    for (const auto& c : cases) {
        auto trees = enumerate_trees(c.fam, c.d, c.e);
        REQUIRE(!trees.empty());
        for (const auto& t : trees) {
            json j = tree_to_json(t);
            Tree back = tree_from_json(j);
            INFO(family_name(c.fam) << " d=" << c.d << " e=" << c.e << " "
                                    << to_expression(t));
            CHECK(serialize(back) == serialize(t));
        }
    }
}

TEST_CASE("poset JSON and DOT output", "[json]") {
    FacePoset p = build_face_poset(Family::stable, 4, 0);
    json j = poset_to_json(p);
    CHECK(j.at("dim").get<int>() == 2);
    CHECK(j.at("faces").size() == 11);  // 5 + 5 + 1
    int tagged = 0;
    for (const auto& f : j.at("faces"))
        if (f.contains("facet_tag")) ++tagged;
    CHECK(tagged == 5);
    CHECK(j.at("covers").size() == p.covers.size());
    // deterministic serialization
    CHECK(j.dump() == poset_to_json(p).dump());

    std::string dot = poset_to_dot(p);
    CHECK(dot.rfind("digraph hasse", 0) == 0);
    CHECK(dot.find("->") != std::string::npos);
}

TEST_CASE("delay family JSON", "[json]") {
    DelayFamily fam = construct_delays(2);
    json j = delay_family_to_json(fam);
    CHECK(j.at("d").get<int>() == 2);
    for (const auto& e : j.at("entries")) {
        CHECK(e.contains("tree_id"));
        CHECK(e.at("edge").size() == 2);
        // widths parse back exactly
        Rational lam = Rational::parse(e.at("lambda").get<std::string>());
        CHECK(lam.is_positive());
    }
}

TEST_CASE("instance JSON round trip", "[json]") {
    for (const AInftyInstance& C :
         {fx::quiver(), fx::curved_gf2(), fx::bh(), fx::twoterm()}) {
        json j = instance_to_json(C);
        AInftyInstance back = instance_from_json(j);
        CHECK(back.name == C.name);
        CHECK(back.N == C.N);
        CHECK(back.ring == C.ring);
        CHECK(back.objects == C.objects);
        CHECK(instance_to_json(back).dump() == j.dump());
        CHECK(check_ainfty(back, 4).ok);
    }
}

TEST_CASE("fixture directory loads and verifies", "[json]") {
    FixtureSet fx = load_fixtures(QUILTHEDRA_FIXTURES_DIR);
    CHECK(fx.instances.size() >= 5);
    for (const auto& [name, C] : fx.instances) {
        INFO(name);
        CHECK(check_ainfty(C, 4).ok);
    }
    REQUIRE(fx.functors.count("Fc0"));
    REQUIRE(fx.functors.count("Fq1"));
    for (const auto& [name, F] : fx.functors) {
        INFO(name);
        CHECK(check_functor(F, 4).ok);
    }
    for (const auto& [name, T] : fx.prenats) {
        INFO(name);
        if (fx.prenat_is_homotopy.at(name)) CHECK(is_homotopy(T, T.f1, T.f2));
    }
}

TEST_CASE("relation setup JSON", "[json]") {
    json j = read_json_file(std::string(QUILTHEDRA_FIXTURES_DIR) + "/relations.json");
    RelationSetup r = relation_setup_from_json(j);
    REQUIRE(r.spaces.count("M1"));
    REQUIRE(r.correspondences.size() == 3);
    // the fixture encodes the non-embedded two-point composition
    Composition c = geometric_compose(r.correspondences[0], r.correspondences[1]);
    CHECK_FALSE(c.embedded);
    CHECK(c.fiber_product_size == 2);
    CHECK(relation_setup_to_json(r).dump() ==
          relation_setup_to_json(relation_setup_from_json(j)).dump());
}
