#include "catch2/catch_amalgamated.hpp"

#include "periomorph/eqrel.hpp"
#include "periomorph/morphisms.hpp"
#include "periomorph/parser.hpp"

using namespace periomorph;

namespace {

FiniteStructure bare(int n) {
    FiniteStructure s;
    s.size = n;
    return s;
}

FiniteStructure with_relation(int n, int arity, std::set<std::vector<int>> tuples) {
    FiniteStructure s = bare(n);
    s.relations["R"] = {arity, std::move(tuples)};
    return s;
}

OperationTable unary(int n, std::vector<int> table) { return OperationTable{n, 1, std::move(table)}; }

} // namespace

TEST_CASE("polymorphism checks") {
    FiniteStructure s = with_relation(2, 1, {{1}});
    for (int coord = 0; coord < 3; ++coord)
        CHECK(is_polymorphism(OperationTable::projection(2, 3, coord), s));
    CHECK(is_polymorphism(unary(2, {0, 1}), s));      // identity
    CHECK_FALSE(is_polymorphism(unary(2, {0, 0}), s)); // constant 0 breaks R = {1}

    FiniteStructure z2 = bare(2);
    z2.functions["add"] = {2, {0, 1, 1, 0}};
    z2.constants["zero"] = 0;
    CHECK(is_polymorphism(unary(2, {0, 1}), z2));
    CHECK_FALSE(is_polymorphism(unary(2, {1, 0}), z2)); // breaks the constant
    // x+y is a polymorphism of the group, x AND y is not
    CHECK(is_polymorphism(OperationTable{2, 2, {0, 1, 1, 0}}, z2));
    CHECK_FALSE(is_polymorphism(OperationTable{2, 2, {0, 0, 0, 1}}, z2));
}

TEST_CASE("cone checks and stage extraction") {
    FiniteStructure s = with_relation(2, 2, {{0, 1}, {1, 0}});
    // projection cone: g_k = first coordinate
    PolyCone proj;
    proj.base = s;
    for (int k : {1, 2, 4}) proj.stages[k] = OperationTable::projection(2, k, 0);
    CHECK(cone_check(proj));
    CHECK(stage(proj, 2).arity == 2);
    CHECK_THROWS_AS(stage(proj, 3), Error);

    // incoherent: g_1 is the swap but g_2 projects, so g_2(a,a) != g_1(a)
    PolyCone bad;
    bad.base = s;
    bad.stages[1] = unary(2, {1, 0});
    bad.stages[2] = OperationTable::projection(2, 2, 0);
    CHECK_FALSE(cone_check(bad));
    auto violation = find_cone_violation(bad);
    REQUIRE(violation.has_value());
    CHECK(violation->low == 1);
    CHECK(violation->high == 2);
    CHECK(violation->tuple == std::vector<int>{0});

    // support must be divisibility-closed
    PolyCone gap;
    gap.base = s;
    gap.stages[4] = OperationTable::projection(2, 4, 0);
    CHECK_FALSE(cone_check(gap));

    // a stage that is not a polymorphism
    PolyCone nonpoly;
    nonpoly.base = s;
    nonpoly.stages[1] = unary(2, {0, 0});
    CHECK_FALSE(cone_check(nonpoly));
}

TEST_CASE("cones induced by polymorphisms") {
    FiniteStructure s = with_relation(2, 2, {{0, 1}, {1, 0}});
    for (int k = 1; k <= 3; ++k) {
        for (const auto& op : enumerate_operations(2, k, kDefaultOperationBudget)) {
            if (!is_polymorphism(op, s)) continue;
            PolyCone c = from_polymorphism(op, s, {1, 2, 3, 4, 6});
            REQUIRE(cone_check(c));
        }
    }
    CHECK_THROWS_AS(from_polymorphism(unary(2, {0, 0}), s, {1, 2}), Error);
}

TEST_CASE("stage tables of induced cones") {
    FiniteStructure s = bare(2);
    // unary h: every stage is h of the first coordinate
    PolyCone cu = from_polymorphism(unary(2, {1, 0}), s, {1, 2, 4});
    CHECK(stage(cu, 4).apply({0, 1, 1, 1}) == 1);
    CHECK(stage(cu, 4).apply({1, 0, 0, 0}) == 0);
    // binary h at its own arity is h itself
    OperationTable h{2, 2, {0, 1, 1, 1}};
    PolyCone cb = from_polymorphism(h, s, {1, 2, 4});
    CHECK(stage(cb, 2).table == h.table);
    // and at arity 4 it reads the first two coordinates
    for (int code = 0; code < 16; ++code) {
        std::vector<int> t = decode_tuple(code, 2, 4);
        CHECK(stage(cb, 4).apply(t) == h.apply({t[0], t[1]}));
    }
    // at arity 1 it is h on the diagonal
    CHECK(stage(cb, 1).apply({0}) == h.apply({0, 0}));
    CHECK(stage(cb, 1).apply({1}) == h.apply({1, 1}));
}

TEST_CASE("bounded preservation with witnesses") {
    FiniteStructure s = bare(2);
    std::set<std::vector<int>> neq = {{0, 1}, {1, 0}};

    PolyCone proj;
    proj.base = s;
    for (int k : {1, 2}) proj.stages[k] = OperationTable::projection(2, k, 0);
    CHECK(preserves(proj, 2, neq));

    // essentially unary cones preserve a positive relation: the image of a
    // selection is a unary image of its first tuple
    EqRelation P3 = compile(parse_formula("x = y | y = z"), {"x", "y", "z"});
    FiniteStructure three = bare(3);
    std::set<std::vector<int>> pmat;
    for (int code = 0; code < 27; ++code) {
        std::vector<int> t = decode_tuple(code, 3, 3);
        if (P3.contains(Partition(t))) pmat.insert(t);
    }
    for (const auto& u : enumerate_operations(3, 1, kDefaultOperationBudget)) {
        PolyCone c = from_polymorphism(u, three, {1, 2});
        REQUIRE(preserves(c, 3, pmat));
    }

    // a constant stage collapses disequality
    PolyCone constant = from_polymorphism(unary(2, {0, 0}), s, {1, 2});
    PreservationWitness w;
    CHECK_FALSE(preserves(constant, 2, neq, &w));
    CHECK(w.image == std::vector<int>{0, 0});
    CHECK(w.selected.size() == static_cast<size_t>(w.stage_arity));
}

TEST_CASE("preservation by a cone equals stagewise polymorphism of (A, r)") {
    FiniteStructure s = bare(2);
    std::vector<PolyCone> cones;
    for (int k = 1; k <= 2; ++k)
        for (const auto& op : enumerate_operations(2, k, kDefaultOperationBudget))
            cones.push_back(from_polymorphism(op, s, {1, 2}));
    for (int mask = 0; mask < 16; ++mask) {
        std::set<std::vector<int>> r;
        for (int c = 0; c < 4; ++c)
            if (mask & (1 << c)) r.insert(decode_tuple(c, 2, 2));
        FiniteStructure sr = with_relation(2, 2, r);
        for (const auto& cone : cones) {
            bool stagewise = true;
            for (const auto& [k, op] : cone.stages)
                stagewise = stagewise && is_polymorphism(op, sr);
            REQUIRE(preserves(cone, 2, r) == stagewise);
        }
    }
}

TEST_CASE("ph hull basics") {
    FiniteStructure s = bare(2);
    // orbit of a single pair under surjective unary maps, and then more
    HullResult h1 = ph_hull(s, 2, {{0, 1}}, 1);
    CHECK(h1.tuples == std::set<std::vector<int>>{{0, 1}, {1, 0}});
    HullResult h2 = ph_hull(s, 2, {{0, 1}}, 2);
    CHECK(h2.tuples.count({0, 1}));
    CHECK(h2.tuples.count({1, 0}));
    CHECK(h2.tuples.size() == 4); // binary surjective stages reach everything

    // a relation of the structure is a fixpoint
    FiniteStructure sr = with_relation(2, 2, {{0, 1}});
    HullResult fix = ph_hull(sr, 2, sr.relations.at("R").tuples, 3);
    CHECK(fix.tuples == sr.relations.at("R").tuples);

    CHECK(ph_hull(s, 2, {}, 3).tuples.empty());
    CHECK(ph_hull(s, 2, {{0, 0}}, 2).tuples ==
          std::set<std::vector<int>>{{0, 0}, {1, 1}}); // stays inside the diagonal

    CHECK_THROWS_AS(ph_hull(bare(3), 2, {{0, 1}}, 3), Error); // budget
}

TEST_CASE("ph hull closure laws at |A|=2, K=3") {
    FiniteStructure s = bare(2);
    std::vector<std::set<std::vector<int>>> rels, hulls;
    for (int mask = 0; mask < 16; ++mask) {
        std::set<std::vector<int>> r;
        for (int c = 0; c < 4; ++c)
            if (mask & (1 << c)) r.insert(decode_tuple(c, 2, 2));
        HullResult h = ph_hull(s, 2, r, 3);
        for (const auto& t : r) REQUIRE(h.tuples.count(t));
        REQUIRE(ph_hull(s, 2, h.tuples, 3).tuples == h.tuples);
        rels.push_back(std::move(r));
        hulls.push_back(h.tuples);
    }
    for (size_t i = 0; i < rels.size(); ++i)
        for (size_t j = 0; j < rels.size(); ++j) {
            if (!std::includes(rels[j].begin(), rels[j].end(), rels[i].begin(), rels[i].end()))
                continue;
            REQUIRE(std::includes(hulls[j].begin(), hulls[j].end(), hulls[i].begin(),
                                  hulls[i].end()));
        }
}

TEST_CASE("hull of a positive relation over a positive structure is positive") {
    // materialized up-closed pattern sets stay up-closed under the hull
    FiniteStructure three = bare(3);
    EqRelation P3 = compile(parse_formula("x = y | y = z"), {"x", "y", "z"});
    std::vector<EqRelation> positive_inputs = {
        P3,
        EqRelation{2, {Partition({0, 0})}},
        EqRelation{2, {Partition({0, 0}), Partition({0, 1})}},
    };
    for (const EqRelation& r : positive_inputs) {
        std::set<std::vector<int>> mat;
        long long total = int_pow(3, r.arity);
        for (long long code = 0; code < total; ++code) {
            std::vector<int> t = decode_tuple(static_cast<int>(code), 3, r.arity);
            if (r.contains(Partition(t))) mat.insert(t);
        }
        HullResult h = ph_hull(three, r.arity, mat, 2);
        std::set<Partition> patterns;
        for (const auto& t : h.tuples) patterns.insert(Partition(t));
        for (const Partition& p : patterns)
            for (const Partition& q : all_partitions(r.arity))
                if (coarsens(q, p)) REQUIRE(patterns.count(q));
    }
}

TEST_CASE("operation budget enforcement") {
    CHECK(enumerate_operations(2, 4, kDefaultOperationBudget).size() == 65536);
    CHECK(enumerate_operations(3, 2, kDefaultOperationBudget).size() == 19683);
    CHECK_THROWS_AS(enumerate_operations(3, 3, kDefaultOperationBudget), Error);
    CHECK_THROWS_AS(enumerate_operations(4, 2, kDefaultOperationBudget), Error);
}
