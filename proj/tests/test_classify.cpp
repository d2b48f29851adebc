#include "catch2/catch_amalgamated.hpp"

#include "periomorph/classify.hpp"
#include "periomorph/parser.hpp"
#include "periomorph/ph_enum.hpp"

#include <random>

using namespace periomorph;

namespace {

EqTemplate single(const std::string& sym, EqRelation r) {
    EqTemplate t;
    t.name = sym;
    t.relations[sym] = std::move(r);
    return t;
}

EqRelation relation_from_mask(int arity, int mask) {
    auto parts = all_partitions(arity);
    EqRelation r{arity, {}};
    for (size_t i = 0; i < parts.size(); ++i)
        if (mask & (1 << i)) r.patterns.insert(parts[i]);
    return r;
}

} // namespace

TEST_CASE("the three worked verdicts") {
    EqTemplate neq = single("N", compile(parse_formula("!(x0 = x1)"), {"x0", "x1"}));
    EqTemplate p = single("P", relation_P());
    EqTemplate i = single("I", relation_I());

    ComplexityVerdict vn = classify(neq);
    CHECK(vn.cls == ComplexityClass::InL);
    CHECK(vn.witness_status == WitnessStatus::NotApplicable);

    ComplexityVerdict vp = classify(p);
    CHECK(vp.cls == ComplexityClass::NpComplete);
    REQUIRE(vp.evidence.size() == 1);
    CHECK(vp.evidence[0].positive);
    CHECK_FALSE(vp.evidence[0].negative);
    REQUIRE(vp.evidence[0].non_negative_witness.has_value());
    CHECK_FALSE(vp.note.empty());

    ComplexityVerdict vi = classify(i);
    CHECK(vi.cls == ComplexityClass::CoNpHard);
    REQUIRE(vi.evidence.size() == 1);
    CHECK_FALSE(vi.evidence[0].positive);
    CHECK_FALSE(vi.evidence[0].negative);
    REQUIRE(vi.evidence[0].non_positive_witness.has_value());

    CHECK(to_string(vn.cls) == "in L");
    CHECK(to_string(vp.cls) == "NP-complete");
    CHECK(to_string(vi.cls) == "coNP-hard");
}

TEST_CASE("classification depends only on the pattern sets") {
    EqRelation p = relation_P();
    EqTemplate a = single("P", p);
    EqTemplate b = single("Zebra", p);
    b.relations["Extra"] = compile(parse_formula("x0 = x1"), {"x0", "x1"});
    EqTemplate c;
    c.relations["A"] = compile(parse_formula("x0 = x1"), {"x0", "x1"});
    c.relations["B"] = p;
    CHECK(classify(a).cls == classify(b).cls);
    CHECK(classify(b).cls == classify(c).cls);
}

TEST_CASE("trichotomy is total and deterministic over all arity-3 pattern sets") {
    int in_l = 0, np = 0, conp = 0;
    for (int mask = 0; mask < 32; ++mask) {
        EqTemplate t = single("R", relation_from_mask(3, mask));
        ComplexityVerdict v1 = classify(t);
        ComplexityVerdict v2 = classify(t);
        REQUIRE(v1.cls == v2.cls);
        switch (v1.cls) {
            case ComplexityClass::InL: ++in_l; break;
            case ComplexityClass::NpComplete: ++np; break;
            case ComplexityClass::CoNpHard: ++conp; break;
        }
    }
    CHECK(in_l + np + conp == 32);
    CHECK(in_l > 0);
    CHECK(np > 0);
    CHECK(conp > 0);
}

TEST_CASE("witness search finds atoms immediately") {
    EqTemplate p = single("P", relation_P());
    auto w = find_ph_witness(p, relation_P());
    REQUIRE(w.has_value());
    CHECK(*w == Formula::atom("P", {Term::var("x0"), Term::var("x1"), Term::var("x2")}));

    EqTemplate i = single("I", relation_I());
    auto wi = find_ph_witness(i, relation_I());
    REQUIRE(wi.has_value());
    CHECK(*wi == Formula::atom("I", {Term::var("x0"), Term::var("x1"), Term::var("x2")}));
}

TEST_CASE("witness search through a cylinder") {
    // Q(x0,x1,x2,x3) is the P relation with a dummy last coordinate
    EqRelation q{4, {}};
    for (const Partition& pat : all_partitions(4)) {
        if (relation_P().contains(induced_pattern(pat, {0, 1, 2}))) q.patterns.insert(pat);
    }
    EqTemplate t = single("Q", q);
    auto w = find_ph_witness(t, relation_P());
    REQUIRE(w.has_value());
    CHECK(compile_over(t, *w, {"x0", "x1", "x2"}) == relation_P());
    // the search finds a size-1 witness: the dummy slot reused as x0
    CHECK(w->kind() == FormulaKind::Atom);
    CHECK(w->to_string() == "Q(x0, x1, x2, x0)");
}

TEST_CASE("witness search reports not-found honestly") {
    // over a positive template every pH-definable relation is positive, so
    // disequality is out of reach at any bound
    EqTemplate p = single("P", relation_P());
    EqRelation neq{2, {Partition({0, 1})}};
    WitnessBounds small;
    small.max_size = 5;
    CHECK_FALSE(find_ph_witness(p, neq, small).has_value());
}

TEST_CASE("classify_with_witness attaches validated witnesses") {
    EqTemplate p = single("P", relation_P());
    ComplexityVerdict v = classify_with_witness(p);
    CHECK(v.cls == ComplexityClass::NpComplete);
    REQUIRE(v.witness_status == WitnessStatus::Found);
    CHECK(compile_over(p, *v.witness, {"x0", "x1", "x2"}) == relation_P());

    EqTemplate i = single("I", relation_I());
    ComplexityVerdict vi = classify_with_witness(i);
    REQUIRE(vi.witness_status == WitnessStatus::Found);
    CHECK(compile_over(i, *vi.witness, {"x0", "x1", "x2"}) == relation_I());
}

TEST_CASE("reduction defs validation") {
    ReductionDefs defs;
    defs.relations["Q"] = {2, parse_formula("P(x0, x1, x0)")};
    defs.functions["g"] = {1, parse_formula("x0 = x1")};
    defs.validate();

    ReductionDefs bad;
    bad.relations["Q"] = {2, parse_formula("!(x0 = x1)")};
    CHECK_THROWS_AS(bad.validate(), Error);

    ReductionDefs stray;
    stray.relations["Q"] = {1, parse_formula("x0 = x9")};
    CHECK_THROWS_AS(stray.validate(), Error);
}

TEST_CASE("reduce_instance on pure equality sentences flattens only") {
    ReductionDefs defs;
    Formula f = parse_formula("forall x. exists y. x = y");
    CHECK(reduce_instance(f, defs) == f);
}

TEST_CASE("reduce_instance with the atom as its own definition is a flatten") {
    ReductionDefs defs;
    defs.relations["P"] = {3, parse_formula("P(x0, x1, x2)")};
    std::mt19937 gen(21);
    std::map<std::string, int> rels{{"P", 3}};
    for (int i = 0; i < 20; ++i) {
        Formula f = random_ph_sentence(gen, rels, 4, 5);
        CHECK(reduce_instance(f, defs) == flatten_atoms(alpha_normalize(f)));
    }
}

TEST_CASE("reduce_instance substitutes atom definitions") {
    ReductionDefs defs;
    defs.relations["Q"] = {2, parse_formula("P(x0, x1, x0)")};
    Formula f = parse_formula("forall a. exists b. Q(a, b)");
    Formula out = reduce_instance(f, defs);
    CHECK(out == parse_formula("forall a. exists b. P(a, b, a)"));
    CHECK_THROWS_AS(reduce_instance(parse_formula("exists a. W(a)"), defs), Error);
}

TEST_CASE("reduce_instance avoids capture when instantiating") {
    ReductionDefs defs;
    // the definition binds its own y; the actual argument is also named y
    defs.relations["Q"] = {1, parse_formula("exists y. x0 = y & y = x0")};
    Formula f = parse_formula("forall y. Q(y)");
    Formula out = reduce_instance(f, defs);
    EqTemplate base; // empty language: pure equality
    CHECK(holds_over(base, out));
    REQUIRE(out.kind() == FormulaKind::Forall);
    CHECK(out.body().kind() == FormulaKind::Exists);
    CHECK(out.body().var() != "y"); // renamed inner binder
}

TEST_CASE("reduce_instance preserves solver verdicts") {
    // base template: {P}; target language defined over it
    EqTemplate base = single("P", relation_P());
    ReductionDefs defs;
    defs.relations["Q"] = {2, parse_formula("P(x0, x1, x0)")};   // equality in disguise
    defs.relations["F"] = {3, parse_formula("P(x0, x1, x2)")};   // P itself
    defs.relations["U"] = {1, parse_formula("exists w. x0 = w")}; // everything
    defs.validate();

    EqTemplate target;
    target.name = "B";
    for (const auto& [name, d] : defs.relations) {
        std::vector<std::string> vars;
        for (int i = 0; i < d.arity; ++i) vars.push_back("x" + std::to_string(i));
        target.relations[name] = compile_over(base, d.psi, vars);
    }

    std::map<std::string, int> rels;
    for (const auto& [name, r] : target.relations) rels[name] = r.arity;
    std::mt19937 gen(777);
    for (int i = 0; i < 60; ++i) {
        Formula f = random_ph_sentence(gen, rels, 4, 5);
        Formula reduced = reduce_instance(f, defs);
        CHECK(classify_fragment(reduced).is_positive_horn);
        INFO(f.to_string() << "  ~>  " << reduced.to_string());
        REQUIRE(solve(target, f) == solve(base, reduced));
    }
}
