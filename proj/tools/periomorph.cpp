// periomorph — positive Horn logic over equality templates and finite
// structures: classification, QCSP solving, periodic-power evaluation,
// pH-hulls and the reduction compiler.

#include "CLI11.hpp"

#include "periomorph/classify.hpp"
#include "periomorph/files.hpp"
#include "periomorph/json_report.hpp"
#include "periomorph/morphisms.hpp"
#include "periomorph/periodic.hpp"
#include "periomorph/ph_enum.hpp"
#include "periomorph/qcsp.hpp"
#include "periomorph/template_analysis.hpp"

#include <iostream>

using namespace periomorph;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1; // meaningful negative answer
constexpr int kExitUsage = 2;

int cmd_classify(const std::string& path, bool witness, bool json, const WitnessBounds& wb) {
    EqTemplate t = parse_template(read_file(path));
    ComplexityVerdict v = witness ? classify_with_witness(t, wb) : classify(t);
    if (json) {
        std::cout << to_json(v, t.name).dump(2) << "\n";
        return kExitOk;
    }
    std::cout << "template " << t.name << ": " << to_string(v.cls) << "\n";
    for (const RelationEvidence& e : v.evidence) {
        std::cout << "  relation " << e.symbol << "/" << e.patterns.arity << ": "
                  << (e.positive ? "positive" : "not positive") << ", "
                  << (e.negative ? "negative" : "not negative")
                  << "  patterns: " << e.patterns.to_string() << "\n";
        if (e.non_negative_witness)
            std::cout << "    negative hull adds [" << e.non_negative_witness->to_string()
                      << "]\n";
        if (e.non_positive_witness)
            std::cout << "    up-closure fails: [" << e.non_positive_witness->first.to_string()
                      << "] is in, coarsening [" << e.non_positive_witness->second.to_string()
                      << "] is not\n";
    }
    if (!v.note.empty()) std::cout << "  note: " << v.note << "\n";
    if (v.witness_status == WitnessStatus::Found)
        std::cout << "  witness (" << v.witness_target << "): " << v.witness->to_string() << "\n";
    else if (v.witness_status == WitnessStatus::NotFound)
        std::cout << "  witness (" << v.witness_target << "): not found within bounds\n";
    return kExitOk;
}

int cmd_solve(const std::string& path, const std::string& sentence_text, bool trace, bool json) {
    EqTemplate t = parse_template(read_file(path));
    Formula sentence = parse_formula(sentence_text);
    std::vector<std::string> trace_log;
    bool value = solve(t, sentence, trace ? &trace_log : nullptr);
    if (json) {
        Json out{{"schema", 1},
                 {"template", t.name},
                 {"sentence", sentence.to_string()},
                 {"value", value}};
        if (trace) out["trace"] = trace_log;
        std::cout << out.dump(2) << "\n";
    } else {
        for (const auto& line : trace_log) std::cout << line << "\n";
        std::cout << (value ? "true" : "false") << "\n";
    }
    return value ? kExitOk : kExitNegative;
}

int cmd_neq_def(const std::string& path, bool json) {
    EqTemplate t = parse_template(read_file(path));
    if (has_constant_polymorphism(t)) {
        if (json)
            std::cout << Json{{"schema", 1},
                              {"template", t.name},
                              {"constant_polymorphism", true}}
                             .dump(2)
                      << "\n";
        else
            std::cout << "constant polymorphism exists\n";
        return kExitNegative;
    }
    DisequalityDefinition d = define_disequality(t);
    EqRelation check = compile_over(t, d.formula, {d.first_var, d.second_var});
    if (json) {
        std::cout << Json{{"schema", 1},
                          {"template", t.name},
                          {"constant_polymorphism", false},
                          {"free", {d.first_var, d.second_var}},
                          {"formula", d.formula.to_string()},
                          {"relation", d.relation},
                          {"tau", d.tau.to_string()},
                          {"compiled", to_json(check)["patterns"]}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << d.to_string() << "\n";
        std::cout << "compiled patterns: " << check.to_string() << "\n";
    }
    return kExitOk;
}

int cmd_hull(const std::string& path, const std::string& rel, int max_arity, long long budget,
             int jobs, bool json) {
    FiniteStructure s = parse_structure(read_file(path));
    auto it = s.relations.find(rel);
    if (it == s.relations.end()) throw Error("structure has no relation '" + rel + "'");
    HullResult h = ph_hull(s, it->second.arity, it->second.tuples, max_arity, budget, jobs);
    if (json) {
        Json out{{"schema", 1}, {"structure", s.name}, {"relation", rel}};
        Json body = to_json(h);
        for (auto& [key, value] : body.items()) out[key] = value;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "hull of " << rel << " in " << s.name << " at K=" << h.arity_bound << ":";
        for (const auto& t : h.tuples) {
            std::cout << " (";
            for (size_t i = 0; i < t.size(); ++i) std::cout << (i ? "," : "") << t[i];
            std::cout << ")";
        }
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_per_eval(const std::string& path, const std::string& formula_text,
                 const std::vector<std::string>& bindings, bool json) {
    FiniteStructure s = parse_structure(read_file(path));
    Formula f = parse_formula(formula_text);
    std::vector<std::pair<std::string, PeriodicElement>> args;
    for (const std::string& b : bindings) {
        auto eq = b.find('=');
        if (eq == std::string::npos)
            throw Error("binding must look like x=<0 1>, got '" + b + "'");
        args.emplace_back(b.substr(0, eq), PeriodicElement::parse(b.substr(eq + 1)));
    }
    for (const auto& [name, elem] : args)
        for (int v : elem.word())
            if (v < 0 || v >= s.size) throw Error("element of '" + name + "' out of range");
    bool value = eval_ph_on_per(s, f, args);
    if (json) {
        Json jargs = Json::object();
        for (const auto& [name, elem] : args) jargs[name] = elem.to_string();
        std::cout << Json{{"schema", 1},
                          {"structure", s.name},
                          {"formula", f.to_string()},
                          {"args", jargs},
                          {"value", value}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << (value ? "true" : "false") << "\n";
    }
    return value ? kExitOk : kExitNegative;
}

int cmd_reduce(const std::string& defs_path, const std::string& sentence_text, bool json) {
    ReductionDefs defs = parse_reduction_defs(read_file(defs_path));
    Formula sentence = parse_formula(sentence_text, defs.symbol_table());
    Formula reduced = reduce_instance(sentence, defs);
    if (json) {
        std::cout << Json{{"schema", 1},
                          {"input", sentence.to_string()},
                          {"sentence", reduced.to_string()}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << reduced.to_string() << "\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------------ selftest

struct SelfTest {
    int failures = 0;
    int checks = 0;

    void suite(const std::string& name, int count, bool ok, const std::string& detail = "") {
        checks += count;
        if (ok) {
            std::cout << "ok   " << name << " (" << count << " checks)\n";
        } else {
            std::cout << "FAIL " << name << (detail.empty() ? "" : ": " + detail) << "\n";
            ++failures;
        }
    }
};

EqTemplate selftest_template(const std::string& name, const EqRelation& r,
                             const std::string& sym) {
    EqTemplate t;
    t.name = name;
    t.relations[sym] = r;
    return t;
}

int cmd_selftest(int jobs, bool quick) {
    SelfTest st;

    { // partition order laws
        int n = 0;
        bool ok = true;
        std::string detail;
        for (int k = 1; k <= 4 && ok; ++k) {
            auto parts = all_partitions(k);
            for (const auto& p : parts)
                for (const auto& q : parts) {
                    ++n;
                    if (coarsens(p, q) && coarsens(q, p) && !(p == q)) {
                        ok = false;
                        detail = "antisymmetry";
                    }
                    Partition m = meet(p, q);
                    if (!coarsens(p, m) || !coarsens(q, m)) {
                        ok = false;
                        detail = "meet below both";
                    }
                }
        }
        st.suite("partition order/meet", n, ok, detail);
    }

    { // negative hull closure laws, arity <= 3
        int n = 0;
        bool ok = true;
        auto parts = all_partitions(3);
        std::vector<EqRelation> rels;
        for (int mask = 0; mask < 32; ++mask) {
            EqRelation r{3, {}};
            for (int i = 0; i < 5; ++i)
                if (mask & (1 << i)) r.patterns.insert(parts[static_cast<size_t>(i)]);
            rels.push_back(std::move(r));
        }
        for (const auto& r : rels) {
            EqRelation h = negative_hull(r);
            ++n;
            for (const auto& p : r.patterns)
                if (!h.contains(p)) ok = false; // extensive
            if (!(negative_hull(h) == h)) ok = false; // idempotent
        }
        for (const auto& a : rels)
            for (const auto& b : rels) {
                bool sub = true;
                for (const auto& p : a.patterns)
                    if (!b.contains(p)) { sub = false; break; }
                if (!sub) continue;
                ++n;
                EqRelation ha = negative_hull(a), hb = negative_hull(b);
                for (const auto& p : ha.patterns)
                    if (!hb.contains(p)) ok = false; // monotone
            }
        st.suite("negative hull closure laws", n, ok);
    }

    { // constant-or-disequality dichotomy, single relation, arity <= 3
        int n = 0;
        bool ok = true;
        std::string detail;
        for (int k = 1; k <= 3 && ok; ++k) {
            auto parts = all_partitions(k);
            for (int mask = 0; mask < (1 << parts.size()) && ok; ++mask) {
                EqRelation r{k, {}};
                for (size_t i = 0; i < parts.size(); ++i)
                    if (mask & (1 << i)) r.patterns.insert(parts[i]);
                EqTemplate t = selftest_template("t", r, "R");
                bool cp = has_constant_polymorphism(t);
                ++n;
                if (cp) continue;
                DisequalityDefinition d = define_disequality(t);
                EqRelation c = compile_over(t, d.formula, {d.first_var, d.second_var});
                EqRelation neq{2, {Partition({0, 1})}};
                if (!(c == neq)) {
                    ok = false;
                    detail = "compiled patterns " + c.to_string();
                }
            }
        }
        st.suite("constant-or-disequality dichotomy", n, ok, detail);
    }

    { // trichotomy totality and determinism over the 32 arity-3 templates
        int n = 0;
        bool ok = true;
        auto parts = all_partitions(3);
        for (int mask = 0; mask < 32; ++mask) {
            EqRelation r{3, {}};
            for (int i = 0; i < 5; ++i)
                if (mask & (1 << i)) r.patterns.insert(parts[static_cast<size_t>(i)]);
            EqTemplate t = selftest_template("t", r, "R");
            ComplexityVerdict a = classify(t), b = classify(t);
            ++n;
            if (a.cls != b.cls) ok = false;
        }
        st.suite("trichotomy totality", n, ok);
    }

    { // solver vs brute force on random sentences
        int per_template = quick ? 10 : 40;
        int n = 0;
        bool ok = true;
        std::string detail;
        std::map<std::string, EqTemplate> templates;
        templates["eq"] = selftest_template("eq", compile(parse_formula("x0 = x1"), {"x0", "x1"}), "E");
        templates["neq"] = selftest_template("neq", compile(parse_formula("!(x0 = x1)"), {"x0", "x1"}), "N");
        templates["P"] = selftest_template("P", relation_P(), "P");
        templates["I"] = selftest_template("I", relation_I(), "I");
        std::mt19937 gen(20240811);
        for (auto& [name, t] : templates) {
            std::map<std::string, int> rels;
            for (auto& [rn, r] : t.relations) rels[rn] = r.arity;
            for (int i = 0; i < per_template && ok; ++i) {
                Formula f = random_ph_sentence(gen, rels, 4, 5);
                int vars = std::max(1, sentence_variable_count(f));
                ++n;
                if (solve(t, f) != solve_bruteforce(t, f, vars)) {
                    ok = false;
                    detail = name + ": " + f.to_string();
                }
            }
        }
        st.suite("solver oracle equivalence", n, ok, detail);
    }

    { // products preserve and reflect positive Horn truth
        Language lang;
        lang.relations["R"] = 1;
        auto corpus = enumerate_ph_sentences(lang, PhBounds{2, 5});
        std::vector<FiniteStructure> structures;
        for (int size = 1; size <= 2; ++size) {
            for (int mask = 0; mask < (1 << size); ++mask) {
                FiniteStructure s;
                s.size = size;
                FiniteStructure::Relation rel;
                rel.arity = 1;
                for (int v = 0; v < size; ++v)
                    if (mask & (1 << v)) rel.tuples.insert({v});
                s.relations["R"] = rel;
                structures.push_back(std::move(s));
            }
        }
        int n = 0;
        bool ok = true;
        for (const auto& a : structures)
            for (const auto& b : structures) {
                FiniteStructure ab = product(a, b);
                for (const auto& f : corpus) {
                    ++n;
                    if (evaluate(ab, f) != (evaluate(a, f) && evaluate(b, f))) ok = false;
                }
            }
        st.suite("product truth factorization", n, ok);
    }

    { // periodic power basics
        int n = 0;
        bool ok = true;
        for (int base = 1; base <= 3 && ok; ++base) {
            for (int k = 1; k <= 6 && ok; ++k) {
                long long total = int_pow(base, k);
                for (long long code = 0; code < total; ++code) {
                    std::vector<int> tup = decode_tuple(static_cast<int>(code), base, k);
                    ++n;
                    if (project_pk(embed_ek(tup), k) != tup) ok = false;
                    if (k < 6 && 6 % k == 0) {
                        ++n;
                        if (!(canonicalize(embed_enm(tup, 6)) == canonicalize(tup))) ok = false;
                    }
                }
            }
        }
        st.suite("periodic embeddings", n, ok);
    }

    { // cones: induced cones pass, an incoherent one is rejected
        FiniteStructure s;
        s.size = 2;
        FiniteStructure::Relation rel;
        rel.arity = 2;
        rel.tuples = {{0, 1}, {1, 0}};
        s.relations["N"] = rel;
        int n = 0;
        bool ok = true;
        for (int k = 1; k <= 2; ++k) {
            for (const auto& op : enumerate_operations(2, k, kDefaultOperationBudget)) {
                if (!is_polymorphism(op, s)) continue;
                ++n;
                if (!cone_check(from_polymorphism(op, s, {1, 2, 4}))) ok = false;
            }
        }
        PolyCone bad;
        bad.base = s;
        bad.stages[1] = OperationTable{2, 1, {1, 0}};             // swap
        bad.stages[2] = OperationTable::projection(2, 2, 0);       // first coordinate
        ++n;
        if (cone_check(bad)) ok = false;
        st.suite("polymorphism cones", n, ok);
    }

    { // hull closure laws over the bare two-element structure
        FiniteStructure s;
        s.size = 2;
        int n = 0;
        bool ok = true;
        std::vector<std::set<std::vector<int>>> rels;
        for (int mask = 0; mask < 16; ++mask) {
            std::set<std::vector<int>> r;
            for (int c = 0; c < 4; ++c)
                if (mask & (1 << c)) r.insert(decode_tuple(c, 2, 2));
            rels.push_back(std::move(r));
        }
        std::vector<std::set<std::vector<int>>> hulls;
        for (const auto& r : rels) {
            HullResult h = ph_hull(s, 2, r, 2, kDefaultOperationBudget, jobs);
            ++n;
            for (const auto& t : r)
                if (!h.tuples.count(t)) ok = false; // extensive
            HullResult hh = ph_hull(s, 2, h.tuples, 2, kDefaultOperationBudget, jobs);
            if (hh.tuples != h.tuples) ok = false; // idempotent
            hulls.push_back(h.tuples);
        }
        for (size_t i = 0; i < rels.size(); ++i)
            for (size_t j = 0; j < rels.size(); ++j) {
                bool sub = std::includes(rels[j].begin(), rels[j].end(), rels[i].begin(),
                                         rels[i].end());
                if (!sub) continue;
                ++n;
                if (!std::includes(hulls[j].begin(), hulls[j].end(), hulls[i].begin(),
                                   hulls[i].end()))
                    ok = false; // monotone
            }
        st.suite("pH-hull closure laws", n, ok);
    }

    std::cout << (st.failures == 0 ? "selftest passed" : "selftest FAILED") << " ("
              << st.checks << " checks)\n";
    return st.failures == 0 ? kExitOk : kExitNegative;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"positive Horn logic over equality templates and finite structures"};
    app.require_subcommand(1);

    bool json = false;

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "complexity trichotomy for a template");
    std::string classify_file;
    bool witness = false;
    WitnessBounds wb;
    classify_cmd->add_option("template", classify_file, "template file")->required();
    classify_cmd->add_flag("--witness", witness, "search for a pH definition of P or I");
    classify_cmd->add_option("--aux-vars", wb.aux_vars, "witness search: auxiliary variables (default 4)");
    classify_cmd->add_option("--alternations", wb.max_alternations, "witness search: quantifier alternation cap (default 3)");
    classify_cmd->add_option("--max-size", wb.max_size, "witness search: formula size cap (default 8)");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "decide a positive Horn sentence over a template");
    std::string solve_file, solve_sentence;
    bool trace = false;
    solve_cmd->add_option("template", solve_file, "template file")->required();
    solve_cmd->add_option("sentence", solve_sentence, "positive Horn sentence")->required();
    solve_cmd->add_flag("--trace", trace, "log the quantifier game moves");

    // neq-def
    auto* neq_cmd = app.add_subcommand("neq-def", "pp definition of disequality, if one exists");
    std::string neq_file;
    neq_cmd->add_option("template", neq_file, "template file")->required();

    // hull
    auto* hull_cmd = app.add_subcommand("hull", "bounded pH-hull of a relation in a finite structure");
    std::string hull_file, hull_rel;
    int hull_k = 3;
    long long hull_budget = kDefaultOperationBudget;
    int jobs = 1;
    hull_cmd->add_option("structure", hull_file, "structure file")->required();
    hull_cmd->add_option("--rel", hull_rel, "relation symbol")->required();
    hull_cmd->add_option("--max-arity", hull_k, "stage arity bound K (default 3)");
    hull_cmd->add_option("--budget", hull_budget, "operation-table budget (default 70000)");
    hull_cmd->add_option("--jobs", jobs, "worker threads (default 1)");

    // per-eval
    auto* per_cmd = app.add_subcommand("per-eval", "evaluate a pH formula on periodic elements");
    std::string per_file, per_formula;
    std::vector<std::string> per_bindings;
    per_cmd->add_option("structure", per_file, "structure file")->required();
    per_cmd->add_option("formula", per_formula, "positive Horn formula")->required();
    per_cmd->add_option("bindings", per_bindings, "free-variable bindings, e.g. x=\"<0 1>\"");

    // reduce
    auto* reduce_cmd = app.add_subcommand("reduce", "compile a QCSP instance down to the base template");
    std::string reduce_defs, reduce_sentence;
    reduce_cmd->add_option("defs", reduce_defs, "reduce-defs file")->required();
    reduce_cmd->add_option("sentence", reduce_sentence, "positive Horn sentence over the defined language")->required();

    // selftest
    auto* self_cmd = app.add_subcommand("selftest", "run the exhaustive small-arity suites");
    int self_jobs = 1;
    bool self_quick = false;
    self_cmd->add_option("--jobs", self_jobs, "worker threads (default 1)");
    self_cmd->add_flag("--quick", self_quick, "smaller sample sizes");

    for (auto* cmd : {classify_cmd, solve_cmd, neq_cmd, hull_cmd, per_cmd, reduce_cmd})
        cmd->add_flag("--json", json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (classify_cmd->parsed()) return cmd_classify(classify_file, witness, json, wb);
        if (solve_cmd->parsed()) return cmd_solve(solve_file, solve_sentence, trace, json);
        if (neq_cmd->parsed()) return cmd_neq_def(neq_file, json);
        if (hull_cmd->parsed()) return cmd_hull(hull_file, hull_rel, hull_k, hull_budget, jobs, json);
        if (per_cmd->parsed()) return cmd_per_eval(per_file, per_formula, per_bindings, json);
        if (reduce_cmd->parsed()) return cmd_reduce(reduce_defs, reduce_sentence, json);
        if (self_cmd->parsed()) return cmd_selftest(self_jobs, self_quick);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
