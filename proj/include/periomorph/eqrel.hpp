#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "periomorph/formula.hpp"
#include "periomorph/partition.hpp"

namespace periomorph {

/// A k-ary relation over a countably infinite set that is invariant under all
/// permutations: fully described by the set of patterns (partitions of the
/// argument positions) its tuples may have.
struct EqRelation {
    int arity = 0;
    std::set<Partition> patterns;

    bool operator==(const EqRelation&) const = default;

    bool contains(const Partition& p) const { return patterns.count(p) > 0; }

    std::string to_string() const {
        if (patterns.empty()) return "(empty)";
        std::string out;
        for (const Partition& p : patterns) {
            if (!out.empty()) out += ' ';
            out += '[' + p.to_string() + ']';
        }
        return out;
    }
};

struct EqTemplate {
    std::string name;
    std::map<std::string, EqRelation> relations;
};

// The negative/positive grammars are read literally: every {∧,∨,=}-formula is
// satisfied by the constant tuple, and a clause of disequalities between
// distinct positions cannot be contradictory on its own, so the empty
// relation counts as neither positive nor negative. The convention is
// isolated here; nothing else hard-codes it.
inline constexpr bool empty_relation_is_positive() { return false; }
inline constexpr bool empty_relation_is_negative() { return false; }

namespace detail {

struct EqEnv {
    std::vector<std::pair<std::string, int>> vars; // name -> class label
    int fresh_label = 0;                           // labels below this are allocated
};

inline int lookup_class(const EqEnv& env, const std::string& name) {
    for (auto it = env.vars.rbegin(); it != env.vars.rend(); ++it)
        if (it->first == name) return it->second;
    throw Error("unbound variable '" + name + "'");
}

inline const Term& require_var(const Term& t) {
    if (!t.is_var())
        throw Error("function symbols are not supported over an equality template: '" +
                    t.to_string() + "'");
    return t;
}

// Exact evaluation over the countably infinite equality template: a
// quantified variable either joins the class of a value already in scope or
// takes a fresh value; by permutation invariance these finitely many cases
// are exhaustive.
inline bool eval_eq_formula(const EqTemplate* t, const Formula& f, EqEnv& env) {
    switch (f.kind()) {
        case FormulaKind::Bottom:
            return false;
        case FormulaKind::Eq:
            return lookup_class(env, require_var(f.lhs()).name()) ==
                   lookup_class(env, require_var(f.rhs()).name());
        case FormulaKind::Atom: {
            if (!t)
                throw Error("relation symbol '" + f.rel() +
                            "' not allowed in a pure equality formula");
            auto it = t->relations.find(f.rel());
            if (it == t->relations.end())
                throw Error("unknown relation symbol '" + f.rel() + "'");
            if (static_cast<int>(f.args().size()) != it->second.arity)
                throw Error("relation '" + f.rel() + "' expects arity " +
                            std::to_string(it->second.arity));
            std::vector<int> labels;
            labels.reserve(f.args().size());
            for (const Term& a : f.args())
                labels.push_back(lookup_class(env, require_var(a).name()));
            return it->second.contains(Partition(labels));
        }
        case FormulaKind::Not:
            return !eval_eq_formula(t, f.child(), env);
        case FormulaKind::And:
            return eval_eq_formula(t, f.left(), env) && eval_eq_formula(t, f.right(), env);
        case FormulaKind::Or:
            return eval_eq_formula(t, f.left(), env) || eval_eq_formula(t, f.right(), env);
        case FormulaKind::Implies:
            return !eval_eq_formula(t, f.left(), env) || eval_eq_formula(t, f.right(), env);
        case FormulaKind::Exists:
        case FormulaKind::Forall: {
            std::set<int> used;
            for (const auto& [name, label] : env.vars) used.insert(label);
            std::vector<int> candidates(used.begin(), used.end());
            candidates.push_back(env.fresh_label);
            const bool is_exists = f.kind() == FormulaKind::Exists;
            for (int c : candidates) {
                env.vars.emplace_back(f.var(), c);
                int saved = env.fresh_label;
                if (c == env.fresh_label) ++env.fresh_label;
                bool v = eval_eq_formula(t, f.body(), env);
                env.fresh_label = saved;
                env.vars.pop_back();
                if (is_exists && v) return true;
                if (!is_exists && !v) return false;
            }
            return !is_exists;
        }
    }
    return false; // unreachable
}

inline EqRelation compile_impl(const EqTemplate* t, const Formula& f0,
                               const std::vector<std::string>& free_vars) {
    const int k = static_cast<int>(free_vars.size());
    if (k < 1) throw Error("compile: need at least one free variable slot");
    if (k > kMaxPartitionSize) throw Error("compile: arity exceeds partition cap");
    {
        std::set<std::string> dedup(free_vars.begin(), free_vars.end());
        if (static_cast<int>(dedup.size()) != k)
            throw Error("compile: duplicate variable in free-variable list");
    }
    Formula f = alpha_normalize(f0);
    for (const std::string& v : free_variables(f)) {
        bool found = false;
        for (const std::string& w : free_vars)
            if (v == w) { found = true; break; }
        if (!found)
            throw Error("compile: free variable '" + v + "' not among the given variables");
    }
    EqRelation out{k, {}};
    for (const Partition& p : all_partitions(k)) {
        EqEnv env;
        for (int i = 0; i < k; ++i) env.vars.emplace_back(free_vars[i], p.label(i));
        env.fresh_label = p.block_count();
        if (eval_eq_formula(t, f, env)) out.patterns.insert(p);
    }
    return out;
}

} // namespace detail

/// Patterns of the relation defined by a pure equality formula (full
/// first-order connectives, equality atoms and ⊥ only) over the countably
/// infinite structure with no relations.
inline EqRelation compile(const Formula& f, const std::vector<std::string>& free_vars) {
    return detail::compile_impl(nullptr, f, free_vars);
}

/// Same, but relation atoms are interpreted by the template's pattern sets.
inline EqRelation compile_over(const EqTemplate& t, const Formula& f,
                               const std::vector<std::string>& free_vars) {
    return detail::compile_impl(&t, f, free_vars);
}

/// Truth of a sentence over the template (no free variables).
inline bool holds_over(const EqTemplate& t, const Formula& f0) {
    Formula f = alpha_normalize(f0);
    if (!free_variables(f).empty())
        throw Error("holds_over: formula is not a sentence");
    detail::EqEnv env;
    return detail::eval_eq_formula(&t, f, env);
}

/// Positive relations are exactly the pattern sets that are upward closed
/// under coarsening: a non-injective map can only merge argument values, and
/// {∧,∨,=}-formulas are monotone under merging.
inline bool is_positive(const EqRelation& r) {
    if (r.patterns.empty()) return empty_relation_is_positive();
    auto all = all_partitions(r.arity);
    for (const Partition& p : r.patterns)
        for (const Partition& q : all)
            if (coarsens(q, p) && !r.contains(q)) return false;
    return true;
}

/// Violating pair (p in patterns, q coarsens p, q not in patterns), if any.
inline std::optional<std::pair<Partition, Partition>> positivity_violation(const EqRelation& r) {
    auto all = all_partitions(r.arity);
    for (const Partition& p : r.patterns)
        for (const Partition& q : all)
            if (coarsens(q, p) && !r.contains(q))
                return std::make_pair(p, q);
    return std::nullopt;
}

/// Smallest negative relation containing r. E collects the pairs identified
/// in every member pattern; a clause (a disjunction of disequalities) is
/// usable iff the partition it excludes has no member above it.
inline EqRelation negative_hull(const EqRelation& r) {
    if (r.patterns.empty()) return r;
    std::optional<Partition> common;
    for (const Partition& p : r.patterns)
        common = common ? meet(*common, p) : p;
    const Partition& E = *common;
    auto all = all_partitions(r.arity);
    std::vector<Partition> kept;
    for (const Partition& sigma : all) {
        if (r.contains(sigma) || !coarsens(sigma, E)) continue;
        bool safe = true;
        for (const Partition& m : r.patterns)
            if (coarsens(m, sigma)) { safe = false; break; }
        if (safe) kept.push_back(sigma);
    }
    EqRelation hull{r.arity, {}};
    for (const Partition& p : all) {
        if (!coarsens(p, E)) continue;
        bool excluded = false;
        for (const Partition& sigma : kept)
            if (coarsens(p, sigma)) { excluded = true; break; }
        if (!excluded) hull.patterns.insert(p);
    }
    return hull;
}

inline bool is_negative(const EqRelation& r) {
    if (r.patterns.empty()) return empty_relation_is_negative();
    return negative_hull(r) == r;
}

namespace detail {

inline std::string def_var(int i) { return "x" + std::to_string(i); }

/// One chain of equalities per block (consecutive members), folded into a
/// conjunction; nullopt for the discrete pattern.
inline std::optional<Formula> equalities_of(const Partition& p) {
    std::optional<Formula> out;
    for (int b = 0; b < p.block_count(); ++b) {
        int prev = -1;
        for (int i = 0; i < p.size(); ++i) {
            if (p.label(i) != b) continue;
            if (prev >= 0) {
                Formula eq = Formula::eq(Term::var(def_var(prev)), Term::var(def_var(i)));
                out = out ? Formula::conj(std::move(*out), std::move(eq)) : eq;
            }
            prev = i;
        }
    }
    return out;
}

/// Chain of disequalities over sigma's blocks, folded into a disjunction;
/// nullopt for the discrete pattern (no clause expressible).
inline std::optional<Formula> disequalities_of(const Partition& sigma) {
    std::optional<Formula> out;
    for (int b = 0; b < sigma.block_count(); ++b) {
        int prev = -1;
        for (int i = 0; i < sigma.size(); ++i) {
            if (sigma.label(i) != b) continue;
            if (prev >= 0) {
                Formula ne = Formula::negation(
                    Formula::eq(Term::var(def_var(prev)), Term::var(def_var(i))));
                out = out ? Formula::disj(std::move(*out), std::move(ne)) : ne;
            }
            prev = i;
        }
    }
    return out;
}

inline Formula truth(int /*arity*/) {
    return Formula::eq(Term::var(def_var(0)), Term::var(def_var(0)));
}

} // namespace detail

/// Defining {∨,∧,=}-formula over x0..x_{k-1}: disjunction over the
/// coarsening-minimal member patterns of their equality conjunctions.
inline Formula positive_definition(const EqRelation& r) {
    if (!is_positive(r)) {
        auto w = positivity_violation(r);
        std::string detail = w ? " ([" + w->first.to_string() + "] is in but its coarsening [" +
                                     w->second.to_string() + "] is not)"
                               : " (empty relation)";
        throw Error("positive_definition: relation is not positive" + detail);
    }
    std::vector<Partition> minimal;
    for (const Partition& p : r.patterns) {
        bool min = true;
        for (const Partition& q : r.patterns)
            if (!(q == p) && coarsens(p, q)) { min = false; break; }
        if (min) minimal.push_back(p);
    }
    std::optional<Formula> out;
    for (const Partition& p : minimal) {
        Formula part = detail::equalities_of(p).value_or(detail::truth(r.arity));
        out = out ? Formula::disj(std::move(*out), std::move(part)) : part;
    }
    return *out; // nonempty: positive relations contain at least one pattern
}

/// Defining negative-shape formula over x0..x_{k-1}: E-equalities conjoined
/// with the kept clauses.
inline Formula negative_definition(const EqRelation& r) {
    if (!is_negative(r))
        throw Error("negative_definition: relation is not negative (hull adds " +
                    negative_hull(r).to_string() + ")");
    std::optional<Partition> common;
    for (const Partition& p : r.patterns)
        common = common ? meet(*common, p) : p;
    const Partition& E = *common;
    std::optional<Formula> out = detail::equalities_of(E);
    for (const Partition& sigma : all_partitions(r.arity)) {
        if (r.contains(sigma) || !coarsens(sigma, E)) continue;
        bool safe = true;
        for (const Partition& m : r.patterns)
            if (coarsens(m, sigma)) { safe = false; break; }
        if (!safe) continue;
        auto clause = detail::disequalities_of(sigma);
        if (!clause) continue; // discrete sigma: excluded by no expressible clause
        out = out ? Formula::conj(std::move(*out), std::move(*clause)) : *clause;
    }
    return out.value_or(detail::truth(r.arity));
}

} // namespace periomorph
