#pragma once

#include <utility>
#include <vector>

#include "periomorph/formula.hpp"

namespace periomorph {

namespace detail {

struct PrefixEntry {
    FormulaKind kind; // Exists or Forall
    std::string var;
};

struct Prenexed {
    std::vector<PrefixEntry> prefix;
    Formula matrix;
};

inline Prenexed prenex_rec(const Formula& f, std::set<std::string>& taken) {
    switch (f.kind()) {
        case FormulaKind::Bottom:
        case FormulaKind::Eq:
        case FormulaKind::Atom:
            return {{}, f};
        case FormulaKind::Not:
        case FormulaKind::Implies:
            throw Error("prenex: formula contains negation or implication");
        case FormulaKind::Exists:
        case FormulaKind::Forall: {
            Prenexed inner = prenex_rec(f.body(), taken);
            inner.prefix.insert(inner.prefix.begin(), PrefixEntry{f.kind(), f.var()});
            return inner;
        }
        case FormulaKind::And:
        case FormulaKind::Or: {
            Prenexed l = prenex_rec(f.left(), taken);
            Prenexed r = prenex_rec(f.right(), taken);
            // Binders from the right conjunct that clash with anything already
            // emitted get a fresh reserved-suffix name.
            std::set<std::string> emitted;
            for (const auto& e : l.prefix) emitted.insert(e.var);
            auto lm_names = all_variable_names(l.matrix);
            emitted.insert(lm_names.begin(), lm_names.end());
            for (auto& e : r.prefix) {
                if (emitted.count(e.var)) {
                    std::string fresh = fresh_name(e.var, taken);
                    r.matrix = rename_free(r.matrix, {{e.var, fresh}});
                    e.var = fresh;
                }
                emitted.insert(e.var);
            }
            std::vector<PrefixEntry> prefix = std::move(l.prefix);
            prefix.insert(prefix.end(), r.prefix.begin(), r.prefix.end());
            Formula matrix = f.kind() == FormulaKind::And
                                 ? Formula::conj(std::move(l.matrix), std::move(r.matrix))
                                 : Formula::disj(std::move(l.matrix), std::move(r.matrix));
            return {std::move(prefix), std::move(matrix)};
        }
    }
    return {{}, f}; // unreachable
}

} // namespace detail

/// Prenex form of a positive-Horn or positive formula. Same-kind quantifiers
/// keep their left-to-right order; clashing binders from sibling scopes are
/// renamed with the reserved suffix. Rejects negation and implication.
inline Formula prenex(const Formula& f) {
    Formula g = alpha_normalize(f);
    std::set<std::string> taken = all_variable_names(g);
    detail::Prenexed p = detail::prenex_rec(g, taken);
    Formula out = std::move(p.matrix);
    for (auto it = p.prefix.rbegin(); it != p.prefix.rend(); ++it)
        out = Formula::quantifier(it->kind, it->var, std::move(out));
    return out;
}

namespace detail {

// Rewrites atoms to the flat forms x=y, f(x0..xk)=y, x=c and R x0..xk.
// Fresh variables y0, y1, ... are numbered per atom left-to-right with the
// inner subterm of a nested application numbered before its parent; clauses
// are listed parent-first.
class Flattener {
public:
    explicit Flattener(const Formula& f) {
        for (const auto& name : all_variable_names(f)) {
            if (name.size() < 2 || name[0] != 'y') continue;
            bool digits = true;
            for (size_t i = 1; i < name.size(); ++i)
                if (!isdigit(static_cast<unsigned char>(name[i]))) { digits = false; break; }
            if (!digits) continue;
            counter_ = std::max(counter_, std::stoi(name.substr(1)) + 1);
        }
    }

    Formula run(const Formula& f) {
        switch (f.kind()) {
            case FormulaKind::Bottom: return f;
            case FormulaKind::Eq: return flatten_eq(f);
            case FormulaKind::Atom: return flatten_atom(f);
            case FormulaKind::Not: return Formula::negation(run(f.child()));
            case FormulaKind::And: return Formula::conj(run(f.left()), run(f.right()));
            case FormulaKind::Or: return Formula::disj(run(f.left()), run(f.right()));
            case FormulaKind::Implies: return Formula::implies(run(f.left()), run(f.right()));
            case FormulaKind::Exists:
            case FormulaKind::Forall:
                return Formula::quantifier(f.kind(), f.var(), run(f.body()));
        }
        return f; // unreachable
    }

private:
    int counter_ = 0;

    std::string fresh() { return "y" + std::to_string(counter_++); }

    static bool term_is_flat_app(const Term& t) {
        if (!t.is_app()) return false;
        for (const Term& a : t.args())
            if (!a.is_var()) return false;
        return true;
    }

    // Clause orientation for the flat forms: constants give `v = c`,
    // applications give `f(vars) = v`.
    static Formula clause_for(const Term& app, const std::vector<Term>& arg_vars,
                              const std::string& target) {
        if (app.args().empty()) return Formula::eq(Term::var(target), app);
        return Formula::eq(Term::app(app.name(), arg_vars), Term::var(target));
    }

    // Returns the replacement variable for t (an application) and appends the
    // clauses defining it: the clause for t itself first, then the clauses of
    // its nested arguments.
    std::string flatten_term(const Term& t, std::vector<Formula>& clauses,
                             std::vector<std::string>& created) {
        std::vector<Term> arg_vars;
        std::vector<Formula> nested;
        for (const Term& a : t.args()) {
            if (a.is_var()) {
                arg_vars.push_back(a);
            } else {
                std::vector<Formula> sub;
                std::string v = flatten_term(a, sub, created);
                arg_vars.push_back(Term::var(v));
                nested.insert(nested.end(), sub.begin(), sub.end());
            }
        }
        std::string v = fresh(); // numbered after the nested arguments
        created.push_back(v);
        clauses.push_back(clause_for(t, arg_vars, v));
        clauses.insert(clauses.end(), nested.begin(), nested.end());
        return v;
    }

    // Same, but the application is defined to equal an existing variable.
    void flatten_term_into(const Term& t, const std::string& target,
                           std::vector<Formula>& clauses, std::vector<std::string>& created) {
        std::vector<Term> arg_vars;
        std::vector<Formula> nested;
        for (const Term& a : t.args()) {
            if (a.is_var()) {
                arg_vars.push_back(a);
            } else {
                std::vector<Formula> sub;
                std::string v = flatten_term(a, sub, created);
                arg_vars.push_back(Term::var(v));
                nested.insert(nested.end(), sub.begin(), sub.end());
            }
        }
        clauses.push_back(clause_for(t, arg_vars, target));
        clauses.insert(clauses.end(), nested.begin(), nested.end());
    }

    static Formula close(Formula matrix, const std::vector<Formula>& clauses,
                         const std::vector<std::string>& created) {
        for (const Formula& c : clauses) matrix = Formula::conj(std::move(matrix), c);
        for (auto it = created.rbegin(); it != created.rend(); ++it)
            matrix = Formula::exists(*it, std::move(matrix));
        return matrix;
    }

    Formula flatten_atom(const Formula& f) {
        bool flat = true;
        for (const Term& a : f.args())
            if (!a.is_var()) { flat = false; break; }
        if (flat) return f;
        std::vector<Term> new_args;
        std::vector<Formula> clauses;
        std::vector<std::string> created;
        for (const Term& a : f.args()) {
            if (a.is_var()) {
                new_args.push_back(a);
            } else {
                std::vector<Formula> sub;
                std::string v = flatten_term(a, sub, created);
                new_args.push_back(Term::var(v));
                clauses.insert(clauses.end(), sub.begin(), sub.end());
            }
        }
        return close(Formula::atom(f.rel(), std::move(new_args)), clauses, created);
    }

    Formula flatten_eq(const Formula& f) {
        const Term& l = f.lhs();
        const Term& r = f.rhs();
        if (l.is_var() && r.is_var()) return f;
        if (l.is_var() && term_is_flat_app(r))
            return r.args().empty() ? f : Formula::eq(r, l); // f(xs) = y orientation
        if (r.is_var() && term_is_flat_app(l))
            return l.args().empty() ? Formula::eq(r, l) : f; // x = c orientation
        std::vector<Formula> clauses;
        std::vector<std::string> created;
        if (l.is_var()) {
            flatten_term_into(r, l.name(), clauses, created);
        } else if (r.is_var()) {
            flatten_term_into(l, r.name(), clauses, created);
        } else {
            std::string root = fresh();
            created.push_back(root);
            flatten_term_into(l, root, clauses, created);
            flatten_term_into(r, root, clauses, created);
        }
        Formula matrix = clauses.front();
        for (size_t i = 1; i < clauses.size(); ++i)
            matrix = Formula::conj(std::move(matrix), clauses[i]);
        for (auto it = created.rbegin(); it != created.rend(); ++it)
            matrix = Formula::exists(*it, std::move(matrix));
        return matrix;
    }
};

} // namespace detail

/// Equivalent formula in which every atom is flat: x=y, f(x0..xk)=y, x=c or
/// R x0..xk. Positive Horn input stays positive Horn (only ∃ and ∧ added).
inline Formula flatten_atoms(const Formula& f) {
    return detail::Flattener(f).run(f);
}

} // namespace periomorph
