#pragma once

#include <cassert>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "periomorph/common.hpp"

namespace periomorph {

/// First-order term: a variable or a function application. Constants are
/// 0-ary applications and print as "c()" so that text round-trips without a
/// symbol table.
class Term {
public:
    static Term var(std::string name) {
        Term t;
        t.node_ = std::make_shared<const Node>(Node{true, std::move(name), {}});
        return t;
    }

    static Term app(std::string fn, std::vector<Term> args) {
        Term t;
        t.node_ = std::make_shared<const Node>(Node{false, std::move(fn), std::move(args)});
        return t;
    }

    static Term constant(std::string name) { return app(std::move(name), {}); }

    bool is_var() const { return node_->is_var; }
    bool is_app() const { return !node_->is_var; }
    const std::string& name() const { return node_->name; }
    const std::vector<Term>& args() const { return node_->args; }

    bool operator==(const Term& other) const {
        if (node_ == other.node_) return true;
        if (node_->is_var != other.node_->is_var || node_->name != other.node_->name ||
            node_->args.size() != other.node_->args.size())
            return false;
        for (size_t i = 0; i < node_->args.size(); ++i)
            if (!(node_->args[i] == other.node_->args[i])) return false;
        return true;
    }

    std::string to_string() const {
        if (is_var()) return name();
        std::string out = name() + "(";
        for (size_t i = 0; i < args().size(); ++i) {
            if (i) out += ", ";
            out += args()[i].to_string();
        }
        return out + ")";
    }

private:
    struct Node {
        bool is_var;
        std::string name;
        std::vector<Term> args;
    };
    Term() = default;
    std::shared_ptr<const Node> node_;
};

enum class FormulaKind { Bottom, Eq, Atom, Not, And, Or, Implies, Exists, Forall };

/// Immutable first-order formula. Values share subtrees; every operation on
/// them is pure, so formulas are safe to pass across threads.
class Formula {
public:
    static Formula bottom() { return make(Node{FormulaKind::Bottom, {}, {}, {}}); }

    static Formula eq(Term l, Term r) {
        Node n{FormulaKind::Eq, {}, {}, {}};
        n.terms = {std::move(l), std::move(r)};
        return make(std::move(n));
    }

    static Formula atom(std::string rel, std::vector<Term> args) {
        Node n{FormulaKind::Atom, std::move(rel), {}, {}};
        n.terms = std::move(args);
        return make(std::move(n));
    }

    static Formula negation(Formula f) { return unary(FormulaKind::Not, std::move(f)); }

    static Formula conj(Formula l, Formula r) { return binary(FormulaKind::And, std::move(l), std::move(r)); }
    static Formula disj(Formula l, Formula r) { return binary(FormulaKind::Or, std::move(l), std::move(r)); }
    static Formula implies(Formula l, Formula r) { return binary(FormulaKind::Implies, std::move(l), std::move(r)); }

    static Formula exists(std::string v, Formula body) { return quant(FormulaKind::Exists, std::move(v), std::move(body)); }
    static Formula forall(std::string v, Formula body) { return quant(FormulaKind::Forall, std::move(v), std::move(body)); }
    static Formula quantifier(FormulaKind kind, std::string v, Formula body) {
        assert(kind == FormulaKind::Exists || kind == FormulaKind::Forall);
        return quant(kind, std::move(v), std::move(body));
    }

    FormulaKind kind() const { return node_->kind; }

    // Eq
    const Term& lhs() const { assert(kind() == FormulaKind::Eq); return node_->terms[0]; }
    const Term& rhs() const { assert(kind() == FormulaKind::Eq); return node_->terms[1]; }
    // Atom
    const std::string& rel() const { assert(kind() == FormulaKind::Atom); return node_->name; }
    const std::vector<Term>& args() const { assert(kind() == FormulaKind::Atom); return node_->terms; }
    // Not
    const Formula& child() const { assert(kind() == FormulaKind::Not); return node_->children[0]; }
    // And / Or / Implies
    const Formula& left() const { return node_->children[0]; }
    const Formula& right() const { return node_->children[1]; }
    // Exists / Forall
    const std::string& var() const { return node_->name; }
    const Formula& body() const { return node_->children[0]; }

    bool is_quantifier() const {
        return kind() == FormulaKind::Exists || kind() == FormulaKind::Forall;
    }

    bool operator==(const Formula& other) const {
        if (node_ == other.node_) return true;
        if (kind() != other.kind() || node_->name != other.node_->name) return false;
        if (node_->terms.size() != other.node_->terms.size() ||
            node_->children.size() != other.node_->children.size())
            return false;
        for (size_t i = 0; i < node_->terms.size(); ++i)
            if (!(node_->terms[i] == other.node_->terms[i])) return false;
        for (size_t i = 0; i < node_->children.size(); ++i)
            if (!(node_->children[i] == other.node_->children[i])) return false;
        return true;
    }

    std::string to_string() const { return print(0); }

private:
    struct Node {
        FormulaKind kind;
        std::string name;            // relation symbol or quantified variable
        std::vector<Term> terms;     // Eq sides or Atom arguments
        std::vector<Formula> children;
    };

    static Formula make(Node n) {
        Formula f;
        f.node_ = std::make_shared<const Node>(std::move(n));
        return f;
    }
    static Formula unary(FormulaKind k, Formula c) {
        Node n{k, {}, {}, {}};
        n.children = {std::move(c)};
        return make(std::move(n));
    }
    static Formula binary(FormulaKind k, Formula l, Formula r) {
        Node n{k, {}, {}, {}};
        n.children = {std::move(l), std::move(r)};
        return make(std::move(n));
    }
    static Formula quant(FormulaKind k, std::string v, Formula body) {
        Node n{k, std::move(v), {}, {}};
        n.children = {std::move(body)};
        return make(std::move(n));
    }

    // Precedence: Implies(1) < Or(2) < And(3) < Not(4) < atoms. Quantifiers
    // extend maximally to the right and are parenthesized whenever they
    // appear under a connective.
    int precedence() const {
        switch (kind()) {
            case FormulaKind::Implies: return 1;
            case FormulaKind::Or: return 2;
            case FormulaKind::And: return 3;
            case FormulaKind::Not: return 4;
            case FormulaKind::Exists:
            case FormulaKind::Forall: return 0;
            default: return 5;
        }
    }

    std::string print(int parent_prec) const {
        std::string out;
        switch (kind()) {
            case FormulaKind::Bottom:
                out = "false";
                break;
            case FormulaKind::Eq:
                out = lhs().to_string() + " = " + rhs().to_string();
                break;
            case FormulaKind::Atom: {
                out = rel() + "(";
                for (size_t i = 0; i < args().size(); ++i) {
                    if (i) out += ", ";
                    out += args()[i].to_string();
                }
                out += ")";
                break;
            }
            case FormulaKind::Not:
                // parenthesize atoms too: "!(x = y)" reads better than "!x = y"
                out = "!" + child().print(6);
                break;
            case FormulaKind::And:
                out = left().print(3) + " & " + right().print(4);
                break;
            case FormulaKind::Or:
                out = left().print(2) + " | " + right().print(3);
                break;
            case FormulaKind::Implies:
                // right-associative
                out = left().print(2) + " -> " + right().print(1);
                break;
            case FormulaKind::Exists:
            case FormulaKind::Forall:
                out = (kind() == FormulaKind::Exists ? "exists " : "forall ") + var() +
                      ". " + body().print(0);
                break;
        }
        bool need_parens = precedence() < parent_prec ||
                           (is_quantifier() && parent_prec > 0);
        return need_parens ? "(" + out + ")" : out;
    }

    Formula() = default;
    std::shared_ptr<const Node> node_;
};

inline void collect_term_vars(const Term& t, std::set<std::string>& out) {
    if (t.is_var()) out.insert(t.name());
    else
        for (const Term& a : t.args()) collect_term_vars(a, out);
}

namespace detail {
inline void free_vars_rec(const Formula& f, std::set<std::string>& bound,
                          std::vector<std::string>& order, std::set<std::string>& seen) {
    auto add_term = [&](const Term& t) {
        std::set<std::string> vs;
        collect_term_vars(t, vs);
        for (const auto& v : vs)
            if (!bound.count(v) && seen.insert(v).second) order.push_back(v);
    };
    switch (f.kind()) {
        case FormulaKind::Bottom: return;
        case FormulaKind::Eq:
            add_term(f.lhs());
            add_term(f.rhs());
            return;
        case FormulaKind::Atom:
            for (const Term& t : f.args()) add_term(t);
            return;
        case FormulaKind::Not:
            free_vars_rec(f.child(), bound, order, seen);
            return;
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
            free_vars_rec(f.left(), bound, order, seen);
            free_vars_rec(f.right(), bound, order, seen);
            return;
        case FormulaKind::Exists:
        case FormulaKind::Forall: {
            bool inserted = bound.insert(f.var()).second;
            free_vars_rec(f.body(), bound, order, seen);
            if (inserted) bound.erase(f.var());
            return;
        }
    }
}
} // namespace detail

/// Free variables in order of first occurrence.
inline std::vector<std::string> free_variables(const Formula& f) {
    std::set<std::string> bound, seen;
    std::vector<std::string> order;
    detail::free_vars_rec(f, bound, order, seen);
    return order;
}

/// Every variable name occurring anywhere (free or bound).
inline std::set<std::string> all_variable_names(const Formula& f) {
    std::set<std::string> out;
    switch (f.kind()) {
        case FormulaKind::Bottom: break;
        case FormulaKind::Eq:
            collect_term_vars(f.lhs(), out);
            collect_term_vars(f.rhs(), out);
            break;
        case FormulaKind::Atom:
            for (const Term& t : f.args()) collect_term_vars(t, out);
            break;
        case FormulaKind::Not:
            out = all_variable_names(f.child());
            break;
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies: {
            out = all_variable_names(f.left());
            auto r = all_variable_names(f.right());
            out.insert(r.begin(), r.end());
            break;
        }
        case FormulaKind::Exists:
        case FormulaKind::Forall: {
            out = all_variable_names(f.body());
            out.insert(f.var());
            break;
        }
    }
    return out;
}

/// Syntactic fragment flags. is_positive means built from equalities with
/// the binary connectives only; positive Horn allows quantifiers but no
/// disjunction, so neither flag implies the other.
struct FragmentTag {
    bool is_positive_horn = false;
    bool is_primitive_positive = false;
    bool is_positive = false;
    bool is_quantifier_free = false;
    bool is_forall_exists = false;
    bool is_negative_shape = false;
};

namespace detail {
struct FragmentScan {
    bool has_or = false, has_not = false, has_implies = false;
    bool has_exists = false, has_forall = false, has_atom = false;
    bool has_bottom = false;
};

inline void fragment_scan(const Formula& f, FragmentScan& s) {
    switch (f.kind()) {
        case FormulaKind::Bottom: s.has_bottom = true; return;
        case FormulaKind::Eq: return;
        case FormulaKind::Atom: s.has_atom = true; return;
        case FormulaKind::Not: s.has_not = true; fragment_scan(f.child(), s); return;
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
            if (f.kind() == FormulaKind::Or) s.has_or = true;
            if (f.kind() == FormulaKind::Implies) s.has_implies = true;
            fragment_scan(f.left(), s);
            fragment_scan(f.right(), s);
            return;
        case FormulaKind::Exists: s.has_exists = true; fragment_scan(f.body(), s); return;
        case FormulaKind::Forall: s.has_forall = true; fragment_scan(f.body(), s); return;
    }
}

// Conjunction of (i) equalities and (ii) disjunctions of disequalities.
inline bool is_diseq(const Formula& f) {
    return f.kind() == FormulaKind::Not && f.child().kind() == FormulaKind::Eq;
}
inline bool is_diseq_clause(const Formula& f) {
    if (is_diseq(f)) return true;
    return f.kind() == FormulaKind::Or && is_diseq_clause(f.left()) &&
           is_diseq_clause(f.right());
}
inline bool is_negative_shape_rec(const Formula& f) {
    if (f.kind() == FormulaKind::Eq || is_diseq_clause(f)) return true;
    return f.kind() == FormulaKind::And && is_negative_shape_rec(f.left()) &&
           is_negative_shape_rec(f.right());
}
} // namespace detail

inline FragmentTag classify_fragment(const Formula& f) {
    detail::FragmentScan s;
    detail::fragment_scan(f, s);
    FragmentTag tag;
    tag.is_positive_horn = !s.has_or && !s.has_not && !s.has_implies;
    tag.is_primitive_positive = tag.is_positive_horn && !s.has_forall;
    tag.is_positive = !s.has_not && !s.has_implies && !s.has_exists && !s.has_forall &&
                      !s.has_atom && !s.has_bottom;
    tag.is_quantifier_free = !s.has_exists && !s.has_forall;
    // forall* exists* prefix over a quantifier-free matrix
    const Formula* g = &f;
    while (g->kind() == FormulaKind::Forall) g = &g->body();
    while (g->kind() == FormulaKind::Exists) g = &g->body();
    detail::FragmentScan ms;
    detail::fragment_scan(*g, ms);
    tag.is_forall_exists = !ms.has_exists && !ms.has_forall;
    tag.is_negative_shape = detail::is_negative_shape_rec(f);
    return tag;
}

namespace detail {

inline Term rename_term(const Term& t, const std::map<std::string, std::string>& sub) {
    if (t.is_var()) {
        auto it = sub.find(t.name());
        return it == sub.end() ? t : Term::var(it->second);
    }
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const Term& a : t.args()) args.push_back(rename_term(a, sub));
    return Term::app(t.name(), std::move(args));
}

/// Renames free occurrences of variables per `sub`; binders shadow.
inline Formula rename_free(const Formula& f, std::map<std::string, std::string> sub) {
    if (sub.empty()) return f;
    switch (f.kind()) {
        case FormulaKind::Bottom: return f;
        case FormulaKind::Eq:
            return Formula::eq(rename_term(f.lhs(), sub), rename_term(f.rhs(), sub));
        case FormulaKind::Atom: {
            std::vector<Term> args;
            for (const Term& t : f.args()) args.push_back(rename_term(t, sub));
            return Formula::atom(f.rel(), std::move(args));
        }
        case FormulaKind::Not: return Formula::negation(rename_free(f.child(), sub));
        case FormulaKind::And: return Formula::conj(rename_free(f.left(), sub), rename_free(f.right(), sub));
        case FormulaKind::Or: return Formula::disj(rename_free(f.left(), sub), rename_free(f.right(), sub));
        case FormulaKind::Implies:
            return Formula::implies(rename_free(f.left(), sub), rename_free(f.right(), sub));
        case FormulaKind::Exists:
        case FormulaKind::Forall: {
            auto inner = sub;
            inner.erase(f.var());
            return Formula::quantifier(f.kind(), f.var(), rename_free(f.body(), inner));
        }
    }
    return f; // unreachable
}

// Fresh-name scheme: strip any existing "#n" suffix, then append "#1", "#2",
// ... until unused. The suffix namespace is owned by the normalizer, which is
// what keeps the scheme deterministic.
inline std::string strip_reserved_suffix(const std::string& name) {
    auto pos = name.rfind('#');
    if (pos == std::string::npos || pos == 0) return name;
    for (size_t i = pos + 1; i < name.size(); ++i)
        if (!isdigit(static_cast<unsigned char>(name[i]))) return name;
    if (pos + 1 == name.size()) return name;
    return name.substr(0, pos);
}

inline std::string fresh_name(const std::string& base_in, std::set<std::string>& taken) {
    std::string base = strip_reserved_suffix(base_in);
    if (!taken.count(base) && base == base_in) {
        taken.insert(base);
        return base;
    }
    for (int n = 1;; ++n) {
        std::string cand = base + "#" + std::to_string(n);
        if (taken.insert(cand).second) return cand;
    }
}

inline Formula alpha_rec(const Formula& f, std::set<std::string>& taken,
                         std::set<std::string>& on_path) {
    switch (f.kind()) {
        case FormulaKind::Bottom:
        case FormulaKind::Eq:
        case FormulaKind::Atom: return f;
        case FormulaKind::Not: return Formula::negation(alpha_rec(f.child(), taken, on_path));
        case FormulaKind::And:
            return Formula::conj(alpha_rec(f.left(), taken, on_path),
                                 alpha_rec(f.right(), taken, on_path));
        case FormulaKind::Or:
            return Formula::disj(alpha_rec(f.left(), taken, on_path),
                                 alpha_rec(f.right(), taken, on_path));
        case FormulaKind::Implies:
            return Formula::implies(alpha_rec(f.left(), taken, on_path),
                                    alpha_rec(f.right(), taken, on_path));
        case FormulaKind::Exists:
        case FormulaKind::Forall: {
            std::string v = f.var();
            Formula body = f.body();
            if (on_path.count(v)) { // collides with an outer binder or a free var
                std::string v2 = fresh_name(v, taken);
                body = rename_free(body, {{v, v2}});
                v = v2;
            } else {
                taken.insert(v);
            }
            on_path.insert(v);
            Formula out = Formula::quantifier(f.kind(), v, alpha_rec(body, taken, on_path));
            on_path.erase(v);
            return out;
        }
    }
    return f; // unreachable
}

} // namespace detail

/// Enforces the binder invariant: along any quantifier path no name is bound
/// twice and no bound name collides with a free variable of the formula.
/// Deterministic; fresh names carry the reserved "#n" suffix.
inline Formula alpha_normalize(const Formula& f) {
    std::set<std::string> taken = all_variable_names(f);
    std::set<std::string> on_path;
    for (const auto& v : free_variables(f)) on_path.insert(v);
    return detail::alpha_rec(f, taken, on_path);
}

} // namespace periomorph
