#pragma once

#include <string>

#include "periomorph/eqrel.hpp"

namespace periomorph {

/// A constant map sends every tuple to the all-equal tuple, so it is a
/// polymorphism exactly when every nonempty relation contains the all-equal
/// pattern.
inline bool has_constant_polymorphism(const EqTemplate& t) {
    for (const auto& [name, r] : t.relations)
        if (!r.patterns.empty() && !r.contains(Partition::all_equal(r.arity)))
            return false;
    return true;
}

/// Primitive positive definition of disequality over a template without a
/// constant polymorphism.
struct DisequalityDefinition {
    Formula formula = Formula::bottom();
    std::string first_var, second_var; // the two free variables, in order
    std::string relation;              // relation the construction started from
    Partition tau = Partition::discrete(1); // the coarsest realized pattern used

    std::string to_string() const {
        return "neq(" + first_var + ", " + second_var + ") := " + formula.to_string();
    }
};

/// Constructive half of the constant-or-disequality dichotomy: pick a
/// nonempty relation missing the all-equal pattern, pin its coarsest realized
/// pattern tau with equalities, and project to the lexicographically least
/// pair of positions in distinct tau classes. All ties break
/// lexicographically. The compiled pattern set of the result is {[0,1]}.
inline DisequalityDefinition define_disequality(const EqTemplate& t) {
    if (has_constant_polymorphism(t))
        throw Error("define_disequality: template has a constant polymorphism");
    const std::string* symbol = nullptr;
    const EqRelation* rel = nullptr;
    for (const auto& [name, r] : t.relations) {
        if (!r.patterns.empty() && !r.contains(Partition::all_equal(r.arity))) {
            symbol = &name;
            rel = &r;
            break; // map order = lexicographically least symbol
        }
    }
    const int k = rel->arity;
    // coarsest realized pattern: no other member pattern properly coarsens it
    const Partition* tau = nullptr;
    for (const Partition& p : rel->patterns) {
        bool coarsest = true;
        for (const Partition& q : rel->patterns)
            if (!(q == p) && coarsens(q, p)) { coarsest = false; break; }
        if (coarsest) { tau = &p; break; } // set order = lex tie-break
    }
    // least pair of positions in distinct tau classes
    int pi = -1, pj = -1;
    for (int i = 0; i < k && pi < 0; ++i)
        for (int j = i + 1; j < k; ++j)
            if (!tau->together(i, j)) { pi = i; pj = j; break; }
    // matrix: R x0..x_{k-1} with tau's equalities
    std::vector<Term> args;
    for (int i = 0; i < k; ++i) args.push_back(Term::var(detail::def_var(i)));
    Formula matrix = Formula::atom(*symbol, std::move(args));
    if (auto eqs = detail::equalities_of(*tau)) matrix = Formula::conj(std::move(matrix), *eqs);
    // existentially close everything except x_pi, x_pj
    for (int i = k - 1; i >= 0; --i)
        if (i != pi && i != pj) matrix = Formula::exists(detail::def_var(i), std::move(matrix));
    DisequalityDefinition out;
    out.formula = std::move(matrix);
    out.first_var = detail::def_var(pi);
    out.second_var = detail::def_var(pj);
    out.relation = *symbol;
    out.tau = *tau;
    return out;
}

} // namespace periomorph
