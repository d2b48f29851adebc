#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "periomorph/finstruct.hpp"
#include "periomorph/formula.hpp"

namespace periomorph {

/// Relational language for sentence enumeration. Equality and ⊥ are always
/// available; functions are not enumerated.
struct Language {
    std::map<std::string, int> relations; // name -> arity
};

inline Language language_of(const FiniteStructure& s) {
    Language lang;
    for (const auto& [rel, data] : s.relations) lang.relations[rel] = data.arity;
    return lang;
}

struct PhBounds {
    int max_vars = 4;
    int max_size = 6;  // AST node count
    int max_depth = 6; // quantifier nesting
};

namespace detail {

inline std::string enum_var(int i) { return "v" + std::to_string(i); }

class PhEnumerator {
public:
    PhEnumerator(const Language& lang, const PhBounds& bounds)
        : lang_(lang), bounds_(bounds) {}

    /// Closed pH formulas of size <= max_size, smallest first, print-deduped.
    std::vector<Formula> sentences() {
        std::vector<Formula> out;
        for (int s = 1; s <= bounds_.max_size; ++s)
            for (const auto& f : stratum(s, 0)) out.push_back(f);
        return out;
    }

private:
    // Formulas of exactly `size` nodes whose free variables sit inside
    // v0..v_{scope-1}; quantifiers always bind the next pool variable.
    const std::vector<Formula>& stratum(int size, int scope) {
        auto key = std::make_pair(size, scope);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        std::vector<Formula> out;
        if (size == 1) {
            out.push_back(Formula::bottom());
            for (int i = 0; i < scope; ++i)
                for (int j = i + 1; j < scope; ++j)
                    out.push_back(Formula::eq(Term::var(enum_var(i)), Term::var(enum_var(j))));
            for (const auto& [rel, arity] : lang_.relations)
                for_each_tuple(scope, arity, [&](const std::vector<int>& tup) {
                    std::vector<Term> args;
                    args.reserve(tup.size());
                    for (int v : tup) args.push_back(Term::var(enum_var(v)));
                    out.push_back(Formula::atom(rel, std::move(args)));
                });
        } else {
            // scope also counts the enclosing quantifiers, so it doubles as
            // the nesting depth
            if (scope < bounds_.max_vars && scope < bounds_.max_depth) {
                const std::string v = enum_var(scope);
                for (const Formula& body : stratum(size - 1, scope + 1)) {
                    bool mentions = false;
                    for (const auto& fv : free_variables(body))
                        if (fv == v) { mentions = true; break; }
                    if (!mentions) continue; // skip vacuous quantification
                    out.push_back(Formula::exists(v, body));
                    out.push_back(Formula::forall(v, body));
                }
            }
            for (int s1 = 1; s1 + 2 <= size; ++s1) {
                int s2 = size - 1 - s1;
                if (s2 < s1) break;
                for (const Formula& l : stratum(s1, scope)) {
                    if (l.kind() == FormulaKind::And) continue; // right-nested chains only
                    for (const Formula& r : stratum(s2, scope)) {
                        if (s1 == s2 && !(l.to_string() < r.to_string())) continue;
                        out.push_back(Formula::conj(l, r));
                    }
                }
            }
        }
        std::sort(out.begin(), out.end(), [](const Formula& a, const Formula& b) {
            return a.to_string() < b.to_string();
        });
        out.erase(std::unique(out.begin(), out.end(),
                              [](const Formula& a, const Formula& b) {
                                  return a.to_string() == b.to_string();
                              }),
                  out.end());
        return memo_.emplace(key, std::move(out)).first->second;
    }

    template <typename F>
    static void for_each_tuple(int base, int len, F&& fn) {
        if (base == 0 && len > 0) return;
        std::vector<int> tup(len, 0);
        while (true) {
            fn(tup);
            int i = len - 1;
            while (i >= 0 && tup[i] == base - 1) tup[i--] = 0;
            if (i < 0) break;
            ++tup[i];
        }
    }

    Language lang_;
    PhBounds bounds_;
    std::map<std::pair<int, int>, std::vector<Formula>> memo_;
};

} // namespace detail

/// Deterministic stream of pH sentences up to the structural bounds.
inline std::vector<Formula> enumerate_ph_sentences(const Language& lang, const PhBounds& bounds) {
    return detail::PhEnumerator(lang, bounds).sentences();
}

/// Bounded approximation of "every pH sentence true in s is true in t":
/// sound for refutation, incomplete for affirmation. Only the relational
/// part of the language is enumerated.
inline bool ph_entails(const FiniteStructure& s, const FiniteStructure& t,
                       const PhBounds& bounds = {}) {
    if (!s.same_language(t)) throw Error("ph_entails: structures have different languages");
    for (const Formula& f : enumerate_ph_sentences(language_of(s), bounds))
        if (evaluate(s, f) && !evaluate(t, f)) return false;
    return true;
}

/// Seeded random closed pH sentence; deterministic for a fixed generator
/// state across platforms.
inline Formula random_ph_sentence(std::mt19937& gen, const std::map<std::string, int>& relations,
                                  int max_vars = 4, int max_depth = 6) {
    struct Gen {
        std::mt19937& g;
        const std::map<std::string, int>& rels;
        int max_vars;
        std::vector<std::string> rel_names;

        Formula atom(int scope) {
            // scope >= 1 here
            if (draw(g, 25) == 0) return Formula::bottom();
            int n = static_cast<int>(rel_names.size());
            int pick = draw(g, n + 1);
            if (pick == 0 || n == 0) {
                int i = draw(g, scope), j = draw(g, scope);
                return Formula::eq(Term::var(detail::enum_var(i)), Term::var(detail::enum_var(j)));
            }
            const std::string& rel = rel_names[static_cast<size_t>(pick - 1)];
            int arity = rels.at(rel);
            std::vector<Term> args;
            for (int i = 0; i < arity; ++i) args.push_back(Term::var(detail::enum_var(draw(g, scope))));
            return Formula::atom(rel, std::move(args));
        }

        Formula gen_rec(int scope, int depth) {
            bool can_quant = scope < max_vars && depth > 0;
            if (scope == 0) {
                if (!can_quant || draw(g, 20) == 0) return Formula::bottom();
                std::string v = detail::enum_var(scope);
                Formula body = gen_rec(scope + 1, depth - 1);
                return draw(g, 2) ? Formula::forall(v, body) : Formula::exists(v, body);
            }
            if (depth == 0) return atom(scope);
            int pick = draw(g, 10);
            if (pick < 4) return atom(scope);
            if (pick < 6) return Formula::conj(gen_rec(scope, depth - 1), gen_rec(scope, depth - 1));
            if (!can_quant) return atom(scope);
            std::string v = detail::enum_var(scope);
            Formula body = gen_rec(scope + 1, depth - 1);
            return pick < 8 ? Formula::exists(v, body) : Formula::forall(v, body);
        }
    };
    Gen g{gen, relations, max_vars, {}};
    for (const auto& [name, arity] : relations) g.rel_names.push_back(name);
    return g.gen_rec(0, max_depth);
}

} // namespace periomorph
