#pragma once

#include <map>
#include <string>
#include <vector>

#include "periomorph/eqrel.hpp"
#include "periomorph/finstruct.hpp"
#include "periomorph/rewrite.hpp"

namespace periomorph {

namespace detail {

struct QcspGame {
    const EqTemplate& tmpl;
    std::vector<std::pair<FormulaKind, std::string>> prefix;
    Formula matrix;
    std::map<std::string, int> var_pos;
    std::map<std::pair<size_t, std::vector<int>>, bool> memo;
    std::vector<std::string>* trace = nullptr;

    QcspGame(const EqTemplate& t, Formula m) : tmpl(t), matrix(std::move(m)) {}

    bool matrix_holds(const Formula& f, const std::vector<int>& classes) const {
        switch (f.kind()) {
            case FormulaKind::Bottom:
                return false;
            case FormulaKind::Eq:
                return classes[static_cast<size_t>(var_pos.at(f.lhs().name()))] ==
                       classes[static_cast<size_t>(var_pos.at(f.rhs().name()))];
            case FormulaKind::Atom: {
                auto it = tmpl.relations.find(f.rel());
                std::vector<int> labels;
                labels.reserve(f.args().size());
                for (const Term& a : f.args())
                    labels.push_back(classes[static_cast<size_t>(var_pos.at(a.name()))]);
                return it->second.contains(Partition(labels));
            }
            case FormulaKind::And:
                return matrix_holds(f.left(), classes) && matrix_holds(f.right(), classes);
            default:
                throw Error("qcsp: matrix is not a conjunction of atoms");
        }
    }

    void log(size_t depth, const std::string& line) {
        if (trace) trace->push_back(std::string(2 * depth, ' ') + line);
    }

    bool play(size_t i, std::vector<int>& classes, int used_classes) {
        if (i == prefix.size()) {
            bool v = matrix_holds(matrix, classes);
            log(i, std::string("matrix -> ") + (v ? "true" : "false"));
            return v;
        }
        auto key = std::make_pair(i, classes);
        if (auto it = memo.find(key); it != memo.end()) {
            log(i, "(cached) -> " + std::string(it->second ? "true" : "false"));
            return it->second;
        }
        const auto& [kind, var] = prefix[i];
        const bool is_exists = kind == FormulaKind::Exists;
        bool result = !is_exists;
        // moves: one of the existing classes, or a fresh value
        for (int c = 0; c <= used_classes; ++c) {
            log(i, std::string(is_exists ? "exists " : "forall ") + var + " := " +
                       (c == used_classes ? "fresh class " : "class ") + std::to_string(c));
            classes.push_back(c);
            bool v = play(i + 1, classes, used_classes + (c == used_classes ? 1 : 0));
            classes.pop_back();
            if (is_exists && v) { result = true; break; }
            if (!is_exists && !v) { result = false; break; }
        }
        memo.emplace(std::move(key), result);
        return result;
    }
};

} // namespace detail

/// Exact truth of a positive Horn sentence over the (countably infinite)
/// equality template, via the quantifier game on partitions: the sentence is
/// prenexed, a quantified variable joins an existing class or takes a fresh
/// value, and atoms are decided by pattern membership. Game states are
/// memoized on (position, partition).
inline bool solve(const EqTemplate& t, const Formula& sentence,
                  std::vector<std::string>* trace = nullptr) {
    if (!classify_fragment(sentence).is_positive_horn)
        throw Error("solve: sentence is not positive Horn");
    if (!free_variables(sentence).empty())
        throw Error("solve: formula is not a sentence");
    // symbol/arity validation against the template
    {
        std::vector<const Formula*> stack{&sentence};
        while (!stack.empty()) {
            const Formula& f = *stack.back();
            stack.pop_back();
            switch (f.kind()) {
                case FormulaKind::Atom: {
                    auto it = t.relations.find(f.rel());
                    if (it == t.relations.end())
                        throw Error("solve: unknown relation symbol '" + f.rel() + "'");
                    if (static_cast<int>(f.args().size()) != it->second.arity)
                        throw Error("solve: relation '" + f.rel() + "' expects arity " +
                                    std::to_string(it->second.arity));
                    for (const Term& a : f.args())
                        if (!a.is_var())
                            throw Error("solve: relation arguments must be variables");
                    break;
                }
                case FormulaKind::Eq:
                    if (!f.lhs().is_var() || !f.rhs().is_var())
                        throw Error("solve: function symbols are not part of an equality template");
                    break;
                case FormulaKind::And:
                    stack.push_back(&f.left());
                    stack.push_back(&f.right());
                    break;
                case FormulaKind::Exists:
                case FormulaKind::Forall:
                    stack.push_back(&f.body());
                    break;
                default:
                    break;
            }
        }
    }
    Formula pn = prenex(sentence);
    detail::QcspGame game(t, pn);
    const Formula* g = &pn;
    while (g->is_quantifier()) {
        game.var_pos[g->var()] = static_cast<int>(game.prefix.size());
        game.prefix.emplace_back(g->kind(), g->var());
        g = &g->body();
    }
    game.matrix = *g;
    game.trace = trace;
    std::vector<int> classes;
    bool v = game.play(0, classes, 0);
    if (trace) trace->push_back(std::string("result: ") + (v ? "true" : "false"));
    return v;
}

/// Oracle: materialize the template over an n-element domain and evaluate by
/// brute force. Agrees with solve whenever n >= the number of variables of
/// the sentence.
inline bool solve_bruteforce(const EqTemplate& t, const Formula& sentence, int domain_size) {
    if (!free_variables(sentence).empty())
        throw Error("solve_bruteforce: formula is not a sentence");
    if (domain_size < 1 || domain_size > 8)
        throw Error("solve_bruteforce: domain size outside 1..8");
    FiniteStructure s = materialize_template(t, domain_size);
    return evaluate(s, sentence);
}

/// Number of quantified variables after alpha normalization; the canonical
/// brute-force domain size.
inline int sentence_variable_count(const Formula& sentence) {
    Formula f = alpha_normalize(sentence);
    return static_cast<int>(all_variable_names(f).size());
}

} // namespace periomorph
