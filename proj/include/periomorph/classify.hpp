#pragma once

#include <optional>
#include <string>
#include <vector>

#include "periomorph/eqrel.hpp"
#include "periomorph/parser.hpp"
#include "periomorph/qcsp.hpp"
#include "periomorph/rewrite.hpp"

namespace periomorph {

enum class ComplexityClass { InL, NpComplete, CoNpHard };

inline std::string to_string(ComplexityClass c) {
    switch (c) {
        case ComplexityClass::InL: return "in L";
        case ComplexityClass::NpComplete: return "NP-complete";
        case ComplexityClass::CoNpHard: return "coNP-hard";
    }
    return "?";
}

/// The ternary relation defined by x=y | y=z.
inline EqRelation relation_P() {
    Formula f = Formula::disj(Formula::eq(Term::var("x0"), Term::var("x1")),
                              Formula::eq(Term::var("x1"), Term::var("x2")));
    return compile(f, {"x0", "x1", "x2"});
}

/// The ternary relation defined by x=y -> y=z.
inline EqRelation relation_I() {
    Formula f = Formula::implies(Formula::eq(Term::var("x0"), Term::var("x1")),
                                 Formula::eq(Term::var("x1"), Term::var("x2")));
    return compile(f, {"x0", "x1", "x2"});
}

struct RelationEvidence {
    std::string symbol;
    EqRelation patterns;
    bool negative = false;
    bool positive = false;
    std::optional<Partition> non_negative_witness; // in the hull but not in the relation
    std::optional<std::pair<Partition, Partition>> non_positive_witness; // (member, missing coarsening)
};

enum class WitnessStatus { NotSearched, NotApplicable, Found, NotFound };

struct WitnessBounds {
    int aux_vars = 4;
    int max_alternations = 3;
    int max_size = 8;           // AST nodes
    size_t stratum_cap = 200000; // distinct signatures per search
};

struct ComplexityVerdict {
    ComplexityClass cls = ComplexityClass::InL;
    std::vector<RelationEvidence> evidence;
    WitnessStatus witness_status = WitnessStatus::NotSearched;
    std::string witness_target; // "P" or "I"
    std::optional<Formula> witness;
    std::string note;
};

/// The trichotomy: in L iff every relation is negative;
/// NP-complete iff not all negative but all positive; coNP-hard otherwise.
/// A pure function of the per-relation negativity/positivity bits.
inline ComplexityVerdict classify(const EqTemplate& t) {
    ComplexityVerdict v;
    bool all_negative = true, all_positive = true;
    for (const auto& [name, r] : t.relations) {
        RelationEvidence e;
        e.symbol = name;
        e.patterns = r;
        e.negative = is_negative(r);
        e.positive = is_positive(r);
        if (!e.negative && !r.patterns.empty()) {
            EqRelation hull = negative_hull(r);
            for (const Partition& p : hull.patterns)
                if (!r.contains(p)) { e.non_negative_witness = p; break; }
        }
        if (!e.positive) e.non_positive_witness = positivity_violation(r);
        all_negative = all_negative && e.negative;
        all_positive = all_positive && e.positive;
        v.evidence.push_back(std::move(e));
    }
    if (all_negative) {
        v.cls = ComplexityClass::InL;
        v.witness_status = WitnessStatus::NotApplicable;
    } else if (all_positive) {
        v.cls = ComplexityClass::NpComplete;
        v.witness_target = "P";
        v.note = "hardness per cited prior work (NP-hardness of the P template)";
    } else {
        v.cls = ComplexityClass::CoNpHard;
        v.witness_target = "I";
        v.note = "hardness per cited prior work (coNP-hardness of the I template); "
                 "no upper bound is claimed";
    }
    return v;
}

namespace detail {

inline int quantifier_alternations(const Formula& f, FormulaKind prev = FormulaKind::Bottom) {
    switch (f.kind()) {
        case FormulaKind::And:
            return std::max(quantifier_alternations(f.left(), prev),
                            quantifier_alternations(f.right(), prev));
        case FormulaKind::Exists:
        case FormulaKind::Forall: {
            bool flip = (prev == FormulaKind::Exists || prev == FormulaKind::Forall) &&
                        prev != f.kind();
            return (flip ? 1 : 0) + quantifier_alternations(f.body(), f.kind());
        }
        default:
            return 0;
    }
}

/// Bounded iterative-deepening search for a pH formula over the template's
/// symbols that compiles exactly to the target pattern set. Formulas are
/// deduplicated by their semantic signature: the set of satisfying
/// partitions over the full variable context (free slots + auxiliary pool),
/// which is a congruence for conjunction and quantification.
class WitnessSearch {
public:
    WitnessSearch(const EqTemplate& t, const EqRelation& target, const WitnessBounds& bounds)
        : tmpl_(t), target_(target), bounds_(bounds) {
        k_ = target.arity;
        ctx_ = k_ + bounds_.aux_vars;
        if (ctx_ > kMaxPartitionSize)
            throw Error("find_ph_witness: context exceeds partition cap");
        parts_ = all_partitions(ctx_);
        for (int i = 0; i < static_cast<int>(parts_.size()); ++i) part_index_[parts_[i]] = i;
        // groups for quantifying out one auxiliary slot
        groups_.resize(static_cast<size_t>(ctx_));
        for (int j = k_; j < ctx_; ++j) {
            std::vector<int> keep;
            for (int i = 0; i < ctx_; ++i)
                if (i != j) keep.push_back(i);
            std::map<Partition, std::vector<int>> g;
            for (int i = 0; i < static_cast<int>(parts_.size()); ++i)
                g[induced_pattern(parts_[i], keep)].push_back(i);
            for (auto& [rest, members] : g) groups_[static_cast<size_t>(j)].push_back(members);
        }
        target_sig_ = blank_sig();
        std::vector<int> xs(static_cast<size_t>(k_));
        for (int i = 0; i < k_; ++i) xs[static_cast<size_t>(i)] = i;
        for (size_t i = 0; i < parts_.size(); ++i)
            if (target.contains(induced_pattern(parts_[i], xs))) set_bit(target_sig_, i);
    }

    std::optional<Formula> run() {
        std::vector<Entry> current = atoms();
        strata_.push_back(current);
        if (auto hit = best_match(current)) return hit;
        for (int size = 2; size <= bounds_.max_size; ++size) {
            std::vector<Entry> next = grow(size);
            strata_.push_back(next);
            if (auto hit = best_match(next)) return hit;
            if (total_entries_ > bounds_.stratum_cap) break; // bounds exhausted
        }
        return std::nullopt;
    }

private:
    using Sig = std::vector<uint64_t>; // one bit per partition of the context

    struct Entry {
        Formula formula;
        Sig sig;
    };

    Sig blank_sig() const { return Sig((parts_.size() + 63) / 64, 0); }
    static void set_bit(Sig& s, size_t i) { s[i / 64] |= uint64_t{1} << (i % 64); }
    static bool test_bit(const Sig& s, size_t i) { return (s[i / 64] >> (i % 64)) & 1; }

    std::string ctx_var(int i) const {
        return i < k_ ? "x" + std::to_string(i) : "w" + std::to_string(i - k_);
    }

    bool add_entry(std::vector<Entry>& out, Formula f, Sig sig) {
        if (total_entries_ > bounds_.stratum_cap || ++work_ > 100 * bounds_.stratum_cap)
            return false;
        if (detail::quantifier_alternations(f) > bounds_.max_alternations) return true;
        if (seen_.insert(sig).second) {
            out.push_back({std::move(f), std::move(sig)});
            ++total_entries_;
        }
        return true;
    }

    std::vector<Entry> atoms() {
        std::vector<Entry> out;
        add_entry(out, Formula::bottom(), blank_sig());
        for (int i = 0; i < ctx_; ++i) {
            for (int j = i + 1; j < ctx_; ++j) {
                Sig sig = blank_sig();
                for (size_t p = 0; p < parts_.size(); ++p)
                    if (parts_[p].together(i, j)) set_bit(sig, p);
                add_entry(out, Formula::eq(Term::var(ctx_var(i)), Term::var(ctx_var(j))),
                          std::move(sig));
            }
        }
        for (const auto& [rel, r] : tmpl_.relations) {
            if (r.arity == 0) continue;
            std::vector<int> tup(static_cast<size_t>(r.arity), 0);
            while (true) {
                Sig sig = blank_sig();
                for (size_t p = 0; p < parts_.size(); ++p)
                    if (r.contains(induced_pattern(parts_[p], tup))) set_bit(sig, p);
                std::vector<Term> args;
                for (int pos : tup) args.push_back(Term::var(ctx_var(pos)));
                add_entry(out, Formula::atom(rel, std::move(args)), std::move(sig));
                int i = r.arity - 1;
                while (i >= 0 && tup[static_cast<size_t>(i)] + 1 == ctx_) tup[static_cast<size_t>(i--)] = 0;
                if (i < 0) break;
                ++tup[static_cast<size_t>(i)];
            }
        }
        return out;
    }

    std::vector<Entry> grow(int size) {
        std::vector<Entry> out;
        // quantifier extensions of the previous stratum
        for (const Entry& e : strata_[static_cast<size_t>(size - 2)]) {
            for (int j = k_; j < ctx_; ++j) {
                Sig ex = blank_sig(), all = blank_sig();
                for (const auto& group : groups_[static_cast<size_t>(j)]) {
                    bool any = false, every = true;
                    for (int idx : group) {
                        bool b = test_bit(e.sig, static_cast<size_t>(idx));
                        any = any || b;
                        every = every && b;
                    }
                    for (int idx : group) {
                        if (any) set_bit(ex, static_cast<size_t>(idx));
                        if (every) set_bit(all, static_cast<size_t>(idx));
                    }
                }
                if (!add_entry(out, Formula::exists(ctx_var(j), e.formula), std::move(ex)))
                    return out;
                if (!add_entry(out, Formula::forall(ctx_var(j), e.formula), std::move(all)))
                    return out;
            }
        }
        // conjunctions split across earlier strata
        for (int s1 = 1; 2 * s1 <= size - 1; ++s1) {
            int s2 = size - 1 - s1;
            const auto& left = strata_[static_cast<size_t>(s1 - 1)];
            const auto& right = strata_[static_cast<size_t>(s2 - 1)];
            for (const Entry& l : left) {
                for (const Entry& r : right) {
                    Sig sig(l.sig.size());
                    for (size_t w = 0; w < sig.size(); ++w) sig[w] = l.sig[w] & r.sig[w];
                    if (!add_entry(out, Formula::conj(l.formula, r.formula), std::move(sig)))
                        return out;
                }
            }
        }
        return out;
    }

    std::optional<Formula> best_match(const std::vector<Entry>& stratum) {
        std::optional<Formula> best;
        std::string best_print;
        for (const Entry& e : stratum) {
            if (e.sig != target_sig_) continue;
            bool clean = true; // free variables must sit inside the target slots
            for (const auto& v : free_variables(e.formula))
                if (v.size() > 0 && v[0] != 'x') { clean = false; break; }
            if (!clean) continue;
            std::string p = e.formula.to_string();
            if (!best || p < best_print) {
                best = e.formula;
                best_print = p;
            }
        }
        if (best) {
            // cross-check the signature machinery against the compiler
            std::vector<std::string> xs;
            for (int i = 0; i < k_; ++i) xs.push_back("x" + std::to_string(i));
            if (!(compile_over(tmpl_, *best, xs) == target_))
                throw Error("find_ph_witness: internal signature/compile mismatch");
        }
        return best;
    }

    const EqTemplate& tmpl_;
    EqRelation target_;
    WitnessBounds bounds_;
    int k_ = 0, ctx_ = 0;
    std::vector<Partition> parts_;
    std::map<Partition, int> part_index_;
    std::vector<std::vector<std::vector<int>>> groups_; // per slot: list of index groups
    Sig target_sig_;
    std::set<Sig> seen_;
    std::vector<std::vector<Entry>> strata_;
    size_t total_entries_ = 0;
    size_t work_ = 0;
};

} // namespace detail

/// Bounded search for a pH definition of `target` over the template; a
/// nullopt result means "not found within bounds", never nonexistence.
inline std::optional<Formula> find_ph_witness(const EqTemplate& t, const EqRelation& target,
                                              const WitnessBounds& bounds = {}) {
    if (target.arity < 1) throw Error("find_ph_witness: target arity must be positive");
    return detail::WitnessSearch(t, target, bounds).run();
}

/// classify + witness search for the hard relation of the verdict's class.
inline ComplexityVerdict classify_with_witness(const EqTemplate& t,
                                               const WitnessBounds& bounds = {}) {
    ComplexityVerdict v = classify(t);
    if (v.cls == ComplexityClass::InL) return v;
    EqRelation target = v.cls == ComplexityClass::NpComplete ? relation_P() : relation_I();
    auto w = find_ph_witness(t, target, bounds);
    if (w) {
        v.witness_status = WitnessStatus::Found;
        v.witness = *w;
    } else {
        v.witness_status = WitnessStatus::NotFound;
    }
    return v;
}

// --- the QCSP reduction compiler ---------------------------------------

/// pH definitions of the target language's symbols over the base template.
/// Relation definitions use free variables x0..x_{k-1}; a function definition
/// of arity m uses x0..x_{m-1} for the arguments and xm for the value; a
/// constant definition uses x0.
struct ReductionDefs {
    struct Def {
        int arity = 0;
        Formula psi = Formula::bottom();
    };
    std::map<std::string, Def> relations;
    std::map<std::string, Def> functions; // arity = argument count
    std::map<std::string, Def> constants;

    SymbolTable symbol_table() const {
        SymbolTable st;
        for (const auto& [name, d] : relations) st.relations[name] = d.arity;
        for (const auto& [name, d] : functions) st.functions[name] = d.arity;
        for (const auto& [name, d] : constants) st.functions[name] = 0;
        return st;
    }

    void validate() const {
        auto check = [&](const std::map<std::string, Def>& defs, int extra, const char* what) {
            for (const auto& [name, d] : defs) {
                if (!classify_fragment(d.psi).is_positive_horn)
                    throw Error(std::string("definition of ") + what + " '" + name +
                                "' is not positive Horn");
                int slots = d.arity + extra;
                for (const auto& v : free_variables(d.psi)) {
                    bool ok = false;
                    for (int i = 0; i < slots; ++i)
                        if (v == "x" + std::to_string(i)) { ok = true; break; }
                    if (!ok)
                        throw Error(std::string("definition of ") + what + " '" + name +
                                    "' has stray free variable '" + v + "'");
                }
            }
        };
        check(relations, 0, "relation");
        check(functions, 1, "function");
        check(constants, 1, "constant");
    }
};

namespace detail {

/// psi with parameter variables substituted by actual variables; psi's
/// binders are renamed first so nothing gets captured.
inline Formula instantiate(const Formula& psi, const std::map<std::string, std::string>& sub) {
    std::set<std::string> taken = all_variable_names(psi);
    std::set<std::string> on_path;
    for (const auto& v : free_variables(psi)) on_path.insert(v);
    for (const auto& [from, to] : sub) {
        taken.insert(to);
        on_path.insert(to);
    }
    Formula safe = alpha_rec(psi, taken, on_path);
    return rename_free(safe, sub);
}

inline Formula substitute_defined(const Formula& f, const ReductionDefs& defs) {
    switch (f.kind()) {
        case FormulaKind::Bottom:
            return f;
        case FormulaKind::Eq: {
            // flat forms: x=y stays; f(xs)=y and x=c get their definitions
            if (f.lhs().is_var() && f.rhs().is_var()) return f;
            if (f.lhs().is_var() && f.rhs().is_app()) {
                // x = c
                const std::string& c = f.rhs().name();
                auto it = defs.constants.find(c);
                if (it == defs.constants.end())
                    throw Error("reduce: missing definition for constant '" + c + "'");
                return instantiate(it->second.psi, {{"x0", f.lhs().name()}});
            }
            if (f.lhs().is_app() && f.rhs().is_var()) {
                const std::string& fn = f.lhs().name();
                if (f.lhs().args().empty()) {
                    auto it = defs.constants.find(fn);
                    if (it == defs.constants.end())
                        throw Error("reduce: missing definition for constant '" + fn + "'");
                    return instantiate(it->second.psi, {{"x0", f.rhs().name()}});
                }
                auto it = defs.functions.find(fn);
                if (it == defs.functions.end())
                    throw Error("reduce: missing definition for function '" + fn + "'");
                std::map<std::string, std::string> sub;
                for (size_t i = 0; i < f.lhs().args().size(); ++i)
                    sub["x" + std::to_string(i)] = f.lhs().args()[i].name();
                sub["x" + std::to_string(f.lhs().args().size())] = f.rhs().name();
                return instantiate(it->second.psi, sub);
            }
            throw Error("reduce: equality atom is not flat: " + f.to_string());
        }
        case FormulaKind::Atom: {
            auto it = defs.relations.find(f.rel());
            if (it == defs.relations.end())
                throw Error("reduce: missing definition for relation '" + f.rel() + "'");
            std::map<std::string, std::string> sub;
            for (size_t i = 0; i < f.args().size(); ++i) {
                if (!f.args()[i].is_var())
                    throw Error("reduce: atom is not flat: " + f.to_string());
                sub["x" + std::to_string(i)] = f.args()[i].name();
            }
            return instantiate(it->second.psi, sub);
        }
        case FormulaKind::And:
            return Formula::conj(substitute_defined(f.left(), defs),
                                 substitute_defined(f.right(), defs));
        case FormulaKind::Exists:
        case FormulaKind::Forall:
            return Formula::quantifier(f.kind(), f.var(), substitute_defined(f.body(), defs));
        default:
            throw Error("reduce: input must be positive Horn");
    }
}

} // namespace detail

/// The two-step reduction: flatten every atom so it mentions at most one
/// target-language symbol, then replace each flat atom by its pH definition
/// over the base template. Pure-equality atoms pass through.
inline Formula reduce_instance(const Formula& sentence, const ReductionDefs& defs) {
    if (!classify_fragment(sentence).is_positive_horn)
        throw Error("reduce: sentence is not positive Horn");
    defs.validate();
    Formula flat = flatten_atoms(alpha_normalize(sentence));
    return detail::substitute_defined(flat, defs);
}

} // namespace periomorph
