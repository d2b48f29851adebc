#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "periomorph/eqrel.hpp"
#include "periomorph/formula.hpp"

namespace periomorph {

inline constexpr int kMaxProductUniverse = 1024;
inline constexpr long long kMaxTableEntries = 2000000;

// Mixed-radix codes, leftmost digit most significant.
inline int encode_tuple(const std::vector<int>& tuple, int base) {
    int code = 0;
    for (int x : tuple) code = code * base + x;
    return code;
}

inline std::vector<int> decode_tuple(int code, int base, int len) {
    std::vector<int> out(len);
    for (int i = len - 1; i >= 0; --i) {
        out[i] = code % base;
        code /= base;
    }
    return out;
}

inline long long int_pow(int base, int exp) {
    long long out = 1;
    for (int i = 0; i < exp; ++i) {
        out *= base;
        if (out > kMaxTableEntries) return out;
    }
    return out;
}

/// Explicit finite structure: universe 0..size-1, relations as tuple sets,
/// functions as row-major tables (leftmost argument most significant).
struct FiniteStructure {
    struct Relation {
        int arity = 0;
        std::set<std::vector<int>> tuples;
        bool operator==(const Relation&) const = default;
    };
    struct Function {
        int arity = 0;
        std::vector<int> table;
        bool operator==(const Function&) const = default;
    };

    std::string name = "S";
    int size = 1;
    std::map<std::string, Relation> relations;
    std::map<std::string, Function> functions;
    std::map<std::string, int> constants;

    bool operator==(const FiniteStructure&) const = default;

    int apply(const std::string& fn, const std::vector<int>& args) const {
        auto it = functions.find(fn);
        if (it == functions.end()) throw Error("unknown function symbol '" + fn + "'");
        if (static_cast<int>(args.size()) != it->second.arity)
            throw Error("function '" + fn + "' expects arity " + std::to_string(it->second.arity));
        return it->second.table[encode_tuple(args, size)];
    }

    bool holds(const std::string& rel, const std::vector<int>& args) const {
        auto it = relations.find(rel);
        if (it == relations.end()) throw Error("unknown relation symbol '" + rel + "'");
        if (static_cast<int>(args.size()) != it->second.arity)
            throw Error("relation '" + rel + "' expects arity " + std::to_string(it->second.arity));
        return it->second.tuples.count(args) > 0;
    }

    void validate() const {
        if (size < 1) throw Error("structure '" + name + "': universe must be nonempty");
        for (const auto& [rel, data] : relations) {
            for (const auto& tup : data.tuples) {
                if (static_cast<int>(tup.size()) != data.arity)
                    throw Error("relation '" + rel + "': tuple arity mismatch");
                for (int x : tup)
                    if (x < 0 || x >= size) throw Error("relation '" + rel + "': element out of range");
            }
        }
        for (const auto& [fn, data] : functions) {
            if (data.arity < 1) throw Error("function '" + fn + "': arity must be positive");
            long long want = int_pow(size, data.arity);
            if (static_cast<long long>(data.table.size()) != want)
                throw Error("function '" + fn + "': table size " + std::to_string(data.table.size()) +
                            ", expected " + std::to_string(want));
            for (int x : data.table)
                if (x < 0 || x >= size) throw Error("function '" + fn + "': value out of range");
        }
        for (const auto& [c, v] : constants)
            if (v < 0 || v >= size) throw Error("constant '" + c + "' out of range");
    }

    bool same_language(const FiniteStructure& other) const {
        auto arities = [](const FiniteStructure& s) {
            std::map<std::string, std::pair<char, int>> out;
            for (const auto& [n, r] : s.relations) out[n] = {'r', r.arity};
            for (const auto& [n, f] : s.functions) out[n] = {'f', f.arity};
            for (const auto& [n, c] : s.constants) out[n] = {'c', 0};
            return out;
        };
        return arities(*this) == arities(other);
    }
};

namespace detail {

struct FinEnv {
    std::vector<std::pair<std::string, int>> vars;
};

inline int fin_lookup(const FinEnv& env, const std::string& name) {
    for (auto it = env.vars.rbegin(); it != env.vars.rend(); ++it)
        if (it->first == name) return it->second;
    throw Error("unbound variable '" + name + "'");
}

inline int eval_term(const FiniteStructure& s, const Term& t, const FinEnv& env) {
    if (t.is_var()) return fin_lookup(env, t.name());
    if (t.args().empty()) {
        auto it = s.constants.find(t.name());
        if (it == s.constants.end())
            throw Error("uninterpreted constant symbol '" + t.name() + "'");
        return it->second;
    }
    std::vector<int> args;
    args.reserve(t.args().size());
    for (const Term& a : t.args()) args.push_back(eval_term(s, a, env));
    return s.apply(t.name(), args);
}

inline bool eval_formula(const FiniteStructure& s, const Formula& f, FinEnv& env) {
    switch (f.kind()) {
        case FormulaKind::Bottom:
            return false;
        case FormulaKind::Eq:
            return eval_term(s, f.lhs(), env) == eval_term(s, f.rhs(), env);
        case FormulaKind::Atom: {
            std::vector<int> args;
            args.reserve(f.args().size());
            for (const Term& a : f.args()) args.push_back(eval_term(s, a, env));
            return s.holds(f.rel(), args);
        }
        case FormulaKind::Not:
            return !eval_formula(s, f.child(), env);
        case FormulaKind::And:
            return eval_formula(s, f.left(), env) && eval_formula(s, f.right(), env);
        case FormulaKind::Or:
            return eval_formula(s, f.left(), env) || eval_formula(s, f.right(), env);
        case FormulaKind::Implies:
            return !eval_formula(s, f.left(), env) || eval_formula(s, f.right(), env);
        case FormulaKind::Exists:
        case FormulaKind::Forall: {
            const bool is_exists = f.kind() == FormulaKind::Exists;
            for (int a = 0; a < s.size; ++a) {
                env.vars.emplace_back(f.var(), a);
                bool v = eval_formula(s, f.body(), env);
                env.vars.pop_back();
                if (is_exists && v) return true;
                if (!is_exists && !v) return false;
            }
            return !is_exists;
        }
    }
    return false; // unreachable
}

} // namespace detail

/// Tarskian truth by exhaustive quantifier expansion.
inline bool evaluate(const FiniteStructure& s, const Formula& f,
                     const std::map<std::string, int>& assignment = {}) {
    detail::FinEnv env;
    for (const auto& [name, value] : assignment) {
        if (value < 0 || value >= s.size)
            throw Error("assignment for '" + name + "' out of range");
        env.vars.emplace_back(name, value);
    }
    return detail::eval_formula(s, f, env);
}

/// Direct product. Elements are mixed-radix codes over the factor universes,
/// leftmost factor most significant.
inline FiniteStructure product(const std::vector<FiniteStructure>& factors) {
    if (factors.empty()) throw Error("product: need at least one factor");
    for (size_t i = 1; i < factors.size(); ++i)
        if (!factors[0].same_language(factors[i]))
            throw Error("product: factors have different languages");
    long long n = 1;
    for (const auto& s : factors) {
        n *= s.size;
        if (n > kMaxProductUniverse)
            throw Error("product: universe cap " + std::to_string(kMaxProductUniverse) +
                        " exceeded");
    }
    const int m = static_cast<int>(factors.size());
    FiniteStructure out;
    out.name = factors[0].name + "^" + std::to_string(m);
    out.size = static_cast<int>(n);

    // Component codecs: element of the product <-> one element per factor.
    auto encode = [&](const std::vector<int>& comps) {
        int code = 0;
        for (int i = 0; i < m; ++i) code = code * factors[i].size + comps[i];
        return code;
    };

    for (const auto& [rel, data0] : factors[0].relations) {
        FiniteStructure::Relation out_rel;
        out_rel.arity = data0.arity;
        // cartesian combination of one tuple per factor
        std::vector<std::set<std::vector<int>>::const_iterator> its;
        bool empty = false;
        for (const auto& f : factors) {
            const auto& tup = f.relations.at(rel).tuples;
            if (tup.empty()) { empty = true; break; }
            its.push_back(tup.begin());
        }
        if (!empty) {
            while (true) {
                std::vector<int> tuple(data0.arity);
                for (int pos = 0; pos < data0.arity; ++pos) {
                    std::vector<int> comps(m);
                    for (int i = 0; i < m; ++i) comps[i] = (*its[i])[pos];
                    tuple[pos] = encode(comps);
                }
                out_rel.tuples.insert(std::move(tuple));
                int i = m - 1;
                while (i >= 0) {
                    ++its[i];
                    if (its[i] != factors[i].relations.at(rel).tuples.end()) break;
                    its[i] = factors[i].relations.at(rel).tuples.begin();
                    --i;
                }
                if (i < 0) break;
            }
        }
        out.relations[rel] = std::move(out_rel);
    }

    for (const auto& [fn, data0] : factors[0].functions) {
        FiniteStructure::Function out_fn;
        out_fn.arity = data0.arity;
        long long entries = int_pow(out.size, data0.arity);
        if (entries > kMaxTableEntries) throw Error("product: function table cap exceeded");
        out_fn.table.resize(static_cast<size_t>(entries));
        for (long long code = 0; code < entries; ++code) {
            std::vector<int> args = decode_tuple(static_cast<int>(code), out.size, data0.arity);
            std::vector<int> comps(m);
            for (int i = 0; i < m; ++i) {
                std::vector<int> factor_args(data0.arity);
                for (int pos = 0; pos < data0.arity; ++pos) {
                    // component i of product element args[pos]
                    int rem = args[pos];
                    for (int j = m - 1; j > i; --j) rem /= factors[j].size;
                    factor_args[pos] = rem % factors[i].size;
                }
                comps[i] = factors[i].apply(fn, factor_args);
            }
            out_fn.table[static_cast<size_t>(code)] = encode(comps);
        }
        out.functions[fn] = std::move(out_fn);
    }

    for (const auto& [c, v0] : factors[0].constants) {
        std::vector<int> comps(m);
        for (int i = 0; i < m; ++i) comps[i] = factors[i].constants.at(c);
        out.constants[c] = encode(comps);
    }
    return out;
}

inline FiniteStructure product(const FiniteStructure& a, const FiniteStructure& b) {
    return product(std::vector<FiniteStructure>{a, b});
}

inline FiniteStructure power(const FiniteStructure& s, int k) {
    if (k < 1) throw Error("power: exponent must be positive");
    return product(std::vector<FiniteStructure>(static_cast<size_t>(k), s));
}

/// Decomposes a product element into its factor components.
inline std::vector<int> product_components(int code, const std::vector<int>& factor_sizes) {
    std::vector<int> out(factor_sizes.size());
    for (size_t i = factor_sizes.size(); i-- > 0;) {
        out[i] = code % factor_sizes[i];
        code /= factor_sizes[i];
    }
    return out;
}

// --- morphism checks ---------------------------------------------------

namespace detail {
inline void check_map(const std::vector<int>& h, const FiniteStructure& s,
                      const FiniteStructure& t) {
    if (static_cast<int>(h.size()) != s.size)
        throw Error("map must be total on the source universe");
    for (int v : h)
        if (v < 0 || v >= t.size) throw Error("map value out of range");
    if (!s.same_language(t)) throw Error("structures have different languages");
}

inline bool preserves_atoms(const std::vector<int>& h, const FiniteStructure& s,
                            const FiniteStructure& t) {
    for (const auto& [rel, data] : s.relations) {
        for (const auto& tup : data.tuples) {
            std::vector<int> mapped(tup.size());
            for (size_t i = 0; i < tup.size(); ++i) mapped[i] = h[tup[i]];
            if (!t.holds(rel, mapped)) return false;
        }
    }
    for (const auto& [fn, data] : s.functions) {
        long long entries = int_pow(s.size, data.arity);
        for (long long code = 0; code < entries; ++code) {
            std::vector<int> args = decode_tuple(static_cast<int>(code), s.size, data.arity);
            std::vector<int> mapped(args.size());
            for (size_t i = 0; i < args.size(); ++i) mapped[i] = h[args[i]];
            if (h[s.apply(fn, args)] != t.apply(fn, mapped)) return false;
        }
    }
    for (const auto& [c, v] : s.constants)
        if (h[v] != t.constants.at(c)) return false;
    return true;
}
} // namespace detail

inline bool is_homomorphism(const std::vector<int>& h, const FiniteStructure& s,
                            const FiniteStructure& t) {
    detail::check_map(h, s, t);
    return detail::preserves_atoms(h, s, t);
}

inline bool is_surjective(const std::vector<int>& h, const FiniteStructure& s,
                          const FiniteStructure& t) {
    detail::check_map(h, s, t);
    std::set<int> image(h.begin(), h.end());
    return static_cast<int>(image.size()) == t.size;
}

/// Injective homomorphism that also reflects every relation atom.
inline bool is_embedding(const std::vector<int>& h, const FiniteStructure& s,
                         const FiniteStructure& t) {
    detail::check_map(h, s, t);
    std::set<int> image(h.begin(), h.end());
    if (static_cast<int>(image.size()) != s.size) return false; // not injective
    if (!detail::preserves_atoms(h, s, t)) return false;
    for (const auto& [rel, data] : s.relations) {
        long long entries = int_pow(s.size, data.arity);
        for (long long code = 0; code < entries; ++code) {
            std::vector<int> tup = decode_tuple(static_cast<int>(code), s.size, data.arity);
            std::vector<int> mapped(tup.size());
            for (size_t i = 0; i < tup.size(); ++i) mapped[i] = h[tup[i]];
            if (t.holds(rel, mapped) && !s.holds(rel, tup)) return false;
        }
    }
    return true;
}

inline bool is_isomorphism(const std::vector<int>& h, const FiniteStructure& s,
                           const FiniteStructure& t) {
    return is_embedding(h, s, t) && is_surjective(h, s, t);
}

/// Template materialized over an n-element domain: a tuple is in a relation
/// iff its pattern is one of the relation's patterns.
inline FiniteStructure materialize_template(const EqTemplate& t, int n) {
    if (n < 1) throw Error("materialize_template: domain must be nonempty");
    FiniteStructure s;
    s.name = t.name + "@" + std::to_string(n);
    s.size = n;
    for (const auto& [rel, r] : t.relations) {
        FiniteStructure::Relation data;
        data.arity = r.arity;
        long long entries = int_pow(n, r.arity);
        if (entries > kMaxTableEntries) throw Error("materialize_template: size cap exceeded");
        for (long long code = 0; code < entries; ++code) {
            std::vector<int> tup = decode_tuple(static_cast<int>(code), n, r.arity);
            if (r.contains(Partition(tup))) data.tuples.insert(tup);
        }
        s.relations[rel] = std::move(data);
    }
    return s;
}

} // namespace periomorph
