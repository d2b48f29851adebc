#pragma once

#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "periomorph/finstruct.hpp"
#include "periomorph/formula.hpp"

namespace periomorph {

inline constexpr long long kMaxEvaluationHorizon = 1000000;

/// Element of the periodic power: the function i -> word[i mod k], stored
/// with minimal period (the word is not a repetition of a shorter word).
class PeriodicElement {
public:
    explicit PeriodicElement(const std::vector<int>& word) {
        if (word.empty()) throw Error("periodic element: empty word");
        const int n = static_cast<int>(word.size());
        for (int d = 1; d <= n; ++d) {
            if (n % d != 0) continue;
            bool ok = true;
            for (int i = d; i < n && ok; ++i) ok = word[i] == word[i % d];
            if (ok) {
                word_.assign(word.begin(), word.begin() + d);
                return;
            }
        }
    }

    int period() const { return static_cast<int>(word_.size()); }
    int at(long long i) const { return word_[static_cast<size_t>(i % period())]; }
    const std::vector<int>& word() const { return word_; }

    auto operator<=>(const PeriodicElement& other) const { return word_ <=> other.word_; }
    bool operator==(const PeriodicElement& other) const { return word_ == other.word_; }

    /// Textual form: values between angle brackets, e.g. "<0 1>".
    std::string to_string() const {
        std::string out = "<";
        for (size_t i = 0; i < word_.size(); ++i) {
            if (i) out += ' ';
            out += std::to_string(word_[i]);
        }
        return out + ">";
    }

    static PeriodicElement parse(const std::string& text) {
        std::string body = text;
        auto l = body.find('<');
        auto r = body.rfind('>');
        if (l == std::string::npos || r == std::string::npos || r < l)
            throw Error("periodic element: expected <a0 a1 ...>, got '" + text + "'");
        std::istringstream in(body.substr(l + 1, r - l - 1));
        std::vector<int> word;
        int x;
        while (in >> x) word.push_back(x);
        if (word.empty()) throw Error("periodic element: empty word in '" + text + "'");
        return PeriodicElement(word);
    }

private:
    std::vector<int> word_;
};

inline PeriodicElement canonicalize(const std::vector<int>& word) {
    return PeriodicElement(word);
}

/// lcm of the argument periods; the evaluation horizon everywhere (one full
/// common period determines the whole sequence).
inline long long common_period(const std::vector<PeriodicElement>& args) {
    long long h = 1;
    for (const auto& a : args) {
        h = std::lcm(h, static_cast<long long>(a.period()));
        if (h > kMaxEvaluationHorizon) throw Error("evaluation horizon cap exceeded");
    }
    return h;
}

/// Pointwise function application, then re-canonicalization.
inline PeriodicElement apply_function(const FiniteStructure& s, const std::string& fn,
                                      const std::vector<PeriodicElement>& args) {
    if (args.empty()) {
        auto it = s.constants.find(fn);
        if (it == s.constants.end()) throw Error("unknown constant symbol '" + fn + "'");
        return PeriodicElement({it->second});
    }
    long long h = common_period(args);
    std::vector<int> word(static_cast<size_t>(h));
    std::vector<int> point(args.size());
    for (long long i = 0; i < h; ++i) {
        for (size_t j = 0; j < args.size(); ++j) point[j] = args[j].at(i);
        word[static_cast<size_t>(i)] = s.apply(fn, point);
    }
    return PeriodicElement(word);
}

/// Atom truth in the periodic power: the atom must hold at every index; one
/// common period of the arguments suffices.
inline bool holds_relation(const FiniteStructure& s, const std::string& rel,
                           const std::vector<PeriodicElement>& args) {
    if (args.empty()) return s.holds(rel, {});
    long long h = common_period(args);
    std::vector<int> point(args.size());
    for (long long i = 0; i < h; ++i) {
        for (size_t j = 0; j < args.size(); ++j) point[j] = args[j].at(i);
        if (!s.holds(rel, point)) return false;
    }
    return true;
}

/// e_k: the canonical embedding of a k-tuple as a k-periodic element.
inline PeriodicElement embed_ek(const std::vector<int>& tuple) {
    return PeriodicElement(tuple);
}

/// First k values of the element.
inline std::vector<int> project_pk(const PeriodicElement& a, int k) {
    if (k < 1) throw Error("project_pk: k must be positive");
    std::vector<int> out(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) out[static_cast<size_t>(i)] = a.at(i);
    return out;
}

/// e_(n,m): repeat an n-tuple m/n times; requires n < m and n | m.
inline std::vector<int> embed_enm(const std::vector<int>& tuple, int m) {
    const int n = static_cast<int>(tuple.size());
    if (n <= 0 || m <= n || m % n != 0)
        throw Error("embed_enm: need |tuple| < m and |tuple| dividing m");
    std::vector<int> out;
    out.reserve(static_cast<size_t>(m));
    for (int r = 0; r < m / n; ++r) out.insert(out.end(), tuple.begin(), tuple.end());
    return out;
}

/// Truth of a positive Horn formula in the periodic power under the given
/// argument binding, at an explicit pointwise horizon. The periodic power is
/// never materialized: truth reduces to truth of the same formula in the base
/// structure at every index below the horizon.
inline bool eval_ph_pointwise(const FiniteStructure& s, const Formula& f,
                              const std::vector<std::pair<std::string, PeriodicElement>>& args,
                              long long horizon) {
    if (!classify_fragment(f).is_positive_horn)
        throw Error("periodic evaluation is defined for positive Horn formulas only");
    {
        std::set<std::string> bound;
        for (const auto& [name, elem] : args) bound.insert(name);
        for (const auto& v : free_variables(f))
            if (!bound.count(v)) throw Error("unbound free variable '" + v + "'");
    }
    if (horizon < 1 || horizon > kMaxEvaluationHorizon)
        throw Error("evaluation horizon out of range");
    for (long long i = 0; i < horizon; ++i) {
        std::map<std::string, int> at;
        for (const auto& [name, elem] : args) at[name] = elem.at(i);
        if (!evaluate(s, f, at)) return false;
    }
    return true;
}

/// Same with the canonical horizon: the lcm of the argument periods (1 for a
/// sentence, where this is exactly truth in the base structure).
inline bool eval_ph_on_per(const FiniteStructure& s, const Formula& f,
                           const std::vector<std::pair<std::string, PeriodicElement>>& args) {
    std::vector<PeriodicElement> elems;
    elems.reserve(args.size());
    for (const auto& [name, elem] : args) elems.push_back(elem);
    return eval_ph_pointwise(s, f, args, elems.empty() ? 1 : common_period(elems));
}

/// The isomorphism between the periodic power of s and the periodic power of
/// s^k: forward reads k-blocks, backward unpacks componentwise.
struct PerPowerIso {
    FiniteStructure base;
    int k;
    FiniteStructure powered; // power(base, k)

    PeriodicElement forward(const PeriodicElement& a) const {
        long long span = std::lcm(static_cast<long long>(a.period()), static_cast<long long>(k));
        long long len = span / k;
        std::vector<int> word(static_cast<size_t>(len));
        std::vector<int> block(static_cast<size_t>(k));
        for (long long i = 0; i < len; ++i) {
            for (int j = 0; j < k; ++j) block[static_cast<size_t>(j)] = a.at(i * k + j);
            word[static_cast<size_t>(i)] = encode_tuple(block, base.size);
        }
        return PeriodicElement(word);
    }

    PeriodicElement backward(const PeriodicElement& b) const {
        long long len = static_cast<long long>(b.period()) * k;
        std::vector<int> word(static_cast<size_t>(len));
        for (long long i = 0; i < len; ++i)
            word[static_cast<size_t>(i)] = decode_tuple(b.at(i / k), base.size, k)[i % k];
        return PeriodicElement(word);
    }
};

inline PerPowerIso iso_per_power(const FiniteStructure& s, int k) {
    if (k < 1) throw Error("iso_per_power: k must be positive");
    return PerPowerIso{s, k, power(s, k)};
}

/// The isomorphism between a product of periodic powers and the periodic
/// power of the product: pointwise pairing.
struct ProdPerIso {
    FiniteStructure left, right;
    FiniteStructure prod; // product(left, right)

    PeriodicElement forward(const PeriodicElement& a, const PeriodicElement& b) const {
        long long h = std::lcm(static_cast<long long>(a.period()), static_cast<long long>(b.period()));
        std::vector<int> word(static_cast<size_t>(h));
        for (long long i = 0; i < h; ++i)
            word[static_cast<size_t>(i)] = a.at(i) * right.size + b.at(i);
        return PeriodicElement(word);
    }

    std::pair<PeriodicElement, PeriodicElement> backward(const PeriodicElement& c) const {
        std::vector<int> wa(static_cast<size_t>(c.period())), wb(static_cast<size_t>(c.period()));
        for (int i = 0; i < c.period(); ++i) {
            wa[static_cast<size_t>(i)] = c.at(i) / right.size;
            wb[static_cast<size_t>(i)] = c.at(i) % right.size;
        }
        return {PeriodicElement(wa), PeriodicElement(wb)};
    }
};

inline ProdPerIso iso_prod_per(const FiniteStructure& a, const FiniteStructure& b) {
    return ProdPerIso{a, b, product(a, b)};
}

/// All canonical periodic elements over an n-element universe with period up
/// to max_period (test and CLI helper; deterministic order).
inline std::vector<PeriodicElement> elements_up_to_period(int n, int max_period) {
    std::set<PeriodicElement> out;
    for (int len = 1; len <= max_period; ++len) {
        long long total = int_pow(n, len);
        if (total > kMaxTableEntries) throw Error("elements_up_to_period: cap exceeded");
        for (long long code = 0; code < total; ++code)
            out.insert(PeriodicElement(decode_tuple(static_cast<int>(code), n, len)));
    }
    return {out.begin(), out.end()};
}

} // namespace periomorph
