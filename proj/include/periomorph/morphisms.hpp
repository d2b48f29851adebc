#pragma once

#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "periomorph/finstruct.hpp"
#include "periomorph/periodic.hpp"

namespace periomorph {

inline constexpr long long kDefaultOperationBudget = 70000;

/// Total k-ary operation on {0..universe-1}, row-major table (leftmost
/// argument most significant).
struct OperationTable {
    int universe = 0;
    int arity = 0;
    std::vector<int> table;

    bool operator==(const OperationTable&) const = default;
    auto operator<=>(const OperationTable&) const = default;

    int apply(const std::vector<int>& args) const {
        return table[static_cast<size_t>(encode_tuple(args, universe))];
    }

    bool is_surjective() const {
        std::set<int> image(table.begin(), table.end());
        return static_cast<int>(image.size()) == universe;
    }

    static OperationTable projection(int n, int k, int coord) {
        OperationTable op{n, k, {}};
        long long entries = int_pow(n, k);
        op.table.resize(static_cast<size_t>(entries));
        for (long long code = 0; code < entries; ++code)
            op.table[static_cast<size_t>(code)] = decode_tuple(static_cast<int>(code), n, k)[coord];
        return op;
    }
};

/// op is a homomorphism from s^k to s: it preserves every relation, constant
/// and function graph, checked rowwise.
inline bool is_polymorphism(const OperationTable& op, const FiniteStructure& s) {
    if (op.universe != s.size) throw Error("is_polymorphism: universe mismatch");
    const int k = op.arity;
    for (const auto& [rel, data] : s.relations) {
        // every choice of k tuples from the relation, applied rowwise
        std::vector<const std::vector<int>*> tuples;
        for (const auto& t : data.tuples) tuples.push_back(&t);
        if (tuples.empty()) continue;
        std::vector<size_t> sel(static_cast<size_t>(k), 0);
        while (true) {
            std::vector<int> image(static_cast<size_t>(data.arity));
            std::vector<int> row(static_cast<size_t>(k));
            for (int pos = 0; pos < data.arity; ++pos) {
                for (int j = 0; j < k; ++j) row[static_cast<size_t>(j)] = (*tuples[sel[static_cast<size_t>(j)]])[static_cast<size_t>(pos)];
                image[static_cast<size_t>(pos)] = op.apply(row);
            }
            if (!data.tuples.count(image)) return false;
            int j = k - 1;
            while (j >= 0 && sel[static_cast<size_t>(j)] + 1 == tuples.size()) sel[static_cast<size_t>(j--)] = 0;
            if (j < 0) break;
            ++sel[static_cast<size_t>(j)];
        }
    }
    for (const auto& [fn, data] : s.functions) {
        // argument matrix: k columns, each an arity-tuple over the universe
        long long cols = int_pow(s.size, data.arity);
        std::vector<int> col_code(static_cast<size_t>(k), 0);
        while (true) {
            std::vector<std::vector<int>> cols_args;
            cols_args.reserve(static_cast<size_t>(k));
            for (int j = 0; j < k; ++j)
                cols_args.push_back(decode_tuple(col_code[static_cast<size_t>(j)], s.size, data.arity));
            // image of each row under op, then f, vs f per column then op
            std::vector<int> op_rows(static_cast<size_t>(data.arity));
            std::vector<int> row(static_cast<size_t>(k));
            for (int pos = 0; pos < data.arity; ++pos) {
                for (int j = 0; j < k; ++j) row[static_cast<size_t>(j)] = cols_args[static_cast<size_t>(j)][static_cast<size_t>(pos)];
                op_rows[static_cast<size_t>(pos)] = op.apply(row);
            }
            std::vector<int> f_cols(static_cast<size_t>(k));
            for (int j = 0; j < k; ++j) f_cols[static_cast<size_t>(j)] = s.apply(fn, cols_args[static_cast<size_t>(j)]);
            if (s.apply(fn, op_rows) != op.apply(f_cols)) return false;
            int j = k - 1;
            while (j >= 0 && col_code[static_cast<size_t>(j)] + 1 == cols) col_code[static_cast<size_t>(j--)] = 0;
            if (j < 0) break;
            ++col_code[static_cast<size_t>(j)];
        }
    }
    for (const auto& [c, v] : s.constants) {
        std::vector<int> diag(static_cast<size_t>(k), v);
        if (op.apply(diag) != v) return false;
    }
    return true;
}

/// Finite shadow of a periomorphism: one polymorphism stage per arity in a
/// divisibility-closed support, coherent along the repetition embeddings.
struct PolyCone {
    FiniteStructure base;
    std::map<int, OperationTable> stages;
};

struct ConeViolation {
    std::string reason;
    int low = 0, high = 0;        // coherence pair (low | high), if applicable
    std::vector<int> tuple;       // low-arity tuple witnessing the mismatch
};

inline std::optional<ConeViolation> find_cone_violation(const PolyCone& c) {
    for (const auto& [k, op] : c.stages) {
        if (op.arity != k || op.universe != c.base.size)
            return ConeViolation{"stage " + std::to_string(k) + " has wrong shape", k, k, {}};
        for (int d = 1; d < k; ++d)
            if (k % d == 0 && !c.stages.count(d))
                return ConeViolation{"support not divisibility-closed: " + std::to_string(d) +
                                         " missing below " + std::to_string(k),
                                     d, k, {}};
        if (!is_polymorphism(op, c.base))
            return ConeViolation{"stage " + std::to_string(k) + " is not a polymorphism", k, k, {}};
    }
    for (const auto& [lo, op_lo] : c.stages) {
        for (const auto& [hi, op_hi] : c.stages) {
            if (lo >= hi || hi % lo != 0) continue;
            long long entries = int_pow(c.base.size, lo);
            for (long long code = 0; code < entries; ++code) {
                std::vector<int> tup = decode_tuple(static_cast<int>(code), c.base.size, lo);
                if (op_lo.apply(tup) != op_hi.apply(embed_enm(tup, hi)))
                    return ConeViolation{"g_" + std::to_string(lo) + " != g_" + std::to_string(hi) +
                                             " on the repetition embedding",
                                         lo, hi, tup};
            }
        }
    }
    return std::nullopt;
}

inline bool cone_check(const PolyCone& c) { return !find_cone_violation(c).has_value(); }

inline const OperationTable& stage(const PolyCone& c, int k) {
    auto it = c.stages.find(k);
    if (it == c.stages.end()) throw Error("cone has no stage of arity " + std::to_string(k));
    return it->second;
}

/// Cone of the periomorphism h∘π_{<k} induced by a k-ary polymorphism h: the
/// stage of arity m evaluates h on the first k coordinates of the m-tuple
/// read cyclically.
inline PolyCone from_polymorphism(const OperationTable& h, const FiniteStructure& s,
                                  const std::vector<int>& support) {
    if (h.universe != s.size) throw Error("from_polymorphism: universe mismatch");
    if (!is_polymorphism(h, s)) throw Error("from_polymorphism: operation is not a polymorphism");
    PolyCone cone{s, {}};
    for (int m : support) {
        if (m < 1) throw Error("from_polymorphism: support arities must be positive");
        OperationTable st{s.size, m, {}};
        long long entries = int_pow(s.size, m);
        if (entries > kMaxTableEntries) throw Error("from_polymorphism: stage table cap exceeded");
        st.table.resize(static_cast<size_t>(entries));
        std::vector<int> head(static_cast<size_t>(h.arity));
        for (long long code = 0; code < entries; ++code) {
            std::vector<int> tup = decode_tuple(static_cast<int>(code), s.size, m);
            for (int i = 0; i < h.arity; ++i) head[static_cast<size_t>(i)] = tup[static_cast<size_t>(i % m)];
            st.table[static_cast<size_t>(code)] = h.apply(head);
        }
        cone.stages[m] = std::move(st);
    }
    return cone;
}

struct PreservationWitness {
    int stage_arity = 0;
    std::vector<std::vector<int>> selected; // k tuples from the relation
    std::vector<int> image;                 // rowwise image, outside the relation
};

/// Bounded preservation check per the finite stages of the cone: every
/// k-selection of relation tuples must map rowwise back into the relation.
inline bool preserves(const PolyCone& c, int rel_arity, const std::set<std::vector<int>>& rel,
                      PreservationWitness* witness = nullptr) {
    std::vector<const std::vector<int>*> tuples;
    for (const auto& t : rel) tuples.push_back(&t);
    if (tuples.empty()) return true;
    for (const auto& [k, op] : c.stages) {
        std::vector<size_t> sel(static_cast<size_t>(k), 0);
        while (true) {
            std::vector<int> image(static_cast<size_t>(rel_arity));
            std::vector<int> row(static_cast<size_t>(k));
            for (int pos = 0; pos < rel_arity; ++pos) {
                for (int j = 0; j < k; ++j) row[static_cast<size_t>(j)] = (*tuples[sel[static_cast<size_t>(j)]])[static_cast<size_t>(pos)];
                image[static_cast<size_t>(pos)] = op.apply(row);
            }
            if (!rel.count(image)) {
                if (witness) {
                    witness->stage_arity = k;
                    witness->selected.clear();
                    for (int j = 0; j < k; ++j) witness->selected.push_back(*tuples[sel[static_cast<size_t>(j)]]);
                    witness->image = image;
                }
                return false;
            }
            int j = k - 1;
            while (j >= 0 && sel[static_cast<size_t>(j)] + 1 == tuples.size()) sel[static_cast<size_t>(j--)] = 0;
            if (j < 0) break;
            ++sel[static_cast<size_t>(j)];
        }
    }
    return true;
}

/// All operation tables of the given arity (deterministic order).
inline std::vector<OperationTable> enumerate_operations(int n, int k, long long budget) {
    long long entries = int_pow(n, k);
    if (entries > 30) throw Error("enumerate_operations: arity too large");
    double count = 1;
    for (long long i = 0; i < entries; ++i) {
        count *= n;
        if (count > static_cast<double>(budget))
            throw Error("operation-table budget exceeded: " + std::to_string(n) + "^" +
                        std::to_string(entries) + " tables of arity " + std::to_string(k));
    }
    std::vector<OperationTable> out;
    OperationTable op{n, k, std::vector<int>(static_cast<size_t>(entries), 0)};
    while (true) {
        out.push_back(op);
        long long i = entries - 1;
        while (i >= 0 && op.table[static_cast<size_t>(i)] + 1 == n) op.table[static_cast<size_t>(i--)] = 0;
        if (i < 0) break;
        ++op.table[static_cast<size_t>(i)];
    }
    return out;
}

/// Surjective polymorphisms of s with arity in 1..max_arity, filtered in
/// parallel when jobs > 1 (the output order does not depend on jobs).
inline std::vector<OperationTable> surjective_polymorphisms(const FiniteStructure& s, int max_arity,
                                                            long long budget = kDefaultOperationBudget,
                                                            int jobs = 1) {
    std::vector<OperationTable> out;
    for (int k = 1; k <= max_arity; ++k) {
        std::vector<OperationTable> candidates = enumerate_operations(s.size, k, budget);
        if (jobs <= 1) {
            for (auto& op : candidates)
                if (op.is_surjective() && is_polymorphism(op, s)) out.push_back(std::move(op));
            continue;
        }
        std::vector<char> keep(candidates.size(), 0);
        std::vector<std::thread> workers;
        int nthreads = std::min<int>(jobs, static_cast<int>(candidates.size()));
        for (int w = 0; w < nthreads; ++w) {
            workers.emplace_back([&, w]() {
                for (size_t i = static_cast<size_t>(w); i < candidates.size(); i += static_cast<size_t>(nthreads))
                    keep[i] = candidates[i].is_surjective() && is_polymorphism(candidates[i], s);
            });
        }
        for (auto& t : workers) t.join();
        for (size_t i = 0; i < candidates.size(); ++i)
            if (keep[i]) out.push_back(std::move(candidates[i]));
    }
    return out;
}

struct HullResult {
    int arity = 0;
    int arity_bound = 0; // the approximation parameter K
    std::set<std::vector<int>> tuples;
};

/// Least fixpoint of closing the relation under rowwise images by surjective
/// polymorphisms of arity <= max_arity. On a finite structure the surjective
/// periomorphic images reduce to surjective finite stages; the arity bound is
/// a declared approximation parameter and the result is monotone in it.
inline HullResult ph_hull(const FiniteStructure& s, int rel_arity,
                          const std::set<std::vector<int>>& rel, int max_arity,
                          long long budget = kDefaultOperationBudget, int jobs = 1) {
    for (const auto& t : rel) {
        if (static_cast<int>(t.size()) != rel_arity) throw Error("ph_hull: tuple arity mismatch");
        for (int x : t)
            if (x < 0 || x >= s.size) throw Error("ph_hull: tuple element out of range");
    }
    std::vector<OperationTable> ops = surjective_polymorphisms(s, max_arity, budget, jobs);
    HullResult out{rel_arity, max_arity, rel};
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<const std::vector<int>*> tuples;
        for (const auto& t : out.tuples) tuples.push_back(&t);
        if (tuples.empty()) break; // nothing to image
        std::set<std::vector<int>> fresh;
        for (const auto& op : ops) {
            const int k = op.arity;
            std::vector<size_t> sel(static_cast<size_t>(k), 0);
            while (true) {
                std::vector<int> image(static_cast<size_t>(rel_arity));
                std::vector<int> row(static_cast<size_t>(k));
                for (int pos = 0; pos < rel_arity; ++pos) {
                    for (int j = 0; j < k; ++j) row[static_cast<size_t>(j)] = (*tuples[sel[static_cast<size_t>(j)]])[static_cast<size_t>(pos)];
                    image[static_cast<size_t>(pos)] = op.apply(row);
                }
                if (!out.tuples.count(image)) fresh.insert(std::move(image));
                int j = k - 1;
                while (j >= 0 && sel[static_cast<size_t>(j)] + 1 == tuples.size()) sel[static_cast<size_t>(j--)] = 0;
                if (j < 0) break;
                ++sel[static_cast<size_t>(j)];
            }
        }
        if (!fresh.empty()) {
            out.tuples.insert(fresh.begin(), fresh.end());
            grew = true;
        }
    }
    return out;
}

} // namespace periomorph
