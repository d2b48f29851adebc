#pragma once

#include <algorithm>
#include <compare>
#include <string>
#include <vector>

#include "periomorph/common.hpp"

namespace periomorph {

// Enumeration cap; Bell(12) = 4213597 partitions is the most we are willing
// to materialize.
inline constexpr int kMaxPartitionSize = 12;

/// A partition of {0..k-1} in restricted-growth form: rgs[0] = 0 and
/// rgs[i] <= max(rgs[0..i-1]) + 1. Equal partitions have identical rgs, so
/// values can live in ordered sets with exact equality.
class Partition {
public:
    /// Canonicalizes an arbitrary labelling (blocks renumbered in order of
    /// first occurrence).
    explicit Partition(const std::vector<int>& labels) {
        if (labels.empty()) throw Error("partition must have positive size");
        rgs_.reserve(labels.size());
        std::vector<std::pair<int, int>> seen; // label -> block
        for (int x : labels) {
            int block = -1;
            for (auto& [lab, b] : seen)
                if (lab == x) { block = b; break; }
            if (block < 0) {
                block = static_cast<int>(seen.size());
                seen.emplace_back(x, block);
            }
            rgs_.push_back(block);
        }
        blocks_ = static_cast<int>(seen.size());
    }

    static Partition discrete(int k) {
        std::vector<int> v(k);
        for (int i = 0; i < k; ++i) v[i] = i;
        return Partition(v);
    }

    static Partition all_equal(int k) {
        return Partition(std::vector<int>(k, 0));
    }

    int size() const { return static_cast<int>(rgs_.size()); }
    int block_count() const { return blocks_; }
    int label(int i) const { return rgs_[i]; }
    const std::vector<int>& rgs() const { return rgs_; }

    bool together(int i, int j) const { return rgs_[i] == rgs_[j]; }

    auto operator<=>(const Partition& other) const { return rgs_ <=> other.rgs_; }
    bool operator==(const Partition& other) const { return rgs_ == other.rgs_; }

    /// Textual form: rgs digits joined by commas, e.g. "0,0,1".
    std::string to_string() const {
        std::string out;
        for (size_t i = 0; i < rgs_.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(rgs_[i]);
        }
        return out;
    }

    static Partition from_string(const std::string& text) {
        std::vector<int> labels;
        size_t pos = 0;
        while (pos < text.size()) {
            size_t next = text.find(',', pos);
            if (next == std::string::npos) next = text.size();
            try {
                labels.push_back(std::stoi(text.substr(pos, next - pos)));
            } catch (const std::exception&) {
                throw Error("bad partition literal: " + text);
            }
            pos = next + 1;
        }
        return Partition(labels);
    }

private:
    std::vector<int> rgs_;
    int blocks_ = 0;
};

/// True iff p identifies at least as much as q: every block of q is contained
/// in a block of p.
inline bool coarsens(const Partition& p, const Partition& q) {
    if (p.size() != q.size())
        throw Error("coarsens: size mismatch (" + std::to_string(p.size()) +
                    " vs " + std::to_string(q.size()) + ")");
    const int k = p.size();
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (q.together(i, j) && !p.together(i, j)) return false;
    return true;
}

/// Common refinement: i and j together iff together in both p and q. This is
/// the greatest lower bound in the order where a partition sits below
/// everything that coarsens it.
inline Partition meet(const Partition& p, const Partition& q) {
    if (p.size() != q.size())
        throw Error("meet: size mismatch (" + std::to_string(p.size()) +
                    " vs " + std::to_string(q.size()) + ")");
    const int k = p.size();
    std::vector<int> labels(k);
    for (int i = 0; i < k; ++i) labels[i] = p.label(i) * (k + 1) + q.label(i);
    return Partition(labels);
}

/// Pattern of an index tuple under p: positions i, j of the result are
/// together iff index_map[i] and index_map[j] are together in p.
inline Partition induced_pattern(const Partition& p, const std::vector<int>& index_map) {
    std::vector<int> labels;
    labels.reserve(index_map.size());
    for (int ix : index_map) {
        if (ix < 0 || ix >= p.size())
            throw Error("induced_pattern: index " + std::to_string(ix) + " out of range");
        labels.push_back(p.label(ix));
    }
    return Partition(labels);
}

namespace detail {
// Advance to the next restricted-growth string in lex order.
inline bool next_rgs(std::vector<int>& rgs) {
    const int k = static_cast<int>(rgs.size());
    std::vector<int> mx(k, 0); // mx[i] = max(rgs[0..i-1])
    for (int i = 1; i < k; ++i) mx[i] = std::max(mx[i - 1], rgs[i - 1]);
    for (int i = k - 1; i > 0; --i) {
        if (rgs[i] <= mx[i]) { // rgs[i] may still grow at this position
            rgs[i] += 1;
            std::fill(rgs.begin() + i + 1, rgs.end(), 0);
            return true;
        }
    }
    return false;
}
} // namespace detail

/// All partitions of {0..k-1} in lexicographic rgs order; Bell(k) many.
inline std::vector<Partition> all_partitions(int k) {
    if (k < 1 || k > kMaxPartitionSize)
        throw Error("all_partitions: size " + std::to_string(k) + " outside 1.." +
                    std::to_string(kMaxPartitionSize));
    std::vector<Partition> out;
    std::vector<int> rgs(k, 0);
    do {
        out.push_back(Partition(rgs));
    } while (detail::next_rgs(rgs));
    return out;
}

} // namespace periomorph
