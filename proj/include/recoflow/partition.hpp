#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "recoflow/errors.hpp"

namespace recoflow {

/// Largest site count for which full lattice enumeration is supported.
inline constexpr int kMaxEnumSites = 8;

/// Bell numbers B_0..B_8; B_n counts the partitions of an n-element set.
inline constexpr std::array<long, 9> kBellNumbers = {1, 1, 2, 5, 15, 52, 203, 877, 4140};

inline long bell_number(int n) {
    if (n < 0 || n > kMaxEnumSites)
        throw BoundsError("bell_number: n must lie in 0.." + std::to_string(kMaxEnumSites));
    return kBellNumbers[static_cast<std::size_t>(n)];
}

/// Partition of a subset of sites; blocks ordered by least element, sites ascending.
/// Used for restrictions of full partitions and for refinement patterns of a block.
struct SubsetPartition {
    std::vector<int> support;              ///< ascending, the union of all blocks
    std::vector<std::vector<int>> blocks;  ///< canonical order

    bool operator==(const SubsetPartition& other) const = default;
};

/// Set partition of the sites {1, ..., n} in canonical form.
///
/// Canonical form: every block lists its sites in ascending order, and block k
/// contains the smallest site not covered by blocks 1..k-1.  With that order
/// the sequence (block index of site 1, ..., block index of site n) is a
/// restricted-growth string; it doubles as the lookup key.
class Partition {
public:
    /// Canonicalizes and validates; throws ValidityError unless the blocks are
    /// nonempty, disjoint, and cover {1..n} exactly.
    Partition(int n, std::vector<std::vector<int>> blocks) : n_(n) {
        if (n < 1)
            throw BoundsError("Partition: site count must be positive");
        site_block_.assign(static_cast<std::size_t>(n), -1);
        if (blocks.empty())
            throw ValidityError("Partition: no blocks given");
        for (auto& b : blocks) {
            if (b.empty())
                throw ValidityError("Partition: empty block");
            std::sort(b.begin(), b.end());
            for (std::size_t i = 0; i < b.size(); ++i) {
                int s = b[i];
                if (s < 1 || s > n)
                    throw ValidityError("Partition: site " + std::to_string(s) +
                                        " outside 1.." + std::to_string(n));
                if (i > 0 && b[i - 1] == s)
                    throw ValidityError("Partition: site " + std::to_string(s) + " repeated");
            }
        }
        std::sort(blocks.begin(), blocks.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        blocks_ = std::move(blocks);
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            for (int s : blocks_[k]) {
                if (site_block_[static_cast<std::size_t>(s - 1)] != -1)
                    throw ValidityError("Partition: site " + std::to_string(s) +
                                        " in two blocks");
                site_block_[static_cast<std::size_t>(s - 1)] = static_cast<int>(k);
            }
        }
        for (int s = 1; s <= n; ++s)
            if (site_block_[static_cast<std::size_t>(s - 1)] == -1)
                throw ValidityError("Partition: site " + std::to_string(s) + " uncovered");
    }

    /// The finest partition {{1},...,{n}}.
    static Partition singletons(int n) {
        std::vector<std::vector<int>> b;
        for (int s = 1; s <= n; ++s) b.push_back({s});
        return Partition(n, std::move(b));
    }

    /// The coarsest partition {{1,...,n}}.
    static Partition whole(int n) {
        std::vector<int> b(static_cast<std::size_t>(n));
        for (int s = 1; s <= n; ++s) b[static_cast<std::size_t>(s - 1)] = s;
        return Partition(n, {std::move(b)});
    }

    int sites() const { return n_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    const std::vector<int>& block(int k) const {
        if (k < 0 || k >= block_count())
            throw BoundsError("Partition::block: index out of range");
        return blocks_[static_cast<std::size_t>(k)];
    }

    /// Index (0-based, canonical order) of the block containing a 1-based site.
    int block_of(int site) const {
        if (site < 1 || site > n_)
            throw BoundsError("Partition::block_of: site out of range");
        return site_block_[static_cast<std::size_t>(site - 1)];
    }

    /// Restricted-growth string: entry s-1 is block_of(s).
    const std::vector<int>& growth_string() const { return site_block_; }

    bool operator==(const Partition& other) const {
        return n_ == other.n_ && site_block_ == other.site_block_;
    }
    bool operator!=(const Partition& other) const { return !(*this == other); }

    /// Canonical text form, e.g. "1,2|3".
    std::string str() const {
        std::string out;
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            if (k) out += '|';
            for (std::size_t i = 0; i < blocks_[k].size(); ++i) {
                if (i) out += ',';
                out += std::to_string(blocks_[k][i]);
            }
        }
        return out;
    }

    /// Parses "1,2|3" style text; any valid block arrangement is accepted and
    /// canonicalized.  Throws ValidityError on malformed input.
    static Partition parse(int n, std::string_view text) {
        std::vector<std::vector<int>> blocks;
        std::vector<int> current;
        int value = 0;
        bool in_number = false;
        auto end_number = [&] {
            if (!in_number)
                throw ValidityError("Partition::parse: missing site number in \"" +
                                    std::string(text) + "\"");
            current.push_back(value);
            value = 0;
            in_number = false;
        };
        auto end_block = [&] {
            end_number();
            blocks.push_back(std::move(current));
            current.clear();
        };
        for (char c : text) {
            if (c >= '0' && c <= '9') {
                if (value > n)  // early overflow guard; full range check in ctor
                    throw ValidityError("Partition::parse: site number too large");
                value = value * 10 + (c - '0');
                in_number = true;
            } else if (c == ',') {
                end_number();
            } else if (c == '|') {
                end_block();
            } else if (c == ' ') {
                continue;
            } else {
                throw ValidityError(std::string("Partition::parse: unexpected character '") +
                                    c + "'");
            }
        }
        end_block();
        return Partition(n, std::move(blocks));
    }

private:
    int n_;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> site_block_;
};

/// True when every block of a is contained in a block of b (a refines b).
inline bool is_finer(const Partition& a, const Partition& b) {
    if (a.sites() != b.sites())
        throw DimensionError("is_finer: partitions on different site counts");
    for (const auto& block : a.blocks()) {
        int target = b.block_of(block.front());
        for (int s : block)
            if (b.block_of(s) != target) return false;
    }
    return true;
}

/// Coarsest common refinement: blocks are the nonempty pairwise intersections.
inline Partition meet(const Partition& a, const Partition& b) {
    if (a.sites() != b.sites())
        throw DimensionError("meet: partitions on different site counts");
    int n = a.sites();
    std::unordered_map<std::uint64_t, std::size_t> where;
    std::vector<std::vector<int>> blocks;
    for (int s = 1; s <= n; ++s) {
        std::uint64_t key = (static_cast<std::uint64_t>(a.block_of(s)) << 32) |
                            static_cast<std::uint32_t>(b.block_of(s));
        auto it = where.find(key);
        if (it == where.end()) {
            where.emplace(key, blocks.size());
            blocks.push_back({s});
        } else {
            blocks[it->second].push_back(s);
        }
    }
    return Partition(n, std::move(blocks));
}

/// Restriction of a partition to a support set: intersect every block with the
/// support, drop empties.  The support must be a nonempty subset of the sites.
inline SubsetPartition restrict_to(const Partition& a, std::vector<int> support) {
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (support.empty())
        throw ValidityError("restrict_to: empty support");
    for (int s : support)
        if (s < 1 || s > a.sites())
            throw BoundsError("restrict_to: site outside 1.." + std::to_string(a.sites()));
    std::vector<std::vector<int>> blocks;
    for (const auto& block : a.blocks()) {
        std::vector<int> inter;
        std::set_intersection(block.begin(), block.end(), support.begin(), support.end(),
                              std::back_inserter(inter));
        if (!inter.empty()) blocks.push_back(std::move(inter));
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return SubsetPartition{std::move(support), std::move(blocks)};
}

/// Reassembles a full partition from subset partitions with pairwise disjoint
/// supports whose union is exactly {1..n}; n is inferred from the supports.
inline Partition disjoint_union(const std::vector<SubsetPartition>& parts) {
    if (parts.empty())
        throw ValidityError("disjoint_union: no parts given");
    std::size_t total = 0;
    for (const auto& p : parts) total += p.support.size();
    int n = static_cast<int>(total);
    std::vector<char> seen(total, 0);
    std::vector<std::vector<int>> blocks;
    for (const auto& p : parts) {
        std::size_t covered = 0;
        for (const auto& b : p.blocks) covered += b.size();
        if (covered != p.support.size())
            throw ValidityError("disjoint_union: part does not partition its support");
        for (int s : p.support) {
            if (s < 1 || s > n)
                throw ValidityError("disjoint_union: supports do not cover 1.." +
                                    std::to_string(n) + " exactly");
            if (seen[static_cast<std::size_t>(s - 1)])
                throw ValidityError("disjoint_union: site " + std::to_string(s) +
                                    " in two supports");
            seen[static_cast<std::size_t>(s - 1)] = 1;
        }
        for (const auto& b : p.blocks) blocks.push_back(b);
    }
    return Partition(n, std::move(blocks));
}

namespace detail {

/// Calls fn(growth_string) for every restricted-growth string of length m in
/// lexicographic order (all-zero string first).
template <class Fn>
void for_each_growth_string(int m, Fn&& fn) {
    std::vector<int> g(static_cast<std::size_t>(m), 0);
    std::vector<int> maxed(static_cast<std::size_t>(m), 0);  // maxed[i] = max(g[0..i-1])
    while (true) {
        for (int i = 1; i < m; ++i)
            maxed[static_cast<std::size_t>(i)] =
                std::max(maxed[static_cast<std::size_t>(i - 1)], g[static_cast<std::size_t>(i - 1)]);
        fn(static_cast<const std::vector<int>&>(g));
        int i = m - 1;
        while (i > 0 && g[static_cast<std::size_t>(i)] == maxed[static_cast<std::size_t>(i)] + 1)
            --i;
        if (i == 0) break;  // first position never increments
        ++g[static_cast<std::size_t>(i)];
        std::fill(g.begin() + i + 1, g.end(), 0);
    }
}

inline Partition partition_from_growth(int n, const std::vector<int>& g,
                                       const std::vector<int>& sites) {
    int nblocks = 0;
    for (int v : g) nblocks = std::max(nblocks, v + 1);
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(nblocks));
    for (std::size_t i = 0; i < g.size(); ++i)
        blocks[static_cast<std::size_t>(g[i])].push_back(sites[i]);
    return Partition(n, std::move(blocks));
}

} // namespace detail

/// All partitions of {1..n} in lexicographic restricted-growth order.
/// The first element is the one-block partition, the last the singleton one.
inline std::vector<Partition> enumerate_partitions(int n) {
    if (n < 1 || n > kMaxEnumSites)
        throw BoundsError("enumerate_partitions: n must lie in 1.." +
                          std::to_string(kMaxEnumSites));
    std::vector<int> sites(static_cast<std::size_t>(n));
    for (int s = 1; s <= n; ++s) sites[static_cast<std::size_t>(s - 1)] = s;
    std::vector<Partition> out;
    out.reserve(static_cast<std::size_t>(bell_number(n)));
    detail::for_each_growth_string(n, [&](const std::vector<int>& g) {
        out.push_back(detail::partition_from_growth(n, g, sites));
    });
    return out;
}

/// All partitions of an arbitrary ascending site set, same enumeration order.
inline std::vector<SubsetPartition> enumerate_subset_partitions(std::vector<int> support) {
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    int m = static_cast<int>(support.size());
    if (m < 1 || m > kMaxEnumSites)
        throw BoundsError("enumerate_subset_partitions: support size must lie in 1.." +
                          std::to_string(kMaxEnumSites));
    std::vector<SubsetPartition> out;
    out.reserve(static_cast<std::size_t>(bell_number(m)));
    detail::for_each_growth_string(m, [&](const std::vector<int>& g) {
        int nblocks = 0;
        for (int v : g) nblocks = std::max(nblocks, v + 1);
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(nblocks));
        for (std::size_t i = 0; i < g.size(); ++i)
            blocks[static_cast<std::size_t>(g[i])].push_back(support[i]);
        out.push_back(SubsetPartition{support, std::move(blocks)});
    });
    return out;
}

/// Enumerated lattice of all partitions of {1..n} with O(1) index lookup.
class PartitionTable {
public:
    explicit PartitionTable(int n) : n_(n), parts_(enumerate_partitions(n)) {
        for (std::size_t i = 0; i < parts_.size(); ++i)
            index_.emplace(key(parts_[i]), static_cast<int>(i));
    }

    int sites() const { return n_; }
    int size() const { return static_cast<int>(parts_.size()); }
    const Partition& operator[](int i) const {
        if (i < 0 || i >= size())
            throw BoundsError("PartitionTable: index out of range");
        return parts_[static_cast<std::size_t>(i)];
    }
    const std::vector<Partition>& all() const { return parts_; }

    int index_of(const Partition& p) const {
        if (p.sites() != n_)
            throw DimensionError("PartitionTable::index_of: wrong site count");
        return index_.at(key(p));
    }

private:
    static std::uint64_t key(const Partition& p) {
        std::uint64_t k = 0;
        for (int v : p.growth_string()) k = (k << 3) | static_cast<std::uint64_t>(v);
        return k;
    }

    int n_;
    std::vector<Partition> parts_;
    std::unordered_map<std::uint64_t, int> index_;
};

} // namespace recoflow
