#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "recoflow/errors.hpp"
#include "recoflow/partition.hpp"

namespace recoflow {

/// Hard ceiling on the number of types in a product space.
inline constexpr std::size_t kMaxTypes = std::size_t{1} << 20;

/// A full sequence: one letter (0-based) per site.
using TypeSequence = std::vector<int>;

/// A partial sequence: letters on an ascending support set.
struct Fragment {
    std::vector<int> support;  ///< ascending 1-based sites
    std::vector<int> letters;  ///< letters[i] belongs to support[i]

    bool operator==(const Fragment& other) const = default;
};

/// Finite product space over per-site alphabets, with a mixed-radix codec.
/// Site 1 is the most significant digit, so for binary alphabets the index of
/// a sequence is its value read as a binary numeral.
class TypeSpace {
public:
    explicit TypeSpace(std::vector<int> alphabet_sizes) : sizes_(std::move(alphabet_sizes)) {
        if (sizes_.empty())
            throw ValidityError("TypeSpace: needs at least one site");
        std::size_t total = 1;
        for (int m : sizes_) {
            if (m < 2)
                throw ValidityError("TypeSpace: every alphabet needs at least two letters");
            if (total > kMaxTypes / static_cast<std::size_t>(m))
                throw ResourceError("TypeSpace: more than 2^20 types");
            total *= static_cast<std::size_t>(m);
        }
        place_.assign(sizes_.size(), 1);
        for (std::size_t i = sizes_.size() - 1; i > 0; --i)
            place_[i - 1] = place_[i] * static_cast<std::size_t>(sizes_[i]);
        total_ = total;
    }

    int sites() const { return static_cast<int>(sizes_.size()); }
    std::size_t type_count() const { return total_; }
    const std::vector<int>& alphabet_sizes() const { return sizes_; }

    int alphabet_size(int site) const {
        check_site(site);
        return sizes_[static_cast<std::size_t>(site - 1)];
    }

    /// Mixed-radix place value of a 1-based site.
    std::size_t place_value(int site) const {
        check_site(site);
        return place_[static_cast<std::size_t>(site - 1)];
    }

    std::size_t encode(const TypeSequence& x) const {
        if (static_cast<int>(x.size()) != sites())
            throw DimensionError("TypeSpace::encode: wrong sequence length");
        std::size_t idx = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < 0 || x[i] >= sizes_[i])
                throw BoundsError("TypeSpace::encode: letter out of range at site " +
                                  std::to_string(i + 1));
            idx += static_cast<std::size_t>(x[i]) * place_[i];
        }
        return idx;
    }

    TypeSequence decode(std::size_t index) const {
        if (index >= total_)
            throw BoundsError("TypeSpace::decode: index out of range");
        TypeSequence x(sizes_.size());
        for (std::size_t i = 0; i < sizes_.size(); ++i) {
            x[i] = static_cast<int>((index / place_[i]) % static_cast<std::size_t>(sizes_[i]));
        }
        return x;
    }

    /// Letter of an encoded type at a 1-based site, without full decoding.
    int letter(std::size_t index, int site) const {
        check_site(site);
        std::size_t i = static_cast<std::size_t>(site - 1);
        return static_cast<int>((index / place_[i]) % static_cast<std::size_t>(sizes_[i]));
    }

    /// Renders a decoded sequence as digits separated by nothing (alphabets
    /// up to 10 letters) or by '.' otherwise; used for CSV headers.
    std::string letters_string(std::size_t index) const {
        TypeSequence x = decode(index);
        bool wide = false;
        for (int m : sizes_)
            if (m > 10) wide = true;
        std::string out;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (wide && i) out += '.';
            out += std::to_string(x[i]);
        }
        return out;
    }

private:
    void check_site(int site) const {
        if (site < 1 || site > sites())
            throw BoundsError("TypeSpace: site out of range");
    }

    std::vector<int> sizes_;
    std::vector<std::size_t> place_;
    std::size_t total_ = 0;
};

/// Keeps the letters of a sequence on the given support, drops the rest.
inline Fragment project(const TypeSpace& space, const TypeSequence& x,
                        std::vector<int> support) {
    if (static_cast<int>(x.size()) != space.sites())
        throw DimensionError("project: wrong sequence length");
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (support.empty())
        throw ValidityError("project: empty support");
    Fragment f;
    for (int s : support) {
        if (s < 1 || s > space.sites())
            throw BoundsError("project: site out of range");
        f.support.push_back(s);
        f.letters.push_back(x[static_cast<std::size_t>(s - 1)]);
    }
    return f;
}

/// Reassembles a full sequence from fragments whose supports are pairwise
/// disjoint and cover {1..n} exactly; n is inferred from the supports.
inline TypeSequence join(const std::vector<Fragment>& fragments) {
    if (fragments.empty())
        throw ValidityError("join: no fragments given");
    std::size_t total = 0;
    for (const auto& f : fragments) {
        if (f.support.size() != f.letters.size())
            throw ValidityError("join: fragment support/letter length mismatch");
        total += f.support.size();
    }
    int n = static_cast<int>(total);
    TypeSequence x(total, -1);
    for (const auto& f : fragments) {
        for (std::size_t i = 0; i < f.support.size(); ++i) {
            int s = f.support[i];
            if (s < 1 || s > n)
                throw ValidityError("join: supports do not cover 1.." + std::to_string(n) +
                                    " exactly");
            if (x[static_cast<std::size_t>(s - 1)] != -1)
                throw ValidityError("join: site " + std::to_string(s) + " in two fragments");
            x[static_cast<std::size_t>(s - 1)] = f.letters[i];
        }
    }
    return x;
}

/// Precomputed map from full type index to fragment index on a fixed support.
/// Fragment indices use the same mixed-radix rule restricted to the support.
class ProjectionIndex {
public:
    ProjectionIndex(const TypeSpace& space, std::vector<int> support) {
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        if (support.empty())
            throw ValidityError("ProjectionIndex: empty support");
        for (int s : support)
            if (s < 1 || s > space.sites())
                throw BoundsError("ProjectionIndex: site out of range");
        support_ = std::move(support);
        count_ = 1;
        for (int s : support_) count_ *= static_cast<std::size_t>(space.alphabet_size(s));
        table_.resize(space.type_count());
        std::vector<std::size_t> fplace(support_.size(), 1);
        for (std::size_t i = support_.size() - 1; i > 0; --i)
            fplace[i - 1] =
                fplace[i] * static_cast<std::size_t>(space.alphabet_size(support_[i]));
        for (std::size_t x = 0; x < space.type_count(); ++x) {
            std::size_t f = 0;
            for (std::size_t i = 0; i < support_.size(); ++i)
                f += static_cast<std::size_t>(space.letter(x, support_[i])) * fplace[i];
            table_[x] = static_cast<std::uint32_t>(f);
        }
    }

    const std::vector<int>& support() const { return support_; }
    std::size_t fragment_count() const { return count_; }
    std::size_t operator()(std::size_t type_index) const { return table_[type_index]; }

private:
    std::vector<int> support_;
    std::size_t count_ = 0;
    std::vector<std::uint32_t> table_;
};

} // namespace recoflow
