#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "recoflow/errors.hpp"
#include "recoflow/partition.hpp"

namespace recoflow {

/// Nonnegative rate function on the partitions of {1..n}.
///
/// Only finitely many partitions carry a positive rate; unset partitions read
/// as 0.  supported() iterates the positive-rate partitions in enumeration
/// (restricted-growth) order so every consumer sees a deterministic order.
class RecombinationRates {
public:
    explicit RecombinationRates(int n) : n_(n) {
        if (n < 1)
            throw BoundsError("RecombinationRates: site count must be positive");
    }

    int sites() const { return n_; }

    void set(const Partition& a, double rate) {
        if (a.sites() != n_)
            throw DimensionError("RecombinationRates::set: wrong site count");
        if (!(rate >= 0.0) || !std::isfinite(rate))
            throw ValidityError("RecombinationRates::set: rate must be finite and >= 0");
        auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const auto& e) { return e.first == a; });
        if (it == entries_.end()) {
            if (rate > 0.0) {
                entries_.emplace_back(a, rate);
                std::sort(entries_.begin(), entries_.end(), [](const auto& x, const auto& y) {
                    return x.first.growth_string() < y.first.growth_string();
                });
            }
        } else if (rate > 0.0) {
            it->second = rate;
        } else {
            entries_.erase(it);
        }
    }

    double rate(const Partition& a) const {
        if (a.sites() != n_)
            throw DimensionError("RecombinationRates::rate: wrong site count");
        for (const auto& e : entries_)
            if (e.first == a) return e.second;
        return 0.0;
    }

    /// Sum of all rates.
    double total() const {
        double s = 0.0;
        for (const auto& e : entries_) s += e.second;
        return s;
    }

    /// Positive-rate partitions in enumeration order.
    const std::vector<std::pair<Partition, double>>& supported() const { return entries_; }

    bool empty() const { return entries_.empty(); }

    /// True when some partition other than the one-block one carries rate.
    bool has_proper_support() const {
        for (const auto& e : entries_)
            if (e.first.block_count() > 1) return true;
        return false;
    }

private:
    int n_;
    std::vector<std::pair<Partition, double>> entries_;
};

} // namespace recoflow
