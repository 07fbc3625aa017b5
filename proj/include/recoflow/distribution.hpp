#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "recoflow/errors.hpp"
#include "recoflow/partition.hpp"
#include "recoflow/rng.hpp"
#include "recoflow/type_space.hpp"

namespace recoflow {

/// Nonnegative weight vector over a finite carrier.
///
/// strict() additionally demands total mass 1 (probability vector); relaxed()
/// only demands finite nonnegative entries and is used for intermediate states
/// of integrators before renormalization.
class Distribution {
public:
    static Distribution strict(std::vector<double> w, double tol = 1e-12) {
        validate(w);
        double s = 0.0;
        for (double v : w) s += v;
        if (std::abs(s - 1.0) > tol)
            throw ValidityError("Distribution: mass " + std::to_string(s) +
                                " differs from 1 beyond tolerance");
        return Distribution(std::move(w));
    }

    static Distribution relaxed(std::vector<double> w) {
        validate(w);
        return Distribution(std::move(w));
    }

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    const std::vector<double>& weights() const { return w_; }

    double mass() const {
        double s = 0.0;
        for (double v : w_) s += v;
        return s;
    }

    double min_weight() const {
        double m = w_.front();
        for (double v : w_) m = std::min(m, v);
        return m;
    }

private:
    explicit Distribution(std::vector<double> w) : w_(std::move(w)) {}

    static void validate(const std::vector<double>& w) {
        if (w.empty())
            throw ValidityError("Distribution: empty carrier");
        for (double v : w) {
            if (!std::isfinite(v))
                throw ValidityError("Distribution: non-finite weight");
            if (v < 0.0)
                throw ValidityError("Distribution: negative weight " + std::to_string(v));
        }
    }

    std::vector<double> w_;
};

/// Reproducible strictly positive random point of the probability simplex:
/// independent exponentials normalized by their sum.
inline Distribution random_distribution(std::size_t carrier, std::uint64_t seed) {
    if (carrier == 0)
        throw ValidityError("random_distribution: empty carrier");
    Rng rng(seed);
    std::vector<double> w(carrier);
    double total = 0.0;
    for (auto& v : w) {
        v = rng.exponential(1.0);
        total += v;
    }
    for (auto& v : w) v /= total;
    return Distribution::relaxed(std::move(w));
}

/// Marginal of a weight vector on a support set (raw version).
inline std::vector<double> marginal_raw(const TypeSpace& space, const std::vector<double>& w,
                                        const std::vector<int>& support) {
    if (w.size() != space.type_count())
        throw DimensionError("marginal: carrier size mismatch");
    ProjectionIndex pi(space, support);
    std::vector<double> m(pi.fragment_count(), 0.0);
    for (std::size_t x = 0; x < w.size(); ++x) m[pi(x)] += w[x];
    return m;
}

inline Distribution marginal(const TypeSpace& space, const Distribution& nu,
                             const std::vector<int>& support) {
    return Distribution::relaxed(marginal_raw(space, nu.weights(), support));
}

/// Product of block marginals (raw version): out(x) = prod_i m_i(x restricted
/// to block i).  This is the fast evaluation path.
inline std::vector<double> recombinator_product_raw(const TypeSpace& space,
                                                    const std::vector<double>& w,
                                                    const Partition& a) {
    if (a.sites() != space.sites())
        throw DimensionError("recombinator: partition site count mismatch");
    if (w.size() != space.type_count())
        throw DimensionError("recombinator: carrier size mismatch");
    std::vector<ProjectionIndex> proj;
    std::vector<std::vector<double>> marg;
    proj.reserve(a.blocks().size());
    for (const auto& block : a.blocks()) {
        proj.emplace_back(space, block);
        std::vector<double> m(proj.back().fragment_count(), 0.0);
        for (std::size_t x = 0; x < w.size(); ++x) m[proj.back()(x)] += w[x];
        marg.push_back(std::move(m));
    }
    std::vector<double> out(w.size());
    for (std::size_t x = 0; x < w.size(); ++x) {
        double v = 1.0;
        for (std::size_t k = 0; k < proj.size(); ++k) v *= marg[k][proj[k](x)];
        out[x] = v;
    }
    return out;
}

inline Distribution recombinator_product(const TypeSpace& space, const Distribution& nu,
                                         const Partition& a) {
    return Distribution::relaxed(recombinator_product_raw(space, nu.weights(), a));
}

/// Work ceiling for the tuple-sum recombinator evaluation.
inline constexpr std::size_t kMaxTupleWork = std::size_t{1} << 24;

/// Recombinator evaluated as an explicit sum over ordered parent tuples:
/// out(x) = sum over (x1..xk) in X^k of prod_i w(xi) restricted to the event
/// that the blockwise mosaic of the tuple equals x.  Mathematically equal to
/// the product of marginals; kept as an independent cross-check.
inline std::vector<double> recombinator_sum_raw(const TypeSpace& space,
                                                const std::vector<double>& w,
                                                const Partition& a) {
    if (a.sites() != space.sites())
        throw DimensionError("recombinator: partition site count mismatch");
    if (w.size() != space.type_count())
        throw DimensionError("recombinator: carrier size mismatch");
    std::size_t k = a.blocks().size();
    double work = 1.0;
    for (std::size_t i = 0; i < k; ++i) work *= static_cast<double>(space.type_count());
    if (work > static_cast<double>(kMaxTupleWork))
        throw ResourceError("recombinator_sum: tuple count exceeds 2^24");

    // contrib[i][x] = partial type index contributed by parent i's letters on block i
    std::vector<std::vector<std::size_t>> contrib(k);
    for (std::size_t i = 0; i < k; ++i) {
        contrib[i].resize(space.type_count());
        const auto& block = a.blocks()[i];
        for (std::size_t x = 0; x < space.type_count(); ++x) {
            std::size_t part = 0;
            for (int s : block)
                part += static_cast<std::size_t>(space.letter(x, s)) * space.place_value(s);
            contrib[i][x] = part;
        }
    }

    std::vector<double> out(space.type_count(), 0.0);
    std::vector<std::size_t> tuple(k, 0);
    while (true) {
        double weight = 1.0;
        std::size_t target = 0;
        for (std::size_t i = 0; i < k; ++i) {
            weight *= w[tuple[i]];
            target += contrib[i][tuple[i]];
        }
        out[target] += weight;
        std::size_t d = k;
        while (d > 0) {
            if (++tuple[d - 1] < space.type_count()) break;
            tuple[d - 1] = 0;
            --d;
        }
        if (d == 0) break;
    }
    return out;
}

inline Distribution recombinator_sum(const TypeSpace& space, const Distribution& nu,
                                     const Partition& a) {
    return Distribution::relaxed(recombinator_sum_raw(space, nu.weights(), a));
}

/// sum_x c(x) log c(x) with the convention 0 log 0 = 0.
inline double entropy_sum(const std::vector<double>& c) {
    double s = 0.0;
    for (double v : c) {
        if (v < 0.0)
            throw ValidityError("entropy_sum: negative entry");
        if (v > 0.0) s += v * std::log(v);
    }
    return s;
}

inline double entropy_sum(const Distribution& c) { return entropy_sum(c.weights()); }

/// Free energy F(c) = -sum_x (c(x) log c(x) - c(x)); on the mass-1 simplex
/// this equals 1 - entropy_sum(c).
inline double free_energy(const std::vector<double>& c) {
    double s = 0.0;
    for (double v : c) {
        if (v < 0.0)
            throw ValidityError("free_energy: negative entry");
        if (v > 0.0) s += v * std::log(v) - v;
    }
    return -s;
}

inline double free_energy(const Distribution& c) { return free_energy(c.weights()); }

/// Euclidean gradient of F: entry x is -log c(x).  Requires an interior point.
inline std::vector<double> grad_free_energy(const std::vector<double>& c) {
    std::vector<double> g(c.size());
    for (std::size_t x = 0; x < c.size(); ++x) {
        if (c[x] <= 0.0)
            throw BoundaryError("grad_free_energy: zero entry at index " + std::to_string(x));
        g[x] = -std::log(c[x]);
    }
    return g;
}

inline std::vector<double> grad_free_energy(const Distribution& c) {
    return grad_free_energy(c.weights());
}

} // namespace recoflow
