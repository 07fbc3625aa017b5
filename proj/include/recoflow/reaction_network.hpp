#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "recoflow/errors.hpp"
#include "recoflow/partition.hpp"
#include "recoflow/rates.hpp"
#include "recoflow/type_space.hpp"

namespace recoflow {

/// Work ceiling on the total number of ordered tuples enumerated when a
/// network is built (sum over rated partitions of carrier^blocks).
inline constexpr double kMaxNetworkWork = 16777216.0;  // 2^24

/// What the species of a network are.
enum class SpeciesKind {
    Type,          ///< species = types of a product space, id = type index
    SetPartition,  ///< species = partitions of {1..n}, id = enumeration index
};

/// One mass-action reaction: an ordered substrate tuple of length k (one slot
/// per block of the originating partition) and the k ordered products formed
/// by cyclically recombining the tuple.
struct Reaction {
    std::vector<int> tuple;          ///< ordered substrates (species ids)
    std::vector<int> product_tuple;  ///< ordered products, j-th cyclic mosaic
    std::vector<int> substrates;     ///< sorted copy of tuple (complex)
    std::vector<int> products;       ///< sorted copy of product_tuple (complex)
    double kappa = 0.0;              ///< rate(C) / blocks(C)
    int origin = -1;                 ///< enumeration index of the partition C
    bool is_void = false;            ///< products equal substrates as multisets
};

/// Involution pairing of a type-level network into forward/backward pairs.
struct Pairing {
    std::vector<std::pair<int, int>> pairs;  ///< (forward, backward) reaction ids
    std::vector<int> fixed_point_voids;      ///< reactions the involution fixes
    int non_void_pair_count = 0;
};

struct ReactionNetwork {
    SpeciesKind kind = SpeciesKind::Type;
    int sites = 0;
    std::size_t carrier_size = 0;
    std::vector<Reaction> reactions;
    std::optional<Pairing> pairing;

    int void_count() const {
        int c = 0;
        for (const auto& r : reactions) c += r.is_void ? 1 : 0;
        return c;
    }
};

namespace detail {

/// Per-block partial type indices: contrib[i][x] is the contribution of the
/// letters of type x on block i of the partition to a full type index.
inline std::vector<std::vector<std::size_t>> block_contrib(const TypeSpace& space,
                                                           const Partition& c) {
    std::vector<std::vector<std::size_t>> contrib(c.blocks().size());
    for (std::size_t i = 0; i < c.blocks().size(); ++i) {
        contrib[i].resize(space.type_count());
        for (std::size_t x = 0; x < space.type_count(); ++x) {
            std::size_t part = 0;
            for (int s : c.blocks()[i])
                part += static_cast<std::size_t>(space.letter(x, s)) * space.place_value(s);
            contrib[i][x] = part;
        }
    }
    return contrib;
}

/// Products of an ordered parent tuple under a partition, as type indices:
/// product j (0-based) takes block i from parent (i + j) mod k.
inline std::vector<std::size_t> cyclic_products(
    const std::vector<std::vector<std::size_t>>& contrib, const std::vector<std::size_t>& tuple) {
    std::size_t k = tuple.size();
    std::vector<std::size_t> out(k, 0);
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t y = 0;
        for (std::size_t i = 0; i < k; ++i) y += contrib[i][tuple[(i + j) % k]];
        out[j] = y;
    }
    return out;
}

inline Reaction finish_reaction(std::vector<int> tuple, std::vector<int> product_tuple,
                                double kappa, int origin) {
    Reaction r;
    r.tuple = std::move(tuple);
    r.product_tuple = std::move(product_tuple);
    r.substrates = r.tuple;
    r.products = r.product_tuple;
    std::sort(r.substrates.begin(), r.substrates.end());
    std::sort(r.products.begin(), r.products.end());
    r.kappa = kappa;
    r.origin = origin;
    r.is_void = (r.substrates == r.products);
    return r;
}

} // namespace detail

/// Builds the reaction a partition C induces on one ordered tuple of parents.
/// Product j is the mosaic taking block i of C from parent (i + j - 1) mod k;
/// kappa is rate_of_c divided by the block count.
inline Reaction type_reaction(const TypeSpace& space, const PartitionTable& table,
                              const Partition& c, const std::vector<TypeSequence>& tuple,
                              double rate_of_c) {
    if (c.sites() != space.sites())
        throw DimensionError("type_reaction: partition site count mismatch");
    std::size_t k = c.blocks().size();
    if (tuple.size() != k)
        throw ArityError("type_reaction: tuple length " + std::to_string(tuple.size()) +
                         " does not match block count " + std::to_string(k));
    if (!(rate_of_c >= 0.0))
        throw ValidityError("type_reaction: rate must be >= 0");
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = space.encode(tuple[i]);
    auto contrib = detail::block_contrib(space, c);
    auto prod = detail::cyclic_products(contrib, idx);
    std::vector<int> t(idx.begin(), idx.end());
    std::vector<int> p(prod.begin(), prod.end());
    return detail::finish_reaction(std::move(t), std::move(p), rate_of_c / static_cast<double>(k),
                                   table.index_of(c));
}

/// The crossover involution on ordered parent tuples: it returns the product
/// tuple of (C, tuple) in reverse order.  Applying it twice restores the
/// input, and it swaps the substrate and product complexes.
inline std::vector<TypeSequence> phi_involution(const TypeSpace& space, const Partition& c,
                                                const std::vector<TypeSequence>& tuple) {
    if (c.sites() != space.sites())
        throw DimensionError("phi_involution: partition site count mismatch");
    std::size_t k = c.blocks().size();
    if (tuple.size() != k)
        throw ArityError("phi_involution: tuple length does not match block count");
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = space.encode(tuple[i]);
    auto prod = detail::cyclic_products(detail::block_contrib(space, c), idx);
    std::vector<TypeSequence> out(k);
    for (std::size_t j = 0; j < k; ++j) out[j] = space.decode(prod[k - 1 - j]);
    return out;
}

/// Enumerates every reaction of the type-level network: one reaction per rated
/// partition C and ordered tuple in X^blocks(C).  Void reactions are kept and
/// flagged.  Raises ResourceError when the tuple count exceeds the ceiling.
inline ReactionNetwork build_type_network(const TypeSpace& space,
                                          const RecombinationRates& rates) {
    if (rates.sites() != space.sites())
        throw DimensionError("build_type_network: rate function site count mismatch");
    double work = 0.0;
    for (const auto& [part, rate] : rates.supported()) {
        double tuples = 1.0;
        for (std::size_t i = 0; i < part.blocks().size(); ++i)
            tuples *= static_cast<double>(space.type_count());
        work += tuples;
    }
    if (work > kMaxNetworkWork)
        throw ResourceError("build_type_network: tuple enumeration exceeds 2^24");

    PartitionTable table(space.sites());
    ReactionNetwork net;
    net.kind = SpeciesKind::Type;
    net.sites = space.sites();
    net.carrier_size = space.type_count();
    for (const auto& [part, rate] : rates.supported()) {
        std::size_t k = part.blocks().size();
        auto contrib = detail::block_contrib(space, part);
        double kappa = rate / static_cast<double>(k);
        int origin = table.index_of(part);
        std::vector<std::size_t> tuple(k, 0);
        while (true) {
            auto prod = detail::cyclic_products(contrib, tuple);
            std::vector<int> t(tuple.begin(), tuple.end());
            std::vector<int> p(prod.begin(), prod.end());
            net.reactions.push_back(
                detail::finish_reaction(std::move(t), std::move(p), kappa, origin));
            std::size_t d = k;
            while (d > 0) {
                if (++tuple[d - 1] < space.type_count()) break;
                tuple[d - 1] = 0;
                --d;
            }
            if (d == 0) break;
        }
    }
    return net;
}

/// Pairs every reaction of a type-level network with its involution partner.
/// Postconditions checked here: the partner swaps substrate and product
/// complexes and carries the same kappa; involution fixed points are void.
/// Any violation raises ReversibilityError.
inline void pair_reactions(ReactionNetwork& net) {
    if (net.kind != SpeciesKind::Type)
        throw ValidityError("pair_reactions: requires a type-level network");
    std::map<std::pair<int, std::vector<int>>, int> lookup;
    for (std::size_t i = 0; i < net.reactions.size(); ++i)
        lookup.emplace(std::make_pair(net.reactions[i].origin, net.reactions[i].tuple),
                       static_cast<int>(i));
    Pairing pairing;
    std::vector<char> done(net.reactions.size(), 0);
    for (std::size_t i = 0; i < net.reactions.size(); ++i) {
        if (done[i]) continue;
        const Reaction& r = net.reactions[i];
        std::vector<int> partner_tuple(r.product_tuple.rbegin(), r.product_tuple.rend());
        auto it = lookup.find({r.origin, partner_tuple});
        if (it == lookup.end())
            throw ReversibilityError("pair_reactions: involution partner missing");
        int j = it->second;
        if (j == static_cast<int>(i)) {
            if (!r.is_void)
                throw ReversibilityError(
                    "pair_reactions: involution fixed point is not void");
            pairing.fixed_point_voids.push_back(static_cast<int>(i));
            done[i] = 1;
            continue;
        }
        const Reaction& q = net.reactions[static_cast<std::size_t>(j)];
        if (q.substrates != r.products || q.products != r.substrates)
            throw ReversibilityError("pair_reactions: partner complexes do not swap");
        if (q.kappa != r.kappa)
            throw ReversibilityError("pair_reactions: partner rate differs");
        int fwd = static_cast<int>(i), bwd = j;
        if (net.reactions[static_cast<std::size_t>(bwd)].tuple <
            net.reactions[static_cast<std::size_t>(fwd)].tuple)
            std::swap(fwd, bwd);
        pairing.pairs.emplace_back(fwd, bwd);
        if (!r.is_void) ++pairing.non_void_pair_count;
        done[i] = 1;
        done[static_cast<std::size_t>(j)] = 1;
    }
    net.pairing = std::move(pairing);
}

/// Mass-action right-hand side: for every non-void reaction with substrate
/// tuple r and product tuple s, flow kappa * prod c(r_i) is moved from the
/// substrates to the products.  Void reactions contribute exactly 0.
inline std::vector<double> mass_action_rhs(const ReactionNetwork& net,
                                           const std::vector<double>& c) {
    if (c.size() != net.carrier_size)
        throw DimensionError("mass_action_rhs: carrier size mismatch");
    std::vector<double> out(c.size(), 0.0);
    for (const auto& r : net.reactions) {
        if (r.is_void) continue;
        double flux = r.kappa;
        for (int s : r.tuple) flux *= c[static_cast<std::size_t>(s)];
        for (int s : r.product_tuple) out[static_cast<std::size_t>(s)] += flux;
        for (int s : r.tuple) out[static_cast<std::size_t>(s)] -= flux;
    }
    return out;
}

/// Partition-level analogue of type_reaction.  Parents are partitions; the
/// j-th product is the disjoint union over blocks C_i of the restriction of
/// parent (i + j - 1) mod k to C_i.
inline Reaction partition_reaction(const PartitionTable& table, const Partition& c,
                                   const std::vector<Partition>& tuple, double rate_of_c) {
    int n = table.sites();
    if (c.sites() != n)
        throw DimensionError("partition_reaction: partition site count mismatch");
    std::size_t k = c.blocks().size();
    if (tuple.size() != k)
        throw ArityError("partition_reaction: tuple length " + std::to_string(tuple.size()) +
                         " does not match block count " + std::to_string(k));
    for (const auto& a : tuple)
        if (a.sites() != n)
            throw DimensionError("partition_reaction: tuple member site count mismatch");
    if (!(rate_of_c >= 0.0))
        throw ValidityError("partition_reaction: rate must be >= 0");
    std::vector<int> t(k), p(k);
    for (std::size_t i = 0; i < k; ++i) t[i] = table.index_of(tuple[i]);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<SubsetPartition> pieces;
        pieces.reserve(k);
        for (std::size_t i = 0; i < k; ++i)
            pieces.push_back(restrict_to(tuple[(i + j) % k], c.blocks()[i]));
        p[j] = table.index_of(disjoint_union(pieces));
    }
    return detail::finish_reaction(std::move(t), std::move(p), rate_of_c / static_cast<double>(k),
                                   table.index_of(c));
}

/// Full partition-level network: one reaction per rated partition C and
/// ordered tuple of partitions.  Species ids are enumeration indices.
inline ReactionNetwork build_partition_network(const PartitionTable& table,
                                               const RecombinationRates& rates) {
    if (rates.sites() != table.sites())
        throw DimensionError("build_partition_network: rate function site count mismatch");
    std::size_t carrier = static_cast<std::size_t>(table.size());
    double work = 0.0;
    for (const auto& [part, rate] : rates.supported()) {
        double tuples = 1.0;
        for (std::size_t i = 0; i < part.blocks().size(); ++i)
            tuples *= static_cast<double>(carrier);
        work += tuples;
    }
    if (work > kMaxNetworkWork)
        throw ResourceError("build_partition_network: tuple enumeration exceeds 2^24");

    ReactionNetwork net;
    net.kind = SpeciesKind::SetPartition;
    net.sites = table.sites();
    net.carrier_size = carrier;
    std::vector<Partition> members;
    for (const auto& [part, rate] : rates.supported()) {
        std::size_t k = part.blocks().size();
        double kappa = rate / static_cast<double>(k);
        int origin = table.index_of(part);

        // product lookup per (i, parent): restriction patterns are reused
        std::vector<std::vector<SubsetPartition>> restricted(
            k, std::vector<SubsetPartition>());
        for (std::size_t i = 0; i < k; ++i) {
            restricted[i].reserve(carrier);
            for (int a = 0; a < table.size(); ++a)
                restricted[i].push_back(restrict_to(table[a], part.blocks()[i]));
        }

        std::vector<std::size_t> tuple(k, 0);
        while (true) {
            std::vector<int> t(tuple.begin(), tuple.end());
            std::vector<int> p(k);
            for (std::size_t j = 0; j < k; ++j) {
                std::vector<SubsetPartition> pieces;
                pieces.reserve(k);
                for (std::size_t i = 0; i < k; ++i)
                    pieces.push_back(restricted[i][tuple[(i + j) % k]]);
                p[j] = table.index_of(disjoint_union(pieces));
            }
            net.reactions.push_back(
                detail::finish_reaction(std::move(t), std::move(p), kappa, origin));
            std::size_t d = k;
            while (d > 0) {
                if (++tuple[d - 1] < carrier) break;
                tuple[d - 1] = 0;
                --d;
            }
            if (d == 0) break;
        }
    }
    return net;
}

/// Right-hand side of the closed nonlinear system for the mixture
/// coefficients a over the partition lattice:
///   da(A) = -total_rate * a(A)
///           + sum over rated B >= A of rate(B) * prod over blocks B_i of
///             (sum of a(C) over C whose restriction to B_i equals A's).
inline std::vector<double> nonlinear_coeff_rhs(const PartitionTable& table,
                                               const std::vector<double>& a,
                                               const RecombinationRates& rates) {
    if (rates.sites() != table.sites())
        throw DimensionError("nonlinear_coeff_rhs: rate function site count mismatch");
    if (a.size() != static_cast<std::size_t>(table.size()))
        throw DimensionError("nonlinear_coeff_rhs: carrier size mismatch");
    double total = rates.total();
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = -total * a[i];

    for (const auto& [b, rate] : rates.supported()) {
        std::size_t k = b.blocks().size();
        // pattern id of each lattice member's restriction to each block of b
        std::vector<std::vector<int>> pattern(k, std::vector<int>(a.size()));
        std::vector<int> pattern_count(k, 0);
        std::vector<std::map<std::vector<std::vector<int>>, int>> seen(k);
        for (std::size_t i = 0; i < k; ++i) {
            for (int c = 0; c < table.size(); ++c) {
                auto r = restrict_to(table[c], b.blocks()[i]);
                auto [it, inserted] = seen[i].emplace(r.blocks, pattern_count[i]);
                if (inserted) ++pattern_count[i];
                pattern[i][static_cast<std::size_t>(c)] = it->second;
            }
        }
        // grouped sums of a by pattern
        std::vector<std::vector<double>> sums(k);
        for (std::size_t i = 0; i < k; ++i) {
            sums[i].assign(static_cast<std::size_t>(pattern_count[i]), 0.0);
            for (std::size_t c = 0; c < a.size(); ++c)
                sums[i][static_cast<std::size_t>(pattern[i][c])] += a[c];
        }
        for (std::size_t idx = 0; idx < a.size(); ++idx) {
            if (!is_finer(table[static_cast<int>(idx)], b)) continue;
            double prod = rate;
            for (std::size_t i = 0; i < k; ++i)
                prod *= sums[i][static_cast<std::size_t>(pattern[i][idx])];
            out[idx] += prod;
        }
    }
    return out;
}

/// Evaluates both sides of the tuple-sum identity behind the nonlinear
/// system, for one pair A <= B (refinement order): the left side is the
/// blockwise product of grouped sums, the right side the average over cyclic
/// offsets of the explicit tuple sum.  Returns (lhs, rhs).
inline std::pair<double, double> uglyproduct_check(const PartitionTable& table,
                                                   const Partition& a_part, const Partition& b,
                                                   const std::vector<double>& a) {
    if (a.size() != static_cast<std::size_t>(table.size()))
        throw DimensionError("uglyproduct_check: carrier size mismatch");
    if (a_part.sites() != table.sites() || b.sites() != table.sites())
        throw DimensionError("uglyproduct_check: partition site count mismatch");
    if (!is_finer(a_part, b))
        throw OrderError("uglyproduct_check: first partition must refine the second");
    std::size_t k = b.blocks().size();

    double lhs = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        auto target = restrict_to(a_part, b.blocks()[i]);
        double s = 0.0;
        for (int c = 0; c < table.size(); ++c)
            if (restrict_to(table[c], b.blocks()[i]) == target) s += a[static_cast<std::size_t>(c)];
        lhs *= s;
    }

    double rhs = 0.0;
    std::vector<std::size_t> tuple(k, 0);
    std::size_t carrier = a.size();
    while (true) {
        double w = 1.0;
        for (std::size_t i = 0; i < k; ++i) w *= a[tuple[i]];
        if (w != 0.0) {
            for (std::size_t j = 0; j < k; ++j) {
                std::vector<SubsetPartition> pieces;
                for (std::size_t i = 0; i < k; ++i)
                    pieces.push_back(
                        restrict_to(table[static_cast<int>(tuple[(i + j) % k])], b.blocks()[i]));
                if (disjoint_union(pieces) == a_part) rhs += w;
            }
        }
        std::size_t d = k;
        while (d > 0) {
            if (++tuple[d - 1] < carrier) break;
            tuple[d - 1] = 0;
            --d;
        }
        if (d == 0) break;
    }
    rhs /= static_cast<double>(k);
    return {lhs, rhs};
}

} // namespace recoflow
