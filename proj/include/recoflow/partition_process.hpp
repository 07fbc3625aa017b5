#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "recoflow/distribution.hpp"
#include "recoflow/errors.hpp"
#include "recoflow/matrix.hpp"
#include "recoflow/partition.hpp"
#include "recoflow/rates.hpp"
#include "recoflow/rng.hpp"
#include "recoflow/type_space.hpp"

namespace recoflow {

/// Rate at which a block, viewed in isolation, is cut into the given pattern:
/// the sum of rate(C) over all partitions C whose restriction to the block
/// equals the pattern.  The pattern must be a partition of exactly that block.
inline double marginal_rate(const RecombinationRates& rates, const std::vector<int>& block,
                            const SubsetPartition& pattern) {
    std::vector<int> sorted = block;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.empty())
        throw ValidityError("marginal_rate: empty block");
    if (pattern.support != sorted)
        throw ValidityError("marginal_rate: pattern support does not equal the block");
    double total = 0.0;
    for (const auto& [part, rate] : rates.supported())
        if (restrict_to(part, sorted) == pattern) total += rate;
    return total;
}

/// Ceiling on the lattice size handled by the generator builder (n <= 6).
inline constexpr int kMaxGeneratorSites = 6;

/// Generator of the block-splitting Markov chain on the partition lattice,
/// indexed by enumeration order.  A jump replaces one block A of the current
/// partition by the blocks of a proper pattern B_A, at the marginal rate of
/// that pattern; the diagonal makes rows sum to zero.
inline Matrix build_generator(const PartitionTable& table, const RecombinationRates& rates) {
    if (rates.sites() != table.sites())
        throw DimensionError("build_generator: rate function site count mismatch");
    if (table.sites() > kMaxGeneratorSites)
        throw ResourceError("build_generator: supports at most " +
                            std::to_string(kMaxGeneratorSites) + " sites");
    std::size_t m = static_cast<std::size_t>(table.size());
    Matrix q(m, m);
    for (int a = 0; a < table.size(); ++a) {
        const Partition& state = table[a];
        for (const auto& block : state.blocks()) {
            if (block.size() < 2) continue;
            for (const auto& pattern : enumerate_subset_partitions(block)) {
                if (pattern.blocks.size() < 2) continue;  // replacing A by {A} is no jump
                double rate = marginal_rate(rates, block, pattern);
                if (rate <= 0.0) continue;
                std::vector<std::vector<int>> blocks;
                for (const auto& other : state.blocks())
                    if (other != block) blocks.push_back(other);
                for (const auto& piece : pattern.blocks) blocks.push_back(piece);
                int b = table.index_of(Partition(table.sites(), std::move(blocks)));
                q(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) += rate;
            }
        }
        double row = 0.0;
        for (std::size_t b = 0; b < m; ++b)
            if (b != static_cast<std::size_t>(a)) row += q(static_cast<std::size_t>(a), b);
        q(static_cast<std::size_t>(a), static_cast<std::size_t>(a)) = -row;
    }
    return q;
}

/// Master equation right-hand side: db = Q^T b.
inline std::vector<double> master_rhs(const Matrix& q, const std::vector<double>& b) {
    return q.apply_transpose(b);
}

/// Validates that a square matrix is a conservative generator: off-diagonal
/// entries >= 0 and rows summing to ~0.
inline void check_generator(const Matrix& q, double tol = 1e-9) {
    if (q.rows() != q.cols())
        throw ValidityError("check_generator: matrix not square");
    for (std::size_t i = 0; i < q.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < q.cols(); ++j) {
            if (i != j && q(i, j) < 0.0)
                throw ValidityError("check_generator: negative off-diagonal rate");
            row += q(i, j);
        }
        if (std::abs(row) > tol)
            throw ValidityError("check_generator: row " + std::to_string(i) +
                                " sums to " + std::to_string(row));
    }
}

/// Onsager-style decomposition of a Markov generator along a strictly
/// increasing potential W:
///   K(p) = sum over ordered (i,j), Q(i,j) > 0, of
///          p(i) Q(i,j) / (W(j) - W(i)) * (e_j - e_i)(e_j - e_i)^T.
/// Every allowed jump must increase W (else MonotonicityError); then
/// K(p) grad W = Q^T p holds identically in p.
inline Matrix mcsmo_matrix(const Matrix& q, const std::vector<double>& w,
                           const std::vector<double>& p) {
    check_generator(q);
    std::size_t n = q.rows();
    if (w.size() != n || p.size() != n)
        throw DimensionError("mcsmo_matrix: potential or state length mismatch");
    for (double v : p)
        if (!(v >= 0.0))
            throw ValidityError("mcsmo_matrix: state must be entrywise >= 0");
    Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || q(i, j) <= 0.0) continue;
            if (!(w[j] > w[i]))
                throw MonotonicityError("mcsmo_matrix: jump " + std::to_string(i) + " -> " +
                                        std::to_string(j) + " does not increase the potential");
            double weight = p[i] * q(i, j) / (w[j] - w[i]);
            k(i, i) += weight;
            k(j, j) += weight;
            k(i, j) -= weight;
            k(j, i) -= weight;
        }
    }
    return k;
}

/// The 4-state teaching example used to exhibit a non-diagonalizable
/// generator: states A,B,C,D with jumps A->B, A->C at rate 1 and B->D, C->D
/// at rate 2; the potential counts the steps from A plus one.
struct FourStateExample {
    Matrix q;               ///< generator, states ordered A,B,C,D
    std::vector<double> w;  ///< potential (1,2,2,3)
};

inline FourStateExample four_state_example() {
    FourStateExample ex;
    ex.q = Matrix(4, 4);
    ex.q(0, 0) = -2.0;
    ex.q(0, 1) = 1.0;
    ex.q(0, 2) = 1.0;
    ex.q(1, 1) = -2.0;
    ex.q(1, 3) = 2.0;
    ex.q(2, 2) = -2.0;
    ex.q(2, 3) = 2.0;
    ex.w = {1.0, 2.0, 2.0, 3.0};
    return ex;
}

/// One sampled chain path: the state after each jump plus the jump times.
struct PathSample {
    int start_state = 0;
    double t_end = 0.0;
    std::vector<double> jump_times;  ///< strictly increasing, within (0, t_end]
    std::vector<int> states;         ///< states[0] = start, states[i] = after jump i

    int state_at(double t) const {
        if (t < 0.0 || t > t_end)
            throw HorizonError("PathSample::state_at: time outside [0, t_end]");
        std::size_t lo = 0, hi = jump_times.size();
        while (lo < hi) {  // count jumps with time <= t
            std::size_t mid = (lo + hi) / 2;
            if (jump_times[mid] <= t)
                lo = mid + 1;
            else
                hi = mid;
        }
        return states[lo];
    }
};

namespace detail {

inline PathSample simulate_one_path(const Matrix& q, int start, double t_end,
                                    std::uint64_t seed) {
    PathSample path;
    path.start_state = start;
    path.t_end = t_end;
    path.states.push_back(start);
    Rng rng(seed);
    int state = start;
    double t = 0.0;
    while (true) {
        double out_rate = -q(static_cast<std::size_t>(state), static_cast<std::size_t>(state));
        if (out_rate <= 0.0) break;  // absorbing
        t += rng.exponential(out_rate);
        if (t > t_end) break;
        double u = rng.unit() * out_rate;
        double acc = 0.0;
        int next = -1;
        for (std::size_t j = 0; j < q.cols(); ++j) {
            if (j == static_cast<std::size_t>(state)) continue;
            double rate = q(static_cast<std::size_t>(state), j);
            if (rate <= 0.0) continue;
            acc += rate;
            next = static_cast<int>(j);
            if (acc >= u) break;
        }
        if (next < 0) break;  // fp-degenerate row: no positive jump target
        path.jump_times.push_back(t);
        path.states.push_back(next);
        state = next;
    }
    return path;
}

} // namespace detail

/// Simulates independent continuous-time chain paths by the direct (Gillespie)
/// method.  Each path uses the stream derive_seed(seed, index), so results do
/// not depend on thread count or scheduling.
inline std::vector<PathSample> simulate_paths(const Matrix& q, int start, double t_end,
                                              int n_paths, std::uint64_t seed,
                                              int threads = 1) {
    check_generator(q);
    if (start < 0 || static_cast<std::size_t>(start) >= q.rows())
        throw BoundsError("simulate_paths: start state out of range");
    if (n_paths < 1)
        throw ValidityError("simulate_paths: needs at least one path");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw ValidityError("simulate_paths: t_end must be finite and >= 0");
    std::vector<PathSample> paths(static_cast<std::size_t>(n_paths));
    auto worker = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i)
            paths[static_cast<std::size_t>(i)] = detail::simulate_one_path(
                q, start, t_end, derive_seed(seed, static_cast<std::uint64_t>(i)));
    };
    int usable = std::max(1, std::min(threads, n_paths));
    if (usable == 1) {
        worker(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        int chunk = (n_paths + usable - 1) / usable;
        for (int t = 0; t < usable; ++t) {
            int lo = t * chunk, hi = std::min(n_paths, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return paths;
}

/// Monte-Carlo estimate of a type distribution via the duality with the
/// partition chain: the estimator averages R_{Sigma_t}(omega0) over paths.
struct DualEstimate {
    std::vector<double> mean;
    std::vector<double> std_error;  ///< per-entry standard error of the mean
    int n_paths = 0;
};

inline DualEstimate mc_dual_statistics(const TypeSpace& space, const PartitionTable& table,
                                       const std::vector<PathSample>& paths,
                                       const Distribution& omega0, double t) {
    if (omega0.size() != space.type_count())
        throw DimensionError("mc_dual_statistics: carrier size mismatch");
    if (space.sites() != table.sites())
        throw DimensionError("mc_dual_statistics: site count mismatch");
    if (paths.empty())
        throw ValidityError("mc_dual_statistics: no paths given");
    for (const auto& p : paths)
        if (t > p.t_end)
            throw HorizonError("mc_dual_statistics: time beyond the simulated horizon");

    std::vector<std::vector<double>> cache(static_cast<std::size_t>(table.size()));
    auto recombined = [&](int idx) -> const std::vector<double>& {
        auto& slot = cache[static_cast<std::size_t>(idx)];
        if (slot.empty())
            slot = recombinator_product_raw(space, omega0.weights(), table[idx]);
        return slot;
    };

    std::size_t m = space.type_count();
    std::vector<double> mean(m, 0.0), m2(m, 0.0);
    double count = 0.0;
    for (const auto& p : paths) {
        const auto& v = recombined(p.state_at(t));
        count += 1.0;
        for (std::size_t x = 0; x < m; ++x) {
            double delta = v[x] - mean[x];
            mean[x] += delta / count;
            m2[x] += delta * (v[x] - mean[x]);
        }
    }
    DualEstimate est;
    est.mean = std::move(mean);
    est.n_paths = static_cast<int>(paths.size());
    est.std_error.assign(m, 0.0);
    if (paths.size() > 1)
        for (std::size_t x = 0; x < m; ++x)
            est.std_error[x] = std::sqrt(m2[x] / (count - 1.0) / count);
    return est;
}

} // namespace recoflow
