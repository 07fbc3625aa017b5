#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "recoflow/distribution.hpp"
#include "recoflow/errors.hpp"
#include "recoflow/matrix.hpp"
#include "recoflow/reaction_network.hpp"
#include "recoflow/rng.hpp"

namespace recoflow {

/// Logarithmic mean L(x,y) = (x - y) / (log x - log y) for x,y >= 0, with the
/// continuous extensions L(x,x) = x and L(x,0) = L(0,y) = 0.
///
/// Evaluated via r = (x-y)/(x+y) and atanh for cancellation safety, with a
/// series branch when |r| is tiny.  Arguments are ordered first so the result
/// is exactly symmetric.
inline double log_mean(double x, double y) {
    if (!(x >= 0.0) || !(y >= 0.0) || !std::isfinite(x) || !std::isfinite(y))
        throw DomainError("log_mean: arguments must be finite and >= 0");
    if (x < y) std::swap(x, y);
    if (y == 0.0) return 0.0;
    if (x == y) return x;
    double s = x + y;
    double r = (x - y) / s;
    if (r < 1e-4) {
        // L = s/2 * (1 - r^2/3 - r^4/45 - ...); r^4 term below double precision here
        return 0.5 * s * (1.0 - r * r / 3.0);
    }
    return 0.5 * s * r / std::atanh(r);
}

/// Mobility matrix of a paired type-level network at an interior state c:
///   C(c) = sum over pairs of kappa * L(prod c(substrates), prod c(products))
///          * v v^T,  v = product indicator - substrate indicator.
/// Symmetric and positive semidefinite by construction; rows sum to 0.
inline Matrix onsager_matrix(const ReactionNetwork& net, const std::vector<double>& c) {
    if (net.kind != SpeciesKind::Type)
        throw ValidityError("onsager_matrix: requires a type-level network");
    if (!net.pairing)
        throw ValidityError("onsager_matrix: network has not been paired");
    if (c.size() != net.carrier_size)
        throw DimensionError("onsager_matrix: carrier size mismatch");
    for (std::size_t x = 0; x < c.size(); ++x)
        if (!(c[x] > 0.0))
            throw BoundaryError("onsager_matrix: state not interior at index " +
                                std::to_string(x));
    Matrix m(c.size(), c.size());
    std::vector<double> coef(c.size(), 0.0);
    std::vector<int> touched;
    for (const auto& [fwd, bwd] : net.pairing->pairs) {
        const Reaction& r = net.reactions[static_cast<std::size_t>(fwd)];
        if (r.is_void) continue;
        double sub = 1.0, prod = 1.0;
        for (int s : r.substrates) sub *= c[static_cast<std::size_t>(s)];
        for (int s : r.products) prod *= c[static_cast<std::size_t>(s)];
        double weight = r.kappa * log_mean(sub, prod);
        touched.clear();
        for (int s : r.products) {
            touched.push_back(s);
            coef[static_cast<std::size_t>(s)] += 1.0;
        }
        for (int s : r.substrates) {
            touched.push_back(s);
            coef[static_cast<std::size_t>(s)] -= 1.0;
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (int a : touched) {
            double va = coef[static_cast<std::size_t>(a)];
            if (va == 0.0) continue;
            for (int b : touched) {
                double vb = coef[static_cast<std::size_t>(b)];
                if (vb == 0.0) continue;
                m(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) += weight * va * vb;
            }
        }
        for (int a : touched) coef[static_cast<std::size_t>(a)] = 0.0;
    }
    return m;
}

/// Flow right-hand side evaluated through the mobility form C(c) * grad F(c).
/// The products collapse exactly: v^T grad F = log(prod substrates) -
/// log(prod products), so each pair moves kappa * (prod sub - prod prod) * v.
inline std::vector<double> gradient_rhs(const ReactionNetwork& net,
                                        const std::vector<double>& c) {
    Matrix m = onsager_matrix(net, c);
    return m.apply(grad_free_energy(c));
}

namespace detail {

/// Adds a k x k class block to an 8 x 8 matrix under the index-sum reflection
/// symmetry: with 1-based indices, entry (i,j) equals entry (ell+2-i, j) and
/// (i, ell+2-j); rows whose type does not appear in the class stay zero.
/// For ell <= 7 the block sits on rows 1..k, otherwise on rows 8-k+1..8.
inline void embed_reflected(Matrix& m, const std::vector<std::vector<double>>& block, int ell) {
    int k = static_cast<int>(block.size());
    auto map_row = [&](int i) -> int {  // 1-based full index -> 1-based block index, 0 = none
        if (ell <= 7) {
            if (i <= k) return i;
            int mir = ell + 2 - i;
            if (mir >= 1 && mir <= k) return mir;
            return 0;
        }
        int lo = 8 - k;
        if (i > lo) return i - lo;
        int mir = ell + 2 - i;
        if (mir > lo && mir <= 8) return mir - lo;
        return 0;
    };
    for (int i = 1; i <= 8; ++i) {
        int bi = map_row(i);
        if (bi == 0) continue;
        for (int j = 1; j <= 8; ++j) {
            int bj = map_row(j);
            if (bj == 0) continue;
            m(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) +=
                block[static_cast<std::size_t>(bi - 1)][static_cast<std::size_t>(bj - 1)];
        }
    }
}

} // namespace detail

/// Hand-assembled mobility matrix for three binary sites, written out linkage
/// class by linkage class (six two-state classes plus one four-state class,
/// each extended over the eight types by the reflection symmetry of index
/// sums).  Independent of the generic network assembly; used to cross-check
/// it.  Types are indexed 0..7 by their binary reading, rho[i] is the rate of
/// separating site i+1 from the other two.
inline Matrix three_locus_reference(const std::vector<double>& nu, double rho1, double rho2,
                                    double rho3) {
    if (nu.size() != 8)
        throw DimensionError("three_locus_reference: needs 8 type masses");
    auto lm = [&](int a, int b, int c, int d) {
        return log_mean(nu[static_cast<std::size_t>(a)] * nu[static_cast<std::size_t>(b)],
                        nu[static_cast<std::size_t>(c)] * nu[static_cast<std::size_t>(d)]);
    };
    Matrix m(8, 8);

    {  // types 0,6 <-> 2,4 (and mirror), index sum 6
        double w = (rho1 + rho2) * lm(0, 6, 2, 4);
        detail::embed_reflected(m, {{w, 0, -w}, {0, 0, 0}, {-w, 0, w}}, 6);
    }
    {  // types 1,7 <-> 3,5 (and mirror), index sum 8
        double w = (rho1 + rho2) * lm(1, 7, 3, 5);
        detail::embed_reflected(m, {{w, 0, -w}, {0, 0, 0}, {-w, 0, w}}, 8);
    }
    {  // types 0,5 <-> 1,4 (and mirror), index sum 5
        double w = (rho1 + rho3) * lm(0, 5, 1, 4);
        detail::embed_reflected(m, {{w, -w, 0}, {-w, w, 0}, {0, 0, 0}}, 5);
    }
    {  // types 2,7 <-> 3,6 (and mirror), index sum 9
        double w = (rho1 + rho3) * lm(2, 7, 3, 6);
        detail::embed_reflected(m, {{0, 0, 0}, {0, w, -w}, {0, -w, w}}, 9);
    }
    {  // types 0,3 <-> 1,2 (and mirror), index sum 3
        double w = (rho2 + rho3) * lm(0, 3, 1, 2);
        detail::embed_reflected(m, {{w, -w}, {-w, w}}, 3);
    }
    {  // types 4,7 <-> 5,6 (and mirror), index sum 11
        double w = (rho2 + rho3) * lm(4, 7, 5, 6);
        detail::embed_reflected(m, {{w, -w}, {-w, w}}, 11);
    }
    {  // four-complex class on {0,7},{1,6},{2,5},{3,4}, index sum 7
        double l07_34 = lm(0, 7, 3, 4);
        double l07_25 = lm(0, 7, 2, 5);
        double l16_07 = lm(1, 6, 0, 7);
        double l16_25 = lm(1, 6, 2, 5);
        double l16_34 = lm(1, 6, 3, 4);
        double l25_34 = lm(2, 5, 3, 4);
        std::vector<std::vector<double>> block = {
            {rho1 * l07_34 + rho2 * l07_25 + rho3 * l16_07, -rho3 * l16_07, -rho2 * l07_25,
             -rho1 * l07_34},
            {-rho3 * l16_07, rho1 * l16_25 + rho2 * l16_34 + rho3 * l16_07, -rho1 * l16_25,
             -rho2 * l16_34},
            {-rho2 * l07_25, -rho1 * l16_25, rho1 * l16_25 + rho2 * l07_25 + rho3 * l25_34,
             -rho3 * l25_34},
            {-rho1 * l07_34, -rho2 * l16_34, -rho3 * l25_34,
             rho1 * l07_34 + rho2 * l16_34 + rho3 * l25_34}};
        detail::embed_reflected(m, block, 7);
    }
    return m;
}

/// Result of a positive-semidefiniteness certification.
struct PsdReport {
    bool quadratic_forms_ok = false;  ///< min v^T M v over random unit v
    bool eigenvalues_ok = false;      ///< min Jacobi eigenvalue
    double min_quadratic_form = 0.0;
    double min_eigenvalue = 0.0;

    bool ok() const { return quadratic_forms_ok && eigenvalues_ok; }
};

/// Certifies positive semidefiniteness two independent ways: seeded random
/// unit-vector quadratic forms and a full Jacobi eigendecomposition.  Both
/// must clear the tolerance (default -1e-9).  Asymmetric input beyond 1e-12
/// raises SymmetryError.
inline PsdReport psd_check(const Matrix& m, int trials = 64,
                           std::uint64_t seed = 0x9d2c5680u, double tol = -1e-9,
                           double sym_tol = 1e-12) {
    if (m.rows() != m.cols())
        throw DimensionError("psd_check: matrix not square");
    if (m.max_asymmetry() > sym_tol)
        throw SymmetryError("psd_check: asymmetry " + std::to_string(m.max_asymmetry()) +
                            " beyond tolerance");
    if (trials < 1)
        throw ValidityError("psd_check: needs at least one trial");
    std::size_t n = m.rows();
    Rng rng(seed);
    PsdReport report;
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        std::vector<double> v(n);
        double norm2 = 0.0;
        for (auto& vi : v) {
            vi = rng.normal();
            norm2 += vi * vi;
        }
        if (norm2 == 0.0) continue;
        double norm = std::sqrt(norm2);
        for (auto& vi : v) vi /= norm;
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += m(i, j) * v[j];
            q += v[i] * row;
        }
        worst = std::min(worst, q);
    }
    report.min_quadratic_form = worst;
    report.quadratic_forms_ok = worst >= tol;
    std::vector<double> ev = jacobi_eigenvalues(m, sym_tol);
    report.min_eigenvalue = ev.front();
    report.eigenvalues_ok = ev.front() >= tol;
    return report;
}

} // namespace recoflow
