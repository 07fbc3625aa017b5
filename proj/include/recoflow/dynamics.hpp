#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "recoflow/distribution.hpp"
#include "recoflow/errors.hpp"
#include "recoflow/partition.hpp"
#include "recoflow/rates.hpp"
#include "recoflow/type_space.hpp"

namespace recoflow {

/// Right-hand side of the recombination flow:
/// rhs(x) = sum over rated partitions A of rate(A) * (R_A(w)(x) - w(x)).
inline std::vector<double> reco_rhs(const TypeSpace& space, const std::vector<double>& w,
                                    const RecombinationRates& rates) {
    if (rates.sites() != space.sites())
        throw DimensionError("reco_rhs: rate function site count mismatch");
    if (w.size() != space.type_count())
        throw DimensionError("reco_rhs: carrier size mismatch");
    std::vector<double> out(w.size(), 0.0);
    for (const auto& [part, rate] : rates.supported()) {
        std::vector<double> r = recombinator_product_raw(space, w, part);
        for (std::size_t x = 0; x < w.size(); ++x) out[x] += rate * (r[x] - w[x]);
    }
    return out;
}

/// One classical Runge-Kutta step of size dt for an autonomous rhs.
template <class Rhs>
std::vector<double> rk4_step(const Rhs& rhs, const std::vector<double>& y, double dt) {
    std::vector<double> k1 = rhs(y);
    std::vector<double> tmp(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    std::vector<double> k2 = rhs(tmp);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    std::vector<double> k3 = rhs(tmp);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + dt * k3[i];
    std::vector<double> k4 = rhs(tmp);
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

/// Fixed-step RK4 integration of an autonomous system with sampling; returns
/// (time, raw state) pairs at step 0, every sample_every-th step, and the end.
template <class Rhs>
std::vector<std::pair<double, std::vector<double>>> rk4_integrate(const Rhs& rhs,
                                                                  std::vector<double> y,
                                                                  double t_end, double dt,
                                                                  int sample_every = 1) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw ValidityError("rk4_integrate: t_end must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidityError("rk4_integrate: dt must be finite and > 0");
    if (sample_every < 1)
        throw ValidityError("rk4_integrate: sample_every must be >= 1");
    std::vector<std::pair<double, std::vector<double>>> out;
    out.emplace_back(0.0, y);
    long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    for (long i = 0; i < steps; ++i) {
        double t0 = static_cast<double>(i) * dt;
        double h = (i + 1 == steps) ? (t_end - t0) : dt;
        y = rk4_step(rhs, y, h);
        double t1 = (i + 1 == steps) ? t_end : t0 + dt;
        if ((i + 1) % sample_every == 0 || i + 1 == steps) out.emplace_back(t1, y);
    }
    return out;
}

/// Finest partition reachable by composing the rated recombination events:
/// the meet of all positive-rate partitions.  Demands at least one rated
/// partition with more than one block.
inline Partition absorbing_partition(const RecombinationRates& rates) {
    if (!rates.has_proper_support())
        throw DegenerateInputError(
            "absorbing_partition: no rated partition with more than one block");
    const auto& sup = rates.supported();
    Partition acc = sup.front().first;
    for (std::size_t i = 1; i < sup.size(); ++i) acc = meet(acc, sup[i].first);
    return acc;
}

/// Predicted limit of the flow: the absorbing-partition recombinator applied
/// to the initial state.
inline Distribution equilibrium_prediction(const TypeSpace& space, const Distribution& nu0,
                                           const RecombinationRates& rates) {
    Partition sigma = absorbing_partition(rates);
    return recombinator_product(space, nu0, sigma);
}

/// One sampled point of a flow trajectory with its monitor values.
struct TrajectoryPoint {
    double t = 0.0;
    std::vector<double> state;
    double sum_clogc = 0.0;
    double free_energy = 0.0;
    std::vector<double> marginals;  ///< one-site marginals, site-major
    double dist_to_eq = 0.0;        ///< sup distance to the predicted limit
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::vector<double> equilibrium;       ///< predicted limit used by dist_to_eq
    double max_renorm_correction = 0.0;    ///< largest per-step projection error
};

namespace detail {

inline std::vector<double> one_site_marginals(const TypeSpace& space,
                                              const std::vector<double>& w) {
    std::vector<double> out;
    for (int s = 1; s <= space.sites(); ++s) {
        std::vector<double> m = marginal_raw(space, w, {s});
        out.insert(out.end(), m.begin(), m.end());
    }
    return out;
}

} // namespace detail

/// Integrates the recombination flow from nu0 to t_end with fixed-step RK4.
///
/// After every step the state is validated (finite, entries >= -1e-9, mass
/// within 1e-9 of 1), tiny negatives are projected to 0 and the mass rescaled
/// to exactly 1; the largest correction is recorded.  Violations beyond those
/// bounds raise InstabilityError with the offending time.
inline Trajectory integrate(const TypeSpace& space, const Distribution& nu0,
                            const RecombinationRates& rates, double t_end, double dt,
                            int sample_every = 1) {
    if (nu0.size() != space.type_count())
        throw DimensionError("integrate: carrier size mismatch");
    if (std::abs(nu0.mass() - 1.0) > 1e-9)
        throw ValidityError("integrate: initial state must have mass 1");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw ValidityError("integrate: t_end must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidityError("integrate: dt must be finite and > 0");
    if (sample_every < 1)
        throw ValidityError("integrate: sample_every must be >= 1");

    // Predicted limit; a flow without proper recombination is constant, so the
    // initial state doubles as its own limit there.
    std::vector<double> eq = rates.has_proper_support()
                                 ? equilibrium_prediction(space, nu0, rates).weights()
                                 : nu0.weights();

    auto rhs = [&](const std::vector<double>& w) { return reco_rhs(space, w, rates); };

    Trajectory traj;
    traj.equilibrium = eq;
    std::vector<double> y = nu0.weights();

    auto record = [&](double t, const std::vector<double>& w) {
        TrajectoryPoint p;
        p.t = t;
        p.state = w;
        p.sum_clogc = entropy_sum(w);
        p.free_energy = free_energy(w);
        p.marginals = detail::one_site_marginals(space, w);
        double d = 0.0;
        for (std::size_t x = 0; x < w.size(); ++x) d = std::max(d, std::abs(w[x] - eq[x]));
        p.dist_to_eq = d;
        traj.points.push_back(std::move(p));
    };

    record(0.0, y);
    long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    for (long i = 0; i < steps; ++i) {
        double t0 = static_cast<double>(i) * dt;
        double h = (i + 1 == steps) ? (t_end - t0) : dt;
        double t1 = (i + 1 == steps) ? t_end : t0 + dt;
        y = rk4_step(rhs, y, h);

        double correction = 0.0;
        double mass = 0.0;
        for (double v : y) {
            if (!std::isfinite(v))
                throw InstabilityError("integrate: non-finite state at t=" +
                                       std::to_string(t1) + "; reduce dt");
            mass += v;
        }
        for (double& v : y) {
            if (v < 0.0) {
                if (v < -1e-9)
                    throw InstabilityError("integrate: entry " + std::to_string(v) +
                                           " below -1e-9 at t=" + std::to_string(t1) +
                                           "; reduce dt");
                correction = std::max(correction, -v);
                v = 0.0;
            }
        }
        if (std::abs(mass - 1.0) > 1e-9)
            throw InstabilityError("integrate: mass drift " + std::to_string(mass - 1.0) +
                                   " beyond 1e-9 at t=" + std::to_string(t1) + "; reduce dt");
        correction = std::max(correction, std::abs(mass - 1.0));
        double renorm = 0.0;
        for (double v : y) renorm += v;
        for (double& v : y) v /= renorm;
        traj.max_renorm_correction = std::max(traj.max_renorm_correction, correction);

        if ((i + 1) % sample_every == 0 || i + 1 == steps) record(t1, y);
    }
    return traj;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Writes a trajectory as CSV: t, one column per type (header = letter string),
/// sum_clogc, F, one-site marginal columns, dist_to_eq.
inline void write_trajectory_csv(std::ostream& os, const TypeSpace& space,
                                 const Trajectory& traj) {
    os << "t";
    for (std::size_t x = 0; x < space.type_count(); ++x)
        os << ",c_" << space.letters_string(x);
    os << ",sum_clogc,F";
    for (int s = 1; s <= space.sites(); ++s)
        for (int a = 0; a < space.alphabet_size(s); ++a)
            os << ",marg_" << s << "_" << a;
    os << ",dist_to_eq\n";
    for (const auto& p : traj.points) {
        os << detail::format_double(p.t);
        for (double v : p.state) os << ',' << detail::format_double(v);
        os << ',' << detail::format_double(p.sum_clogc);
        os << ',' << detail::format_double(p.free_energy);
        for (double v : p.marginals) os << ',' << detail::format_double(v);
        os << ',' << detail::format_double(p.dist_to_eq) << '\n';
    }
}

} // namespace recoflow
