#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "recoflow/dynamics.hpp"
#include "recoflow/rng.hpp"

using namespace recoflow;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

RecombinationRates three_site_rates(double r1, double r2, double r3) {
    RecombinationRates rates(3);
    rates.set(Partition::parse(3, "1|2,3"), r1);
    rates.set(Partition::parse(3, "1,3|2"), r2);
    rates.set(Partition::parse(3, "1,2|3"), r3);
    return rates;
}

} // namespace

TEST_CASE("rate functions store nonnegative rates keyed by partition") {
    RecombinationRates rates(3);
    REQUIRE(rates.total() == 0.0);
    REQUIRE(rates.empty());
    REQUIRE_FALSE(rates.has_proper_support());
    rates.set(Partition::parse(3, "1|2,3"), 0.5);
    rates.set(Partition::whole(3), 0.25);
    REQUIRE(rates.rate(Partition::parse(3, "1|2,3")) == 0.5);
    REQUIRE(rates.rate(Partition::singletons(3)) == 0.0);
    REQUIRE(rates.total() == 0.75);
    REQUIRE(rates.has_proper_support());
    // supported() iterates in enumeration order: whole partition first
    REQUIRE(rates.supported().front().first == Partition::whole(3));
    rates.set(Partition::parse(3, "1|2,3"), 0.0);  // unset
    REQUIRE(rates.rate(Partition::parse(3, "1|2,3")) == 0.0);
    REQUIRE_FALSE(rates.has_proper_support());
    REQUIRE_THROWS_AS(rates.set(Partition::whole(3), -1.0), ValidityError);
    REQUIRE_THROWS_AS(rates.set(Partition::whole(4), 1.0), DimensionError);
    REQUIRE_THROWS_AS(rates.rate(Partition::whole(4)), DimensionError);
}

TEST_CASE("flow right-hand side vanishes where it must") {
    TypeSpace space({2, 2, 2});
    Distribution nu = random_distribution(8, 11);

    // no rates: zero field
    RecombinationRates none(3);
    auto rhs0 = reco_rhs(space, nu.weights(), none);
    for (double v : rhs0) REQUIRE(v == 0.0);

    // rate only on the one-block partition: recombination does nothing
    RecombinationRates top(3);
    top.set(Partition::whole(3), 2.0);
    auto rhs1 = reco_rhs(space, nu.weights(), top);
    for (double v : rhs1) REQUIRE(std::abs(v) <= 1e-15);

    // a full product measure is stationary for every rate function
    auto prod = recombinator_product(space, nu, Partition::singletons(3));
    auto rhs2 = reco_rhs(space, prod.weights(), three_site_rates(0.7, 0.4, 1.1));
    for (double v : rhs2) REQUIRE(std::abs(v) <= 1e-14);

    // mass is always conserved: entries sum to zero
    auto rhs3 = reco_rhs(space, nu.weights(), three_site_rates(0.7, 0.4, 1.1));
    double total = 0.0;
    for (double v : rhs3) total += v;
    REQUIRE(std::abs(total) <= 1e-15);
}

TEST_CASE("integration is fourth-order accurate in the step size") {
    TypeSpace space({2, 2, 2});
    Distribution nu = random_distribution(8, 21);
    auto rates = three_site_rates(0.9, 0.6, 1.3);
    auto final_state = [&](double dt) {
        return integrate(space, nu, rates, 1.0, dt, 1 << 20).points.back().state;
    };
    auto y1 = final_state(0.05);
    auto y2 = final_state(0.025);
    auto y3 = final_state(0.0125);
    double e1 = max_abs_diff(y1, y2);
    double e2 = max_abs_diff(y2, y3);
    REQUIRE(e1 > 0.0);
    REQUIRE(e2 > 0.0);
    double order = std::log2(e1 / e2);
    REQUIRE(order >= 3.5);
}

TEST_CASE("zero-rate flows are constant") {
    TypeSpace space({2, 2});
    Distribution nu = random_distribution(4, 31);
    RecombinationRates none(2);
    auto traj = integrate(space, nu, none, 2.0, 0.1, 5);
    for (const auto& p : traj.points) {
        // constant up to the per-step mass renormalization (one ulp-level rescale)
        REQUIRE(max_abs_diff(p.state, nu.weights()) <= 1e-14);
        REQUIRE(p.dist_to_eq <= 1e-14);  // constant flow doubles as its own limit
    }
    REQUIRE(traj.max_renorm_correction <= 1e-15);
}

TEST_CASE("trajectories conserve mass and one-site marginals") {
    TypeSpace space({2, 2, 2});
    Distribution nu = random_distribution(8, 41);
    auto traj = integrate(space, nu, three_site_rates(1.2, 0.8, 0.5), 5.0, 0.01, 50);
    const auto& first = traj.points.front();
    for (const auto& p : traj.points) {
        double mass = 0.0;
        for (double v : p.state) mass += v;
        REQUIRE(std::abs(mass - 1.0) <= 1e-12);
        REQUIRE(max_abs_diff(p.marginals, first.marginals) <= 1e-10);
    }
    REQUIRE(traj.max_renorm_correction <= 1e-9);
}

TEST_CASE("entropy monitors are monotone along the flow") {
    TypeSpace space({2, 2, 2});
    Distribution nu = random_distribution(8, 51);
    auto traj = integrate(space, nu, three_site_rates(0.4, 1.0, 0.7), 8.0, 0.01, 10);
    for (std::size_t i = 1; i < traj.points.size(); ++i) {
        // sum c log c decays; the flow ascends F = -(sum c log c - mass)
        REQUIRE(traj.points[i].sum_clogc <= traj.points[i - 1].sum_clogc + 1e-12);
        REQUIRE(traj.points[i].free_energy >= traj.points[i - 1].free_energy - 1e-12);
    }
    // dist_to_eq shrinks over the run
    REQUIRE(traj.points.back().dist_to_eq < traj.points.front().dist_to_eq);
}

TEST_CASE("absorbing partition is the meet of the rated partitions") {
    auto rates = three_site_rates(1.0, 0.0, 1.0);
    REQUIRE(absorbing_partition(rates) == Partition::singletons(3));

    RecombinationRates one(3);
    one.set(Partition::parse(3, "1,2|3"), 0.7);
    REQUIRE(absorbing_partition(one) == Partition::parse(3, "1,2|3"));

    RecombinationRates with_top(3);
    with_top.set(Partition::whole(3), 5.0);
    with_top.set(Partition::parse(3, "1|2,3"), 0.1);
    REQUIRE(absorbing_partition(with_top) == Partition::parse(3, "1|2,3"));

    RecombinationRates none(3);
    REQUIRE_THROWS_AS(absorbing_partition(none), DegenerateInputError);
    RecombinationRates top_only(3);
    top_only.set(Partition::whole(3), 1.0);
    REQUIRE_THROWS_AS(absorbing_partition(top_only), DegenerateInputError);
}

TEST_CASE("equilibrium prediction recombines the initial state") {
    TypeSpace space({2, 2});
    Distribution nu = Distribution::strict({0.5, 0.0, 0.0, 0.5});
    RecombinationRates rates(2);
    rates.set(Partition::singletons(2), 1.5);
    auto eq = equilibrium_prediction(space, nu, rates);
    REQUIRE(eq.weights() == std::vector<double>{0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("trajectories approach the predicted equilibrium") {
    TypeSpace space({2, 2, 2});
    Rng rng(61);
    for (int trial = 0; trial < 3; ++trial) {
        double r1 = rng.uniform(0.3, 1.3), r2 = rng.uniform(0.3, 1.3),
               r3 = rng.uniform(0.3, 1.3);
        auto rates = three_site_rates(r1, r2, r3);
        Distribution nu = random_distribution(8, 6100 + static_cast<std::uint64_t>(trial));
        double dt = 0.01 / std::max(1.0, rates.total());
        auto traj = integrate(space, nu, rates, 40.0, dt, 1 << 20);
        REQUIRE(traj.points.back().dist_to_eq <= 1e-6);
    }
}

TEST_CASE("oversized steps raise an instability error") {
    TypeSpace space({2, 2});
    Distribution nu = Distribution::strict({0.94, 0.03, 0.02, 0.01});
    RecombinationRates rates(2);
    rates.set(Partition::singletons(2), 2.0);
    REQUIRE_THROWS_AS(integrate(space, nu, rates, 50.0, 10.0, 1), InstabilityError);
}

TEST_CASE("integration validates its arguments") {
    TypeSpace space({2, 2});
    Distribution nu = random_distribution(4, 71);
    RecombinationRates rates(2);
    rates.set(Partition::singletons(2), 1.0);
    REQUIRE_THROWS_AS(integrate(space, nu, rates, -1.0, 0.1, 1), ValidityError);
    REQUIRE_THROWS_AS(integrate(space, nu, rates, 1.0, 0.0, 1), ValidityError);
    REQUIRE_THROWS_AS(integrate(space, nu, rates, 1.0, 0.1, 0), ValidityError);
    Distribution off = Distribution::relaxed({0.5, 0.2, 0.1, 0.1});
    REQUIRE_THROWS_AS(integrate(space, off, rates, 1.0, 0.1, 1), ValidityError);
}

TEST_CASE("trajectory csv lists every monitor column") {
    TypeSpace space({2, 2});
    Distribution nu = random_distribution(4, 81);
    RecombinationRates rates(2);
    rates.set(Partition::singletons(2), 1.0);
    auto traj = integrate(space, nu, rates, 0.2, 0.1, 1);
    std::ostringstream os;
    write_trajectory_csv(os, space, traj);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    REQUIRE(header ==
            "t,c_00,c_01,c_10,c_11,sum_clogc,F,marg_1_0,marg_1_1,marg_2_0,marg_2_1,dist_to_eq");
    int rows = 0;
    std::string line;
    while (std::getline(is, line)) {
        REQUIRE(std::count(line.begin(), line.end(), ',') == 11);
        ++rows;
    }
    REQUIRE(rows == static_cast<int>(traj.points.size()));
}

TEST_CASE("generic integrator exposes raw sampled states") {
    // linear decay: dy = -y, solution e^{-t}
    auto rhs = [](const std::vector<double>& y) {
        std::vector<double> out(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) out[i] = -y[i];
        return out;
    };
    auto samples = rk4_integrate(rhs, {1.0}, 2.0, 0.01, 100);
    REQUIRE(samples.front().first == 0.0);
    REQUIRE(samples.back().first == 2.0);
    REQUIRE(samples.size() == 3);
    REQUIRE(std::abs(samples.back().second[0] - std::exp(-2.0)) <= 1e-10);
    // partial last step lands exactly on t_end
    auto uneven = rk4_integrate(rhs, {1.0}, 0.255, 0.01, 1);
    REQUIRE(uneven.back().first == 0.255);
    REQUIRE(std::abs(uneven.back().second[0] - std::exp(-0.255)) <= 1e-10);
}
