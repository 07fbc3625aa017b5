// Acceptance gate: every release-blocking property of the library and tool,
// one verdict line each, exit 0 only if all of them hold.
//
// Each check states its tolerance inline; the checks are self-contained and
// seeded, so the gate is deterministic.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "recoflow/recoflow.hpp"

namespace fs = std::filesystem;
using namespace recoflow;

namespace {

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<Verdict> g_verdicts;

void run_check(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    Verdict v;
    v.name = name;
    auto start = std::chrono::steady_clock::now();
    try {
        auto [pass, detail] = fn();
        v.pass = pass;
        v.detail = detail;
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail = std::string("exception: ") + e.what();
    }
    v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    g_verdicts.push_back(v);
    std::printf("[%s] %s  %s  (%.2fs)\n", v.pass ? "PASS" : "FAIL", v.name.c_str(),
                v.detail.c_str(), v.seconds);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

RecombinationRates crossing_rates(double r1, double r2, double r3) {
    RecombinationRates rates(3);
    rates.set(Partition::parse(3, "1|2,3"), r1);
    rates.set(Partition::parse(3, "1,3|2"), r2);
    rates.set(Partition::parse(3, "1,2|3"), r3);
    return rates;
}

// 01: the product-of-marginals recombinator against the tuple-sum form.
std::pair<bool, std::string> check_recombinator_oracle() {
    const double tol = 1e-13, budget = 5.0;
    auto start = std::chrono::steady_clock::now();
    double dev = 0.0;
    for (int n = 1; n <= 3; ++n) {
        TypeSpace space(std::vector<int>(static_cast<std::size_t>(n), 2));
        for (const auto& part : enumerate_partitions(n)) {
            for (int trial = 0; trial < 50; ++trial) {
                Distribution w =
                    random_distribution(space.type_count(),
                                        derive_seed(101, static_cast<std::uint64_t>(
                                                             n * 1000 + trial)));
                auto a = recombinator_product_raw(space, w.weights(), part);
                auto b = recombinator_sum_raw(space, w.weights(), part);
                dev = std::max(dev, sup_diff(a, b));
            }
        }
    }
    double took =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = dev <= tol && took < budget;
    return {pass, "max dev=" + fmt(dev) + " tol=" + fmt(tol) + " within " + fmt(budget) + "s"};
}

// 02: mass action on the gamete network against the flow right-hand side.
std::pair<bool, std::string> check_type_network_equivalence() {
    const double tol = 1e-12, budget = 30.0;
    auto start = std::chrono::steady_clock::now();
    double dev = 0.0;
    for (int n = 2; n <= 3; ++n) {
        TypeSpace space(std::vector<int>(static_cast<std::size_t>(n), 2));
        for (int draw = 0; draw < 5; ++draw) {
            Rng rng(derive_seed(202, static_cast<std::uint64_t>(n * 100 + draw)));
            RecombinationRates rates(n);
            for (const auto& part : enumerate_partitions(n))
                if (rng.unit() < 0.75) rates.set(part, rng.uniform(0.0, 2.0));
            ReactionNetwork net = build_type_network(space, rates);
            pair_reactions(net);
            for (int trial = 0; trial < 20; ++trial) {
                Distribution w = random_distribution(
                    space.type_count(),
                    derive_seed(203, static_cast<std::uint64_t>(n * 1000 + draw * 20 + trial)));
                dev = std::max(dev, sup_diff(mass_action_rhs(net, w.weights()),
                                             reco_rhs(space, w.weights(), rates)));
            }
        }
    }
    double took =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = dev <= tol && took < budget;
    return {pass, "max dev=" + fmt(dev) + " tol=" + fmt(tol) + " within " + fmt(budget) + "s"};
}

// 03: the reversal involution pairs every reaction; complexes swap, rates match.
std::pair<bool, std::string> check_reversibility_pairing() {
    int networks = 0, unpaired_total = 0, pair_defects = 0;
    for (int n = 1; n <= 3; ++n) {
        TypeSpace space(std::vector<int>(static_cast<std::size_t>(n), 2));
        for (int draw = 0; draw < 4; ++draw) {
            Rng rng(derive_seed(303, static_cast<std::uint64_t>(n * 10 + draw)));
            RecombinationRates rates(n);
            for (const auto& part : enumerate_partitions(n))
                if (rng.unit() < 0.8) rates.set(part, rng.uniform(0.05, 2.0));
            ReactionNetwork net = build_type_network(space, rates);
            pair_reactions(net);  // throws on any pairing defect
            const Pairing& pairing = *net.pairing;
            int accounted = 2 * static_cast<int>(pairing.pairs.size()) +
                            static_cast<int>(pairing.fixed_point_voids.size());
            unpaired_total += static_cast<int>(net.reactions.size()) - accounted;
            for (int id : pairing.fixed_point_voids)
                if (!net.reactions[static_cast<std::size_t>(id)].is_void) ++pair_defects;
            for (const auto& [f, b] : pairing.pairs) {
                const Reaction& fwd = net.reactions[static_cast<std::size_t>(f)];
                const Reaction& bwd = net.reactions[static_cast<std::size_t>(b)];
                if (fwd.kappa != bwd.kappa || fwd.substrates != bwd.products ||
                    fwd.products != bwd.substrates)
                    ++pair_defects;
            }
            ++networks;
        }
    }
    bool pass = unpaired_total == 0 && pair_defects == 0;
    return {pass, std::to_string(networks) + " networks, unpaired=" +
                      std::to_string(unpaired_total) + ", defects=" +
                      std::to_string(pair_defects)};
}

// 04: mobility times entropy gradient equals the flow; symmetry and PSD hold.
std::pair<bool, std::string> check_gradient_form() {
    const double tol_rhs = 1e-10, tol_sym = 1e-12, floor_psd = -1e-9;
    double dev = 0.0, asym = 0.0, min_eig = 0.0, min_quad = 0.0;
    bool psd_ok = true;
    for (int n = 2; n <= 3; ++n) {
        TypeSpace space(std::vector<int>(static_cast<std::size_t>(n), 2));
        Rng rng(derive_seed(404, static_cast<std::uint64_t>(n)));
        RecombinationRates rates(n);
        for (const auto& part : enumerate_partitions(n))
            if (part.block_count() > 1) rates.set(part, rng.uniform(0.1, 1.5));
        ReactionNetwork net = build_type_network(space, rates);
        pair_reactions(net);
        for (int trial = 0; trial < 50; ++trial) {
            Distribution c = random_distribution(
                space.type_count(), derive_seed(405, static_cast<std::uint64_t>(n * 100 + trial)));
            Matrix mob = onsager_matrix(net, c.weights());
            asym = std::max(asym, mob.max_asymmetry());
            dev = std::max(dev, sup_diff(mob.apply(grad_free_energy(c.weights())),
                                         reco_rhs(space, c.weights(), rates)));
            PsdReport psd = psd_check(mob, 64,
                                      derive_seed(406, static_cast<std::uint64_t>(trial)),
                                      floor_psd, tol_sym);
            psd_ok = psd_ok && psd.quadratic_forms_ok && psd.eigenvalues_ok;
            min_eig = std::min(min_eig, psd.min_eigenvalue);
            min_quad = std::min(min_quad, psd.min_quadratic_form);
        }
    }
    bool pass = dev <= tol_rhs && asym <= tol_sym && psd_ok;
    return {pass, "rhs dev=" + fmt(dev) + " asym=" + fmt(asym) +
                      " min eig=" + fmt(min_eig) + " min quad=" + fmt(min_quad)};
}

// 05: the displayed two-site matrix bit for bit; the hand-assembled
// three-site matrix drives the flow.
std::pair<bool, std::string> check_locus_fixtures() {
    bool exact = true;
    Rng rho_rng(derive_seed(505, 0));
    TypeSpace space2({2, 2});
    for (int trial = 0; trial < 20; ++trial) {
        double rho = rho_rng.uniform(0.1, 1.0);
        RecombinationRates rates2(2);
        rates2.set(Partition::parse(2, "1|2"), rho);
        ReactionNetwork net2 = build_type_network(space2, rates2);
        pair_reactions(net2);
        Distribution nu = random_distribution(4, derive_seed(506, static_cast<std::uint64_t>(trial)));
        Matrix mob = onsager_matrix(net2, nu.weights());
        const auto& w = nu.weights();
        double l = rho * log_mean(w[0] * w[3], w[1] * w[2]);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                bool iout = i == 0 || i == 3, jout = j == 0 || j == 3;
                if (mob(i, j) != (iout == jout ? l : -l)) exact = false;
            }
    }

    double rhs_dev = 0.0;
    TypeSpace space3({2, 2, 2});
    double r1 = rho_rng.uniform(0.1, 1.0), r2 = rho_rng.uniform(0.1, 1.0),
           r3 = rho_rng.uniform(0.1, 1.0);
    RecombinationRates rates3 = crossing_rates(r1, r2, r3);
    for (int trial = 0; trial < 50; ++trial) {
        Distribution nu = random_distribution(8, derive_seed(507, static_cast<std::uint64_t>(trial)));
        Matrix ref = three_locus_reference(nu.weights(), r1, r2, r3);
        rhs_dev = std::max(rhs_dev, sup_diff(ref.apply(grad_free_energy(nu.weights())),
                                             reco_rhs(space3, nu.weights(), rates3)));
    }
    bool pass = exact && rhs_dev <= 1e-9;
    return {pass, std::string("two-site exact=") + (exact ? "yes" : "NO") +
                      " three-site rhs dev=" + fmt(rhs_dev) + " tol=1e-9"};
}

// 06: entropy-sum descent along trajectories; convergence to the fully
// recombined law when every pair of sites is eventually separated.
std::pair<bool, std::string> check_lyapunov_and_equilibrium() {
    const double tol_mono = 1e-12, tol_eq = 1e-6;
    TypeSpace space({2, 2, 2});
    int violations = 0;
    double worst_eq = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        Rng rng(derive_seed(606, static_cast<std::uint64_t>(trial)));
        double r1 = rng.uniform(0.2, 1.0), r2 = rng.uniform(0.2, 1.0),
               r3 = rng.uniform(0.2, 1.0);
        double total = r1 + r2 + r3;
        if (total < 1.0) {
            double s = 1.2 / total;
            r1 *= s;
            r2 *= s;
            r3 *= s;
        }
        RecombinationRates rates = crossing_rates(r1, r2, r3);
        Distribution nu0 = random_distribution(8, derive_seed(607, static_cast<std::uint64_t>(trial)));
        Trajectory traj = integrate(space, nu0, rates, 40.0, 0.01, 50);
        for (std::size_t i = 1; i < traj.points.size(); ++i)
            if (traj.points[i].sum_clogc > traj.points[i - 1].sum_clogc + tol_mono)
                ++violations;
        std::vector<double> limit =
            recombinator_product_raw(space, nu0.weights(), Partition::singletons(3));
        worst_eq = std::max(worst_eq, sup_diff(traj.points.back().state, limit));
    }
    bool pass = violations == 0 && worst_eq <= tol_eq;
    return {pass, "monotonicity violations=" + std::to_string(violations) +
                      " final dist=" + fmt(worst_eq) + " tol=" + fmt(tol_eq)};
}

// 07: the coefficient mixture reconstructs the flow at fixed horizons.
std::pair<bool, std::string> check_coefficient_ansatz() {
    const double tol = 1e-7;
    TypeSpace space({2, 2, 2});
    PartitionTable table(3);
    RecombinationRates rates = crossing_rates(0.8, 0.55, 0.35);
    Distribution omega0 = random_distribution(8, derive_seed(707, 0));

    std::vector<std::vector<double>> recombined(static_cast<std::size_t>(table.size()));
    for (int a = 0; a < table.size(); ++a)
        recombined[static_cast<std::size_t>(a)] =
            recombinator_product_raw(space, omega0.weights(), table[a]);

    auto flow = [&](const std::vector<double>& w) { return reco_rhs(space, w, rates); };
    auto coeff = [&](const std::vector<double>& a) {
        return nonlinear_coeff_rhs(table, a, rates);
    };
    std::vector<double> a0(static_cast<std::size_t>(table.size()), 0.0);
    a0[0] = 1.0;

    double dev = 0.0;
    for (double t : {0.5, 1.0, 5.0}) {
        std::vector<double> direct = rk4_integrate(flow, omega0.weights(), t, 1e-3).back().second;
        std::vector<double> a_t = rk4_integrate(coeff, a0, t, 1e-3).back().second;
        std::vector<double> mix(space.type_count(), 0.0);
        for (std::size_t a = 0; a < a_t.size(); ++a)
            for (std::size_t x = 0; x < mix.size(); ++x) mix[x] += a_t[a] * recombined[a][x];
        dev = std::max(dev, sup_diff(mix, direct));
    }
    return {dev <= tol, "max dev=" + fmt(dev) + " tol=" + fmt(tol) + " at t=0.5,1,5"};
}

// 08: partition-level mass action equals the coefficient dynamics; the
// grouped-product identity holds; block counts never drop.
std::pair<bool, std::string> check_partition_network() {
    const double tol = 1e-12;
    PartitionTable table(3);
    Rng rng(derive_seed(808, 0));
    RecombinationRates rates(3);
    for (const auto& part : enumerate_partitions(3))
        if (rng.unit() < 0.8) rates.set(part, rng.uniform(0.05, 1.5));
    ReactionNetwork pnet = build_partition_network(table, rates);

    double rhs_dev = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Distribution a = random_distribution(static_cast<std::size_t>(table.size()),
                                             derive_seed(809, static_cast<std::uint64_t>(trial)));
        rhs_dev = std::max(rhs_dev, sup_diff(mass_action_rhs(pnet, a.weights()),
                                             nonlinear_coeff_rhs(table, a.weights(), rates)));
    }

    double ugly_dev = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Distribution vec = random_distribution(static_cast<std::size_t>(table.size()),
                                               derive_seed(810, static_cast<std::uint64_t>(trial)));
        for (int a = 0; a < table.size(); ++a)
            for (int b = 0; b < table.size(); ++b)
                if (is_finer(table[a], table[b])) {
                    auto [lhs, rhs] = uglyproduct_check(table, table[a], table[b], vec.weights());
                    ugly_dev = std::max(ugly_dev, std::abs(lhs - rhs));
                }
    }

    bool non_decreasing = true, strict_exists = false;
    for (const auto& r : pnet.reactions) {
        int before = 0, after = 0;
        for (int id : r.substrates) before += table[id].block_count();
        for (int id : r.products) after += table[id].block_count();
        if (after < before) non_decreasing = false;
        if (!r.is_void && after > before) strict_exists = true;
    }

    bool pass = rhs_dev <= tol && ugly_dev <= tol && non_decreasing && strict_exists;
    return {pass, "rhs dev=" + fmt(rhs_dev) + " identity dev=" + fmt(ugly_dev) +
                      " blocks non-decreasing=" + (non_decreasing ? "yes" : "NO") +
                      " strict increase=" + (strict_exists ? "yes" : "NO")};
}

// 09: the three-site splitting generator equals the hand fixture as a linear
// form in the rates (exact at basis and dyadic rate vectors).
std::pair<bool, std::string> check_generator_fixture() {
    PartitionTable table(3);
    constexpr int toEnum[5] = {0, 3, 2, 1, 4};
    auto fixture = [](double r1, double r2, double r3) {
        Matrix q(5, 5);
        q(0, 0) = -(r1 + r2 + r3);
        q(0, 1) = r1;
        q(0, 2) = r2;
        q(0, 3) = r3;
        q(1, 1) = -(r2 + r3);
        q(1, 4) = r2 + r3;
        q(2, 2) = -(r1 + r3);
        q(2, 4) = r1 + r3;
        q(3, 3) = -(r1 + r2);
        q(3, 4) = r1 + r2;
        return q;
    };
    int mismatches = 0, checked = 0;
    auto compare = [&](double r1, double r2, double r3) {
        Matrix expected = fixture(r1, r2, r3);
        Matrix q = build_generator(table, crossing_rates(r1, r2, r3));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                if (q(static_cast<std::size_t>(toEnum[i]), static_cast<std::size_t>(toEnum[j])) !=
                    expected(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))
                    ++mismatches;
                ++checked;
            }
    };
    compare(1, 0, 0);
    compare(0, 1, 0);
    compare(0, 0, 1);
    Rng rng(derive_seed(909, 0));
    for (int trial = 0; trial < 10; ++trial)
        compare(static_cast<double>(rng.below(16)) / 16.0,
                static_cast<double>(rng.below(16)) / 16.0,
                static_cast<double>(rng.below(16)) / 16.0);
    return {mismatches == 0, std::to_string(checked) + " entries over 13 rate vectors, " +
                                 std::to_string(mismatches) + " mismatches (exact)"};
}

// 10: the monotone-chain split reproduces the master flow; the four-state
// example is defective exactly as computed by integer ranks.
std::pair<bool, std::string> check_mcsmo() {
    const double tol = 1e-12;
    double dev = 0.0;
    FourStateExample ex = four_state_example();
    Rng rng(derive_seed(1010, 0));
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> p(4);
        for (double& v : p) v = rng.unit();
        dev = std::max(dev, sup_diff(mcsmo_matrix(ex.q, ex.w, p).apply(ex.w),
                                     master_rhs(ex.q, p)));
    }
    for (int n = 3; n <= 4; ++n) {
        PartitionTable table(n);
        RecombinationRates rates(n);
        for (const auto& part : enumerate_partitions(n))
            if (part.block_count() > 1 && rng.unit() < 0.85)
                rates.set(part, rng.uniform(0.05, 1.5));
        Matrix q = build_generator(table, rates);
        std::vector<double> w(static_cast<std::size_t>(table.size()));
        for (int i = 0; i < table.size(); ++i)
            w[static_cast<std::size_t>(i)] = table[i].block_count();
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> p(w.size());
            for (double& v : p) v = rng.unit();
            dev = std::max(dev, sup_diff(mcsmo_matrix(q, w, p).apply(w), master_rhs(q, p)));
        }
    }
    std::vector<std::vector<long long>> m = {
        {0, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {0, 2, 2, 2}};
    int geometric = 4 - integer_matrix_rank(m);
    auto m2 = integer_matrix_product(m, m);
    int algebraic = 4 - integer_matrix_rank(integer_matrix_product(m2, m2));
    bool pass = dev <= tol && geometric == 2 && algebraic == 3;
    return {pass, "identity dev=" + fmt(dev) + " tol=" + fmt(tol) + " multiplicities geo=" +
                      std::to_string(geometric) + " alg=" + std::to_string(algebraic)};
}

// 11: ten thousand sampled splitting paths reproduce the flow within four
// standard errors; the master mixture matches the direct flow.
std::pair<bool, std::string> check_duality() {
    const double budget = 60.0;
    auto start = std::chrono::steady_clock::now();
    TypeSpace space({2, 2, 2});
    PartitionTable table(3);
    RecombinationRates rates = crossing_rates(0.8, 0.55, 0.35);
    Matrix q = build_generator(table, rates);
    Distribution omega0 = random_distribution(8, derive_seed(1111, 0));

    const double t = 1.0;
    auto flow = [&](const std::vector<double>& w) { return reco_rhs(space, w, rates); };
    std::vector<double> direct = rk4_integrate(flow, omega0.weights(), t, 1e-3).back().second;

    std::vector<double> b0(static_cast<std::size_t>(table.size()), 0.0);
    b0[0] = 1.0;
    auto master = [&](const std::vector<double>& b) { return master_rhs(q, b); };
    std::vector<double> b_t = rk4_integrate(master, b0, t, 1e-3).back().second;
    std::vector<double> mix(space.type_count(), 0.0);
    for (int a = 0; a < table.size(); ++a) {
        std::vector<double> r = recombinator_product_raw(space, omega0.weights(), table[a]);
        for (std::size_t x = 0; x < mix.size(); ++x)
            mix[x] += b_t[static_cast<std::size_t>(a)] * r[x];
    }
    double master_vs_direct = sup_diff(mix, direct);

    auto paths = simulate_paths(q, 0, t, 10000, 4096, 4);
    DualEstimate est = mc_dual_statistics(space, table, paths, omega0, t);
    double sigma_scaled = 0.0;
    for (std::size_t x = 0; x < est.mean.size(); ++x)
        sigma_scaled = std::max(sigma_scaled, std::abs(est.mean[x] - direct[x]) /
                                                  std::max(est.std_error[x], 1e-12));
    double took =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = sigma_scaled <= 4.0 && master_vs_direct <= 1e-7 && took < budget;
    return {pass, "mc dev=" + fmt(sigma_scaled) + " sigma (bound 4), master vs direct=" +
                      fmt(master_vs_direct) + " tol=1e-7, within " + fmt(budget) + "s"};
}

// 12: identical config and seed give byte-identical CLI outputs.
std::pair<bool, std::string> check_cli_determinism() {
    fs::path root = fs::temp_directory_path() / "recoflow_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    fs::path cfg = root / "config.json";
    std::ofstream(cfg) << R"({
      "n": 3,
      "rates": {"1|2,3": 0.8, "1,3|2": 0.55, "1,2|3": 0.35},
      "initial_distribution": "random:2024",
      "t_end": 1.0,
      "dt": 0.001,
      "sample_every": 100,
      "seed": 7,
      "n_paths": 500
    })";

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    int compared = 0, differing = 0, failures = 0;
    for (const std::string cmd :
         {"integrate", "crn-check", "gradient-check", "partition-sim"}) {
        fs::path a = root / (cmd + "_a"), b = root / (cmd + "_b");
        for (const fs::path& out : {a, b}) {
            std::string line = std::string(RECOFLOW_CLI_PATH) + " " + cmd + " --config " +
                               cfg.string() + " --out " + out.string() + " >/dev/null 2>&1";
            int status = std::system(line.c_str());
            if (status == -1 || WEXITSTATUS(status) != 0) ++failures;
        }
        for (const auto& entry : fs::directory_iterator(a)) {
            fs::path twin = b / entry.path().filename();
            if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) ++differing;
            ++compared;
        }
    }
    bool pass = failures == 0 && differing == 0 && compared >= 8;
    return {pass, std::to_string(compared) + " files compared, " + std::to_string(differing) +
                      " differ, " + std::to_string(failures) + " command failures"};
}

}  // namespace

int main() {
    std::printf("recoflow acceptance gate (%s)\n", kVersion);
    run_check("01 recombinator tuple-sum oracle        ", check_recombinator_oracle);
    run_check("02 gamete network mass action == flow   ", check_type_network_equivalence);
    run_check("03 reversal pairing is total            ", check_reversibility_pairing);
    run_check("04 mobility * grad F == flow, sym, psd  ", check_gradient_form);
    run_check("05 two/three-site fixtures              ", check_locus_fixtures);
    run_check("06 entropy descent and equilibrium      ", check_lyapunov_and_equilibrium);
    run_check("07 coefficient mixture reconstruction   ", check_coefficient_ansatz);
    run_check("08 partition network and identity       ", check_partition_network);
    run_check("09 splitting generator fixture          ", check_generator_fixture);
    run_check("10 monotone-chain split and multiplicity", check_mcsmo);
    run_check("11 path-sampling duality                ", check_duality);
    run_check("12 CLI byte-identical reruns            ", check_cli_determinism);

    int passed = 0;
    for (const auto& v : g_verdicts) passed += v.pass ? 1 : 0;
    std::printf("%d/%d checks passed\n", passed, static_cast<int>(g_verdicts.size()));
    return passed == static_cast<int>(g_verdicts.size()) ? 0 : 1;
}
