// recoflow: command-line surface over the recombination-flow library.
//
// Subcommands: integrate, crn-check, gradient-check, partition-sim.
// Exit codes: 0 success, 2 mathematical-invariant failure, 64 config error,
// 65 resource bound.  Outputs are plain CSV / JSON / JSON-lines; rerunning a
// command with the same config and seed reproduces every file byte for byte.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recoflow/recoflow.hpp"

namespace {

using nlohmann::json;
using namespace recoflow;

/// Raised for anything wrong with the configuration; maps to exit 64.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    int n = 0;
    std::vector<int> sizes;
    std::vector<std::pair<Partition, double>> rate_entries;
    std::string initial_spec = "uniform";
    std::vector<double> initial_array;
    bool initial_is_array = false;
    double t_end = 2.0;
    double dt = 1e-3;
    int sample_every = 10;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    int n_paths = 1000;
    std::string start_partition;  // empty = the one-block partition
    int n_trials = 100;
};

/// Gate values; defaults are pinned here and documented in --help.
struct Tolerances {
    double crn = 1e-10;          // crn-check deviation gate
    double gradient = 1e-10;     // gradient-check RHS gate
    double symmetry = 1e-12;     // matrix asymmetry gate
    double psd = 1e-9;           // eigenvalue floor (>= -psd)
    double fixture = 1e-9;       // three-locus reference RHS gate
    double mcsmo = 1e-12;        // K(p) grad W = Q^T p gate
    double lyapunov = 1e-12;     // per-step monotonicity slack
    double marginal = 1e-10;     // one-site marginal drift gate
    double consistency = 1e-7;   // pairwise reconstruction gate
    double sigma_mult = 4.0;     // Monte-Carlo deviation multiplier
};

constexpr const char* kTolTable =
    "Default tolerance gates:\n"
    "  --tol-crn          1e-10  crn-check: max dynamics/identity deviation\n"
    "  --tol-gradient     1e-10  gradient-check: |C(c) grad F(c) - rhs(c)|\n"
    "  --tol-symmetry     1e-12  gradient-check: matrix asymmetry\n"
    "  --tol-psd          1e-9   gradient-check: eigenvalue floor (>= -tol)\n"
    "  --tol-fixture      1e-9   gradient-check: three-locus reference rhs\n"
    "  --tol-mcsmo        1e-12  gradient-check: K(p) grad W = Q^T p\n"
    "  --tol-lyapunov     1e-12  integrate: per-step monotonicity slack\n"
    "  --tol-marginal     1e-10  integrate: one-site marginal drift\n"
    "  --tol-consistency  1e-7   partition-sim: reconstruction agreement\n"
    "  --sigma-mult       4      partition-sim: Monte-Carlo sigma multiplier\n";

// --------------------------------------------------------------------------
// config loading

int get_int(const json& j, const char* field, int fallback, int lo, int hi,
            bool required = false) {
    auto it = j.find(field);
    if (it == j.end()) {
        if (required) throw ConfigError(std::string(field) + ": required field is missing");
        return fallback;
    }
    if (!it->is_number_integer())
        throw ConfigError(std::string(field) + ": expected an integer");
    long long v = it->get<long long>();
    if (v < lo || v > hi)
        throw ConfigError(std::string(field) + ": value " + std::to_string(v) +
                          " outside " + std::to_string(lo) + ".." + std::to_string(hi));
    return static_cast<int>(v);
}

double get_positive(const json& j, const char* field, double fallback) {
    auto it = j.find(field);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ConfigError(std::string(field) + ": expected a number");
    double v = it->get<double>();
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string(field) + ": must be finite and > 0");
    return v;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

    static const std::vector<std::string> known = {
        "n",      "alphabet_sizes", "rates",      "initial_distribution",
        "t_end",  "dt",             "sample_every", "seed",
        "output_dir", "n_paths",    "start_partition", "n_trials"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(key + ": unknown field");

    RunConfig cfg;
    cfg.n = get_int(j, "n", 0, 1, kMaxEnumSites, true);

    if (auto it = j.find("alphabet_sizes"); it != j.end()) {
        if (!it->is_array() || static_cast<int>(it->size()) != cfg.n)
            throw ConfigError("alphabet_sizes: expected an array of length n");
        for (const auto& v : *it) {
            if (!v.is_number_integer() || v.get<long long>() < 2 || v.get<long long>() > 64)
                throw ConfigError("alphabet_sizes: entries must be integers in 2..64");
            cfg.sizes.push_back(v.get<int>());
        }
    } else {
        cfg.sizes.assign(static_cast<std::size_t>(cfg.n), 2);
    }

    if (auto it = j.find("rates"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("rates: expected an object");
        for (const auto& [key, value] : it->items()) {
            if (!value.is_number())
                throw ConfigError("rates: key '" + key + "': expected a number");
            double rate = value.get<double>();
            if (!(rate >= 0.0) || !std::isfinite(rate))
                throw ConfigError("rates: key '" + key + "': must be finite and >= 0");
            try {
                cfg.rate_entries.emplace_back(Partition::parse(cfg.n, key), rate);
            } catch (const Error& e) {
                throw ConfigError("rates: key '" + key + "': " + e.what());
            }
        }
    }

    if (auto it = j.find("initial_distribution"); it != j.end()) {
        if (it->is_array()) {
            cfg.initial_is_array = true;
            for (const auto& v : *it) {
                if (!v.is_number())
                    throw ConfigError("initial_distribution: array entries must be numbers");
                cfg.initial_array.push_back(v.get<double>());
            }
        } else if (it->is_string()) {
            cfg.initial_spec = it->get<std::string>();
        } else {
            throw ConfigError("initial_distribution: expected an array or a string");
        }
    }

    cfg.t_end = get_positive(j, "t_end", cfg.t_end);
    cfg.dt = get_positive(j, "dt", cfg.dt);
    cfg.sample_every = get_int(j, "sample_every", cfg.sample_every, 1, 1 << 20);
    if (auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() &&
                                         it->get<long long>() < 0))
            throw ConfigError("seed: expected a nonnegative integer");
        cfg.seed = it->get<std::uint64_t>();
    }
    if (auto it = j.find("output_dir"); it != j.end()) {
        if (!it->is_string()) throw ConfigError("output_dir: expected a string");
        cfg.output_dir = it->get<std::string>();
    }
    cfg.n_paths = get_int(j, "n_paths", cfg.n_paths, 1, 100000000);
    if (auto it = j.find("start_partition"); it != j.end()) {
        if (!it->is_string()) throw ConfigError("start_partition: expected a string");
        cfg.start_partition = it->get<std::string>();
        try {
            Partition::parse(cfg.n, cfg.start_partition);
        } catch (const Error& e) {
            throw ConfigError("start_partition: " + std::string(e.what()));
        }
    }
    cfg.n_trials = get_int(j, "n_trials", cfg.n_trials, 1, 100000);
    return cfg;
}

// --------------------------------------------------------------------------
// model resolution (config-phase failures map to exit 64, resource to 65)

struct Model {
    TypeSpace space;
    RecombinationRates rates;
    Distribution omega0;
};

std::vector<int> parse_letters(const TypeSpace& space, const std::string& text) {
    std::vector<int> letters;
    bool dotted = text.find('.') != std::string::npos;
    if (dotted) {
        std::stringstream ss(text);
        std::string piece;
        while (std::getline(ss, piece, '.')) {
            if (piece.empty() || piece.find_first_not_of("0123456789") != std::string::npos)
                throw ConfigError("initial_distribution: bad letter '" + piece + "'");
            letters.push_back(std::stoi(piece));
        }
    } else {
        for (char ch : text) {
            if (ch < '0' || ch > '9')
                throw ConfigError(std::string("initial_distribution: bad letter '") + ch + "'");
            letters.push_back(ch - '0');
        }
    }
    if (static_cast<int>(letters.size()) != space.sites())
        throw ConfigError("initial_distribution: dirac type needs one letter per site");
    return letters;
}

Distribution resolve_initial(const RunConfig& cfg, const TypeSpace& space) {
    if (cfg.initial_is_array) {
        if (cfg.initial_array.size() != space.type_count())
            throw ConfigError("initial_distribution: expected " +
                              std::to_string(space.type_count()) + " entries");
        return Distribution::strict(cfg.initial_array, 1e-9);
    }
    const std::string& spec = cfg.initial_spec;
    if (spec == "uniform") {
        std::vector<double> w(space.type_count(),
                              1.0 / static_cast<double>(space.type_count()));
        return Distribution::relaxed(w);
    }
    if (spec.rfind("dirac:", 0) == 0) {
        std::vector<int> letters = parse_letters(space, spec.substr(6));
        std::vector<double> w(space.type_count(), 0.0);
        w[space.encode(letters)] = 1.0;
        return Distribution::relaxed(w);
    }
    if (spec.rfind("random:", 0) == 0) {
        const std::string tail = spec.substr(7);
        if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos)
            throw ConfigError("initial_distribution: bad random seed '" + tail + "'");
        return random_distribution(space.type_count(), std::stoull(tail));
    }
    throw ConfigError("initial_distribution: unknown specification '" + spec + "'");
}

Model resolve_model(const RunConfig& cfg) {
    try {
        TypeSpace space(cfg.sizes);
        RecombinationRates rates(cfg.n);
        for (const auto& [part, rate] : cfg.rate_entries) rates.set(part, rate);
        Distribution omega0 = resolve_initial(cfg, space);
        return {std::move(space), std::move(rates), std::move(omega0)};
    } catch (const ConfigError&) {
        throw;
    } catch (const ResourceError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

// --------------------------------------------------------------------------
// output plumbing

std::string file_preamble(const RunConfig& cfg) {
    return std::string("# recoflow ") + kVersion + " seed=" + std::to_string(cfg.seed) + "\n";
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw ResourceError("output_dir: cannot create '" + cfg.output_dir + "'");
    fs::path full = fs::path(cfg.output_dir) / name;
    std::ofstream out(full, std::ios::binary);
    if (!out) throw ResourceError("output_dir: cannot write '" + full.string() + "'");
    return out;
}

json base_meta(const RunConfig& cfg) {
    json j;
    j["version"] = kVersion;
    j["seed"] = cfg.seed;
    j["n"] = cfg.n;
    j["alphabet_sizes"] = cfg.sizes;
    return j;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

void dump_matrix_csv(std::ostream& os, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t r = 0; r < m.cols(); ++r)
            os << (r ? "," : "") << detail::format_double(m(i, r));
        os << '\n';
    }
}

int report_verdict(const std::string& cmd, bool pass) {
    std::cout << cmd << ": " << (pass ? "pass" : "FAIL (invariant violated)") << '\n';
    return pass ? 0 : 2;
}

// --------------------------------------------------------------------------
// integrate

int cmd_integrate(const RunConfig& cfg, const Tolerances& tol) {
    Model m = resolve_model(cfg);
    Trajectory traj = integrate(m.space, m.omega0, m.rates, cfg.t_end, cfg.dt,
                                cfg.sample_every);

    bool clogc_nonincreasing = true, f_nondecreasing = true;
    double max_drift = 0.0;
    const auto& first = traj.points.front();
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        const auto& p = traj.points[i];
        if (i > 0) {
            if (p.sum_clogc > traj.points[i - 1].sum_clogc + tol.lyapunov)
                clogc_nonincreasing = false;
            if (p.free_energy < traj.points[i - 1].free_energy - tol.lyapunov)
                f_nondecreasing = false;
        }
        for (std::size_t k = 0; k < p.marginals.size(); ++k)
            max_drift = std::max(max_drift, std::abs(p.marginals[k] - first.marginals[k]));
    }
    bool lyapunov_monotone = clogc_nonincreasing && f_nondecreasing;
    bool marginals_ok = max_drift <= tol.marginal;
    bool pass = lyapunov_monotone && marginals_ok;

    {
        auto out = open_output(cfg, "trajectory.csv");
        out << file_preamble(cfg);
        write_trajectory_csv(out, m.space, traj);
    }
    json summary = base_meta(cfg);
    summary["t_end"] = cfg.t_end;
    summary["dt"] = cfg.dt;
    summary["sample_every"] = cfg.sample_every;
    summary["final_t"] = traj.points.back().t;
    summary["final_state"] = traj.points.back().state;
    summary["predicted_equilibrium"] = traj.equilibrium;
    summary["final_dist_to_eq"] = traj.points.back().dist_to_eq;
    summary["max_marginal_drift"] = max_drift;
    summary["max_renorm_correction"] = traj.max_renorm_correction;
    summary["sum_clogc_nonincreasing"] = clogc_nonincreasing;
    summary["free_energy_nondecreasing"] = f_nondecreasing;
    summary["lyapunov_monotone"] = lyapunov_monotone;
    summary["marginals_conserved"] = marginals_ok;
    summary["tolerances"] = {{"lyapunov", tol.lyapunov}, {"marginal", tol.marginal}};
    summary["pass"] = pass;
    open_output(cfg, "summary.json") << summary.dump(2) << '\n';

    return report_verdict("integrate", pass);
}

// --------------------------------------------------------------------------
// crn-check

int cmd_crn_check(const RunConfig& cfg, const Tolerances& tol) {
    Model m = resolve_model(cfg);

    ReactionNetwork net = build_type_network(m.space, m.rates);
    pair_reactions(net);
    const Pairing& pairing = *net.pairing;
    int unpaired = static_cast<int>(net.reactions.size()) -
                   2 * static_cast<int>(pairing.pairs.size()) -
                   static_cast<int>(pairing.fixed_point_voids.size());

    double type_dev = 0.0;
    for (int trial = 0; trial < cfg.n_trials; ++trial) {
        Distribution w = random_distribution(m.space.type_count(),
                                             derive_seed(cfg.seed, 1000 + trial));
        std::vector<double> a = mass_action_rhs(net, w.weights());
        std::vector<double> b = reco_rhs(m.space, w.weights(), m.rates);
        for (std::size_t x = 0; x < a.size(); ++x)
            type_dev = std::max(type_dev, std::abs(a[x] - b[x]));
    }

    PartitionTable table(cfg.n);
    ReactionNetwork pnet = build_partition_network(table, m.rates);
    double coeff_dev = 0.0;
    for (int trial = 0; trial < cfg.n_trials; ++trial) {
        Distribution a0 = random_distribution(static_cast<std::size_t>(table.size()),
                                              derive_seed(cfg.seed, 2000 + trial));
        std::vector<double> lhs = mass_action_rhs(pnet, a0.weights());
        std::vector<double> rhs = nonlinear_coeff_rhs(table, a0.weights(), m.rates);
        for (std::size_t x = 0; x < lhs.size(); ++x)
            coeff_dev = std::max(coeff_dev, std::abs(lhs[x] - rhs[x]));
    }

    // the grouped-product identity behind the coefficient dynamics
    double ugly_dev = 0.0;
    {
        std::vector<std::pair<int, int>> pairs;
        for (int a = 0; a < table.size(); ++a)
            for (int b = 0; b < table.size(); ++b)
                if (is_finer(table[a], table[b])) pairs.emplace_back(a, b);
        if (pairs.size() > 64) {  // sample on larger lattices, exhaustive on small
            Rng rng(derive_seed(cfg.seed, 3333));
            std::vector<std::pair<int, int>> sampled;
            for (int k = 0; k < 64; ++k)
                sampled.push_back(pairs[static_cast<std::size_t>(
                    rng.below(pairs.size()))]);
            pairs = std::move(sampled);
        }
        int vec_trials = std::min(cfg.n_trials, 20);
        for (int trial = 0; trial < vec_trials; ++trial) {
            Distribution vec = random_distribution(static_cast<std::size_t>(table.size()),
                                                   derive_seed(cfg.seed, 3000 + trial));
            for (const auto& [a, b] : pairs) {
                auto [lhs, rhs] = uglyproduct_check(table, table[a], table[b], vec.weights());
                ugly_dev = std::max(ugly_dev, std::abs(lhs - rhs));
            }
        }
    }

    bool block_non_decreasing = true, block_strict_exists = false;
    for (const auto& r : pnet.reactions) {
        int before = 0, after = 0;
        for (int id : r.substrates) before += table[id].block_count();
        for (int id : r.products) after += table[id].block_count();
        if (after < before) block_non_decreasing = false;
        if (!r.is_void && after > before) block_strict_exists = true;
    }
    if (!m.rates.has_proper_support()) block_strict_exists = true;  // vacuous

    bool pass = type_dev <= tol.crn && coeff_dev <= tol.crn && ugly_dev <= tol.crn &&
                unpaired == 0 && block_non_decreasing && block_strict_exists;

    json report = base_meta(cfg);
    report["n_trials"] = cfg.n_trials;
    report["type_rhs_deviation"] = type_dev;
    report["partition_rhs_deviation"] = coeff_dev;
    report["uglyproduct_deviation"] = ugly_dev;
    report["pairing"] = {{"reactions", net.reactions.size()},
                         {"voids", net.void_count()},
                         {"pairs", pairing.pairs.size()},
                         {"non_void_pairs", pairing.non_void_pair_count},
                         {"fixed_point_voids", pairing.fixed_point_voids.size()},
                         {"unpaired", unpaired}};
    report["partition_network"] = {{"reactions", pnet.reactions.size()},
                                   {"voids", pnet.void_count()},
                                   {"block_count_non_decreasing", block_non_decreasing},
                                   {"block_count_strict_increase_exists", block_strict_exists}};
    report["tolerances"] = {{"crn", tol.crn}};
    report["pass"] = pass;
    open_output(cfg, "crn_report.json") << report.dump(2) << '\n';

    if (net.reactions.size() <= 4096) {
        auto out = open_output(cfg, "network.jsonl");
        json header = base_meta(cfg);
        header["kind"] = "type";
        header["reactions"] = net.reactions.size();
        out << header.dump() << '\n';
        for (std::size_t i = 0; i < net.reactions.size(); ++i) {
            const Reaction& r = net.reactions[i];
            json line;
            line["id"] = i;
            json subs = json::array(), prods = json::array();
            for (int id : r.tuple)
                subs.push_back(m.space.letters_string(static_cast<std::size_t>(id)));
            for (int id : r.product_tuple)
                prods.push_back(m.space.letters_string(static_cast<std::size_t>(id)));
            line["substrates"] = subs;
            line["products"] = prods;
            line["kappa"] = r.kappa;
            line["origin"] = table[r.origin].str();
            line["void"] = r.is_void;
            out << line.dump() << '\n';
        }
    }

    return report_verdict("crn-check", pass);
}

// --------------------------------------------------------------------------
// gradient-check

int cmd_gradient_check(const RunConfig& cfg, const Tolerances& tol) {
    Model m = resolve_model(cfg);

    // configured system: mobility times entropy gradient against the flow
    ReactionNetwork net = build_type_network(m.space, m.rates);
    pair_reactions(net);
    double rhs_dev = 0.0, asym = 0.0;
    bool psd_ok = true;
    double min_eig = 0.0, min_quad = 0.0;
    Matrix last_mobility;
    for (int trial = 0; trial < cfg.n_trials; ++trial) {
        Distribution c = random_distribution(m.space.type_count(),
                                             derive_seed(cfg.seed, 4000 + trial));
        Matrix mob = onsager_matrix(net, c.weights());
        asym = std::max(asym, mob.max_asymmetry());
        std::vector<double> lhs = mob.apply(grad_free_energy(c.weights()));
        std::vector<double> rhs = reco_rhs(m.space, c.weights(), m.rates);
        for (std::size_t x = 0; x < lhs.size(); ++x)
            rhs_dev = std::max(rhs_dev, std::abs(lhs[x] - rhs[x]));
        if (trial < 5) {
            PsdReport psd = psd_check(mob, 64, derive_seed(cfg.seed, 4100 + trial),
                                      -tol.psd, tol.symmetry);
            psd_ok = psd_ok && psd.ok();
            min_eig = std::min(min_eig, psd.min_eigenvalue);
            min_quad = std::min(min_quad, psd.min_quadratic_form);
        }
        last_mobility = std::move(mob);
    }

    // two diallelic sites: the mobility must equal rho L(nu00 nu11, nu10 nu01)
    // times the +/-1 complex pattern, bit for bit
    bool two_locus_exact = true;
    {
        TypeSpace space2({2, 2});
        Rng rho_rng(derive_seed(cfg.seed, 4200));
        for (int trial = 0; trial < 20; ++trial) {
            double rho = rho_rng.uniform(0.1, 1.0);
            RecombinationRates rates2(2);
            rates2.set(Partition::parse(2, "1|2"), rho);
            ReactionNetwork net2 = build_type_network(space2, rates2);
            pair_reactions(net2);
            Distribution nu = random_distribution(4, derive_seed(cfg.seed, 4250 + trial));
            Matrix mob = onsager_matrix(net2, nu.weights());
            const auto& w = nu.weights();
            double l = rho * log_mean(w[0] * w[3], w[1] * w[2]);
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t r = 0; r < 4; ++r) {
                    bool iout = i == 0 || i == 3, jout = r == 0 || r == 3;
                    double want = (iout == jout ? l : -l);
                    if (mob(i, r) != want) two_locus_exact = false;
                }
            if (trial == 19) {
                auto out = open_output(cfg, "two_locus_fixture.csv");
                out << file_preamble(cfg);
                dump_matrix_csv(out, mob);
            }
        }
    }

    // three diallelic sites: the linkage-class assembly against the generic
    // construction and against the flow
    double fixture_rhs_dev = 0.0, fixture_entry_dev = 0.0;
    {
        TypeSpace space3({2, 2, 2});
        Rng rho_rng(derive_seed(cfg.seed, 4300));
        double r1 = rho_rng.uniform(0.1, 1.0);
        double r2 = rho_rng.uniform(0.1, 1.0);
        double r3 = rho_rng.uniform(0.1, 1.0);
        RecombinationRates rates3(3);
        rates3.set(Partition::parse(3, "1|2,3"), r1);
        rates3.set(Partition::parse(3, "1,3|2"), r2);
        rates3.set(Partition::parse(3, "1,2|3"), r3);
        ReactionNetwork net3 = build_type_network(space3, rates3);
        pair_reactions(net3);
        for (int trial = 0; trial < 50; ++trial) {
            Distribution nu = random_distribution(8, derive_seed(cfg.seed, 4400 + trial));
            Matrix ref = three_locus_reference(nu.weights(), r1, r2, r3);
            Matrix gen = onsager_matrix(net3, nu.weights());
            for (std::size_t i = 0; i < 8; ++i)
                for (std::size_t r = 0; r < 8; ++r)
                    fixture_entry_dev =
                        std::max(fixture_entry_dev, std::abs(ref(i, r) - gen(i, r)));
            std::vector<double> lhs = ref.apply(grad_free_energy(nu.weights()));
            std::vector<double> rhs = reco_rhs(space3, nu.weights(), rates3);
            for (std::size_t x = 0; x < lhs.size(); ++x)
                fixture_rhs_dev = std::max(fixture_rhs_dev, std::abs(lhs[x] - rhs[x]));
            if (trial == 49) {
                auto out = open_output(cfg, "three_locus_reference.csv");
                out << file_preamble(cfg);
                dump_matrix_csv(out, ref);
                auto out2 = open_output(cfg, "three_locus_assembled.csv");
                out2 << file_preamble(cfg);
                dump_matrix_csv(out2, gen);
            }
        }
    }

    // monotone-chain split: the four-state example and the configured chain
    double mcsmo_dev = 0.0;
    {
        FourStateExample ex = four_state_example();
        Rng rng(derive_seed(cfg.seed, 4500));
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> p(4);
            for (double& v : p) v = rng.unit();
            std::vector<double> lhs = mcsmo_matrix(ex.q, ex.w, p).apply(ex.w);
            std::vector<double> rhs = master_rhs(ex.q, p);
            for (std::size_t i = 0; i < lhs.size(); ++i)
                mcsmo_dev = std::max(mcsmo_dev, std::abs(lhs[i] - rhs[i]));
        }
        PartitionTable table(cfg.n);
        Matrix q = build_generator(table, m.rates);
        std::vector<double> w(static_cast<std::size_t>(table.size()));
        for (int i = 0; i < table.size(); ++i)
            w[static_cast<std::size_t>(i)] = table[i].block_count();
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> p(w.size());
            for (double& v : p) v = rng.unit();
            std::vector<double> lhs = mcsmo_matrix(q, w, p).apply(w);
            std::vector<double> rhs = master_rhs(q, p);
            for (std::size_t i = 0; i < lhs.size(); ++i)
                mcsmo_dev = std::max(mcsmo_dev, std::abs(lhs[i] - rhs[i]));
        }
    }

    // the non-diagonalisable example: exact integer ranks
    std::vector<std::vector<long long>> jm = {
        {0, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {0, 2, 2, 2}};
    int geometric = 4 - integer_matrix_rank(jm);
    auto jm2 = integer_matrix_product(jm, jm);
    int algebraic = 4 - integer_matrix_rank(integer_matrix_product(jm2, jm2));
    bool jordan_ok = geometric == 2 && algebraic == 3;

    bool pass = rhs_dev <= tol.gradient && asym <= tol.symmetry && psd_ok &&
                two_locus_exact && fixture_rhs_dev <= tol.fixture &&
                fixture_entry_dev <= tol.gradient && mcsmo_dev <= tol.mcsmo && jordan_ok;

    {
        auto out = open_output(cfg, "onsager_matrix.csv");
        out << file_preamble(cfg);
        dump_matrix_csv(out, last_mobility);
    }
    json report = base_meta(cfg);
    report["n_trials"] = cfg.n_trials;
    report["gradient_rhs_deviation"] = rhs_dev;
    report["max_asymmetry"] = asym;
    report["psd"] = {{"ok", psd_ok}, {"min_eigenvalue", min_eig},
                     {"min_quadratic_form", min_quad}};
    report["two_locus_fixture_exact"] = two_locus_exact;
    report["three_locus_rhs_deviation"] = fixture_rhs_dev;
    report["three_locus_entry_deviation"] = fixture_entry_dev;
    report["mcsmo_identity_deviation"] = mcsmo_dev;
    report["jordan_example"] = {{"geometric_multiplicity", geometric},
                                {"algebraic_multiplicity", algebraic},
                                {"defective", jordan_ok}};
    report["tolerances"] = {{"gradient", tol.gradient}, {"symmetry", tol.symmetry},
                            {"psd", tol.psd}, {"fixture", tol.fixture},
                            {"mcsmo", tol.mcsmo}};
    report["pass"] = pass;
    open_output(cfg, "gradient_report.json") << report.dump(2) << '\n';

    return report_verdict("gradient-check", pass);
}

// --------------------------------------------------------------------------
// partition-sim

int worker_threads() {
    const char* env = std::getenv("RECOFLOW_THREADS");
    if (env == nullptr || *env == '\0') {
        unsigned hw = std::thread::hardware_concurrency();
        return static_cast<int>(std::clamp(hw, 1u, 8u));
    }
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 256)
        throw ConfigError("RECOFLOW_THREADS: expected an integer in 1..256");
    return static_cast<int>(v);
}

int cmd_partition_sim(const RunConfig& cfg, const Tolerances& tol) {
    Model m = resolve_model(cfg);
    int threads = worker_threads();

    PartitionTable table(cfg.n);
    Matrix q = build_generator(table, m.rates);
    Partition start = cfg.start_partition.empty() ? Partition::whole(cfg.n)
                                                  : Partition::parse(cfg.n, cfg.start_partition);
    int start_idx = table.index_of(start);
    std::size_t states = static_cast<std::size_t>(table.size());

    {
        auto out = open_output(cfg, "generator.csv");
        out << file_preamble(cfg) << "state";
        for (int i = 0; i < table.size(); ++i) out << ',' << csv_field(table[i].str());
        out << '\n';
        for (std::size_t i = 0; i < states; ++i) {
            out << csv_field(table[static_cast<int>(i)].str());
            for (std::size_t r = 0; r < states; ++r)
                out << ',' << detail::format_double(q(i, r));
            out << '\n';
        }
    }

    std::vector<double> b0(states, 0.0);
    b0[static_cast<std::size_t>(start_idx)] = 1.0;
    auto master = [&](const std::vector<double>& b) { return master_rhs(q, b); };
    {
        auto samples = rk4_integrate(master, b0, cfg.t_end, cfg.dt, cfg.sample_every);
        auto out = open_output(cfg, "master_trajectory.csv");
        out << file_preamble(cfg) << "t";
        for (int i = 0; i < table.size(); ++i)
            out << ',' << csv_field("b_" + table[i].str());
        out << '\n';
        for (const auto& [t, b] : samples) {
            out << detail::format_double(t);
            for (double v : b) out << ',' << detail::format_double(v);
            out << '\n';
        }
    }

    auto paths = simulate_paths(q, start_idx, cfg.t_end, cfg.n_paths, cfg.seed, threads);
    {
        auto out = open_output(cfg, "paths.jsonl");
        json header = base_meta(cfg);
        header["kind"] = "paths";
        header["n_paths"] = cfg.n_paths;
        header["start"] = start.str();
        header["t_end"] = cfg.t_end;
        json legend = json::array();
        for (int i = 0; i < table.size(); ++i) legend.push_back(table[i].str());
        header["states"] = legend;
        out << header.dump() << '\n';
        for (std::size_t i = 0; i < paths.size(); ++i) {
            json line;
            line["path"] = i;
            line["states"] = paths[i].states;
            line["jump_times"] = paths[i].jump_times;
            out << line.dump() << '\n';
        }
    }

    // three-way consistency: direct flow, master-law mixture, nonlinear
    // coefficient mixture, plus the Monte-Carlo estimate in sigma units
    std::vector<double> check_times;
    for (double t : {0.5, 1.0, 2.0})
        if (t <= cfg.t_end * (1.0 + 1e-12)) check_times.push_back(std::min(t, cfg.t_end));
    if (check_times.empty() || std::abs(check_times.back() - cfg.t_end) > 1e-12)
        check_times.push_back(cfg.t_end);

    std::vector<std::vector<double>> recombined(states);
    for (std::size_t a = 0; a < states; ++a)
        recombined[a] =
            recombinator_product_raw(m.space, m.omega0.weights(), table[static_cast<int>(a)]);

    auto flow = [&](const std::vector<double>& w) { return reco_rhs(m.space, w, m.rates); };
    auto coeff = [&](const std::vector<double>& a) {
        return nonlinear_coeff_rhs(table, a, m.rates);
    };
    std::vector<double> omega_start = recombined[static_cast<std::size_t>(start_idx)];

    auto mixture = [&](const std::vector<double>& weights) {
        std::vector<double> out(m.space.type_count(), 0.0);
        for (std::size_t a = 0; a < states; ++a)
            for (std::size_t x = 0; x < out.size(); ++x)
                out[x] += weights[a] * recombined[a][x];
        return out;
    };
    auto sup_dist = [](const std::vector<double>& a, const std::vector<double>& b) {
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
        return d;
    };

    bool pass = true;
    json checks = json::array();
    for (double t : check_times) {
        std::vector<double> direct = rk4_integrate(flow, omega_start, t, cfg.dt).back().second;
        std::vector<double> b_t = rk4_integrate(master, b0, t, cfg.dt).back().second;
        std::vector<double> a_t = rk4_integrate(coeff, b0, t, cfg.dt).back().second;
        std::vector<double> master_mix = mixture(b_t);
        std::vector<double> coeff_mix = mixture(a_t);

        double mvd = sup_dist(master_mix, direct);
        double cvd = sup_dist(coeff_mix, direct);
        double mvc = sup_dist(master_mix, coeff_mix);

        DualEstimate est = mc_dual_statistics(m.space, table, paths, m.omega0, t);
        double sigma_scaled = 0.0;
        for (std::size_t x = 0; x < est.mean.size(); ++x) {
            double sigma = std::max(est.std_error[x], 1e-12);
            sigma_scaled = std::max(sigma_scaled,
                                    std::abs(est.mean[x] - master_mix[x]) / sigma);
        }
        bool within = sigma_scaled <= tol.sigma_mult;
        bool consistent = mvd <= tol.consistency && cvd <= tol.consistency &&
                          mvc <= tol.consistency;
        pass = pass && within && consistent;

        json entry;
        entry["t"] = t;
        entry["master_vs_direct"] = mvd;
        entry["nonlinear_vs_direct"] = cvd;
        entry["master_vs_nonlinear"] = mvc;
        entry["mc_sigma_scaled_deviation"] = sigma_scaled;
        entry["mc_within_bound"] = within;
        entry["consistent"] = consistent;
        checks.push_back(entry);
    }

    json report = base_meta(cfg);
    report["n_paths"] = cfg.n_paths;
    report["start_partition"] = start.str();
    report["t_end"] = cfg.t_end;
    report["dt"] = cfg.dt;
    report["checks"] = checks;
    report["tolerances"] = {{"consistency", tol.consistency},
                            {"sigma_mult", tol.sigma_mult}};
    report["pass"] = pass;
    open_output(cfg, "consistency_report.json") << report.dump(2) << '\n';

    return report_verdict("partition-sim", pass);
}

// --------------------------------------------------------------------------

struct CliOptions {
    std::string config_path;
    bool seed_set = false;
    std::uint64_t seed = 0;
    bool paths_set = false;
    int paths = 0;
    std::string out_dir;
};

void add_common(CLI::App* sub, CliOptions& opt) {
    sub->add_option("--config", opt.config_path, "JSON config file")->required();
    sub->add_option("--seed", opt.seed, "override the config seed")
        ->each([&](const std::string&) { opt.seed_set = true; });
    sub->add_option("--paths", opt.paths, "override the config path count")
        ->each([&](const std::string&) { opt.paths_set = true; });
    sub->add_option("--out", opt.out_dir, "override the config output directory");
}

RunConfig finalize(const CliOptions& opt) {
    RunConfig cfg = load_config(opt.config_path);
    if (opt.seed_set) cfg.seed = opt.seed;
    if (opt.paths_set) {
        if (opt.paths < 1) throw ConfigError("n_paths: must be >= 1");
        cfg.n_paths = opt.paths;
    }
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recoflow: recombination dynamics with cross-checked reformulations"};
    app.footer(kTolTable);
    app.require_subcommand(1);

    CliOptions opt;
    Tolerances tol;

    CLI::App* integrate_cmd =
        app.add_subcommand("integrate", "integrate the flow; write trajectory and summary");
    add_common(integrate_cmd, opt);
    integrate_cmd->add_option("--tol-lyapunov", tol.lyapunov, "monotonicity slack");
    integrate_cmd->add_option("--tol-marginal", tol.marginal, "marginal drift gate");

    CLI::App* crn_cmd = app.add_subcommand(
        "crn-check", "verify the reaction-network reformulations and reversibility");
    add_common(crn_cmd, opt);
    crn_cmd->add_option("--tol-crn", tol.crn, "deviation gate");

    CLI::App* grad_cmd = app.add_subcommand(
        "gradient-check", "verify the gradient structure, fixtures, and chain split");
    add_common(grad_cmd, opt);
    grad_cmd->add_option("--tol-gradient", tol.gradient, "RHS deviation gate");
    grad_cmd->add_option("--tol-symmetry", tol.symmetry, "asymmetry gate");
    grad_cmd->add_option("--tol-psd", tol.psd, "eigenvalue floor magnitude");
    grad_cmd->add_option("--tol-fixture", tol.fixture, "three-locus RHS gate");
    grad_cmd->add_option("--tol-mcsmo", tol.mcsmo, "chain-split identity gate");

    CLI::App* sim_cmd = app.add_subcommand(
        "partition-sim", "sample splitting paths; cross-check all representations");
    add_common(sim_cmd, opt);
    sim_cmd->add_option("--tol-consistency", tol.consistency, "reconstruction gate");
    sim_cmd->add_option("--sigma-mult", tol.sigma_mult, "Monte-Carlo sigma multiplier");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = finalize(opt);
        if (integrate_cmd->parsed()) return cmd_integrate(cfg, tol);
        if (crn_cmd->parsed()) return cmd_crn_check(cfg, tol);
        if (grad_cmd->parsed()) return cmd_gradient_check(cfg, tol);
        if (sim_cmd->parsed()) return cmd_partition_sim(cfg, tol);
        std::cerr << "no subcommand selected\n";
        return 64;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 64;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return 65;
    } catch (const Error& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
