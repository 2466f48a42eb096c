// tasep: Bethe-ansatz and brute-force tools for the periodic TASEP.
//
// Exit codes: 0 success, 1 internal failure or bad input, 2 validation mismatch.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tasep/correlator.hpp"
#include "tasep/io.hpp"
#include "tasep/validation.hpp"

namespace {

using namespace tasep;
using io::json;

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_mismatch = 2;

void emit(const std::string &path, const std::string &payload) {
    if (path.empty() || path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open output file " + path);
    }
    out << payload;
}

std::string dump(const json &j) { return j.dump(2) + "\n"; }

struct Common {
    int M = 4;
    int N = 2;
    std::string out;
    unsigned threads = 1;
};

void add_shape(CLI::App *cmd, Common &c) {
    cmd->add_option("--M", c.M, "number of sites")->required()->check(CLI::Range(1, 64));
    cmd->add_option("--N", c.N, "number of particles")->required()->check(CLI::NonNegativeNumber);
}

// ---------------------------------------------------------------------------

int cmd_bethe(const Common &c, double tol) {
    const RingShape shape{c.M, c.N};
    shape.validate();
    SolverOptions opts;
    opts.tol = tol;
    opts.threads = c.threads;
    const auto catalog = solve_all(shape, opts);

    io::RunManifest manifest{"bethe", shape, {{"tol", tol}, {"threads", c.threads}}};
    json payload{{"manifest", io::to_json(manifest)}, {"catalog", io::to_json(catalog)}};
    emit(c.out, dump(payload));

    const bool complete = catalog.solutions.size() == catalog.expected_nontrivial() && catalog.max_residual() < tol;
    if (!complete) {
        const std::string diag_path = (c.out.empty() || c.out == "-") ? "bethe_diagnostics.json"
                                                                       : c.out + ".diagnostics.json";
        json diag{{"manifest", io::to_json(manifest)},
                  {"expected_nontrivial", catalog.expected_nontrivial()},
                  {"found", catalog.solutions.size()},
                  {"max_residual", catalog.max_residual()},
                  {"diagnostics", io::to_json(catalog)["diagnostics"]}};
        emit(diag_path, dump(diag));
        std::cerr << "bethe: catalog incomplete (" << catalog.solutions.size() << " of "
                  << catalog.expected_nontrivial() << "), diagnostics in " << diag_path << "\n";
        return exit_mismatch;
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct CorrelateArgs {
    std::vector<int> sites;
    std::vector<double> times;
    std::string method = "both";
    std::string format = "json";
    double tol = tol::bethe_residual;
};

int cmd_correlate(const Common &c, const CorrelateArgs &a) {
    const RingShape shape{c.M, c.N};
    shape.validate();
    for (const double t : a.times) {
        if (!(t >= 0.0)) {
            throw DomainError("correlate: times must be non-negative");
        }
    }
    const bool use_bethe = a.method != "oracle";
    const bool use_oracle = a.method != "bethe";

    std::optional<Correlator> corr;
    if (use_bethe) {
        SolverOptions opts;
        opts.tol = a.tol;
        opts.threads = c.threads;
        corr.emplace(solve_all(shape, opts));
    }
    std::optional<MarkovGenerator> gen;
    std::optional<SectorBasis> basis;
    if (use_oracle) {
        gen.emplace(build_generator(shape));
        basis.emplace(shape);
    }

    struct Row {
        int m;
        double t;
        std::optional<double> bethe, oracle;
    };
    std::vector<Row> rows;
    bool mismatch = false;
    for (const int m : a.sites) {
        for (const double t : a.times) {
            Row row{m, t, std::nullopt, std::nullopt};
            if (corr) {
                const auto res = (*corr)(m, t);
                for (const auto &w : res.warnings) {
                    std::cerr << "correlate: " << w << "\n";
                }
                row.bethe = res.value;
            }
            if (gen) {
                const int reduced = ((m - 1) % shape.M + shape.M) % shape.M + 1;
                row.oracle = direct_correlation(*gen, *basis, reduced, t);
            }
            if (row.bethe && row.oracle && std::abs(*row.bethe - *row.oracle) > 1e-6) {
                mismatch = true;
            }
            rows.push_back(row);
        }
    }

    io::RunManifest manifest{"correlate",
                             shape,
                             {{"m", a.sites}, {"t", a.times}, {"method", a.method}, {"tol", a.tol}}};
    std::ostringstream out;
    if (a.format == "csv") {
        out << "# manifest: " << io::to_json(manifest).dump() << "\n";
        out << "m,t,value_bethe,value_oracle,abs_diff\n";
        auto cell = [](const std::optional<double> &x) { return x ? io::format_double(*x) : std::string{}; };
        for (const auto &r : rows) {
            std::optional<double> diff;
            if (r.bethe && r.oracle) {
                diff = std::abs(*r.bethe - *r.oracle);
            }
            out << r.m << "," << io::format_double(r.t) << "," << cell(r.bethe) << "," << cell(r.oracle) << ","
                << cell(diff) << "\n";
        }
    } else {
        json arr = json::array();
        for (const auto &r : rows) {
            auto field = [](const std::optional<double> &x) { return x ? json(*x) : json(nullptr); };
            std::optional<double> diff;
            if (r.bethe && r.oracle) {
                diff = std::abs(*r.bethe - *r.oracle);
            }
            arr.push_back({{"m", r.m},
                           {"t", r.t},
                           {"value_bethe", field(r.bethe)},
                           {"value_oracle", field(r.oracle)},
                           {"abs_diff", field(diff)}});
        }
        out << dump({{"manifest", io::to_json(manifest)}, {"rows", arr}});
    }
    emit(c.out, out.str());
    if (mismatch) {
        std::cerr << "correlate: Bethe and oracle values differ by more than 1e-6\n";
        return exit_mismatch;
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------

int cmd_selftest(int max_M, unsigned threads, std::uint64_t seed, bool fault) {
    validation::SelftestOptions opts;
    opts.max_M = max_M;
    opts.threads = threads;
    opts.seed = seed;
    opts.inject_sign_fault = fault;
    const auto results = validation::run_selftest(opts);
    int failed = 0;
    for (const auto &r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(58) << r.name << std::right
                  << std::setw(12) << std::setprecision(3) << std::scientific << r.metric << " < " << r.threshold
                  << std::defaultfloat;
        if (!r.detail.empty()) {
            std::cout << "  " << r.detail;
        }
        std::cout << "\n";
        failed += r.passed ? 0 : 1;
    }
    std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
    return failed == 0 ? exit_ok : exit_internal;
}

// ---------------------------------------------------------------------------

int cmd_mc(const Common &c, int m, double t, std::uint64_t samples, std::uint64_t seed) {
    McConfig cfg{{c.M, c.N}, samples, t, m, seed, c.threads};
    const auto est = estimate_correlation(cfg);
    // threads does not affect the result, so it stays out of the manifest
    io::RunManifest manifest{"mc", cfg.shape, {{"m", m}, {"t", t}, {"samples", samples}, {"seed", seed}}};
    json payload = io::to_json(est);
    payload["manifest"] = io::to_json(manifest);
    emit(c.out, dump(payload));
    return exit_ok;
}

int cmd_spectrum(const Common &c) {
    const RingShape shape{c.M, c.N};
    const auto report = spectrum(build_generator(shape));
    io::RunManifest manifest{"spectrum", shape, {}};
    emit(c.out, dump({{"manifest", io::to_json(manifest)}, {"spectrum", io::to_json(report)}}));
    return exit_ok;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Periodic TASEP: Bethe ansatz, determinant formulas and two-time correlations"};
    app.require_subcommand(1);

    Common common;
    double bethe_tol = tol::bethe_residual;
    auto *bethe = app.add_subcommand("bethe", "solve the Bethe equations and write the solution catalog");
    add_shape(bethe, common);
    bethe->add_option("--tol", bethe_tol, "residual tolerance");
    bethe->add_option("--out", common.out, "output file (default stdout)");
    bethe->add_option("--threads", common.threads, "worker threads");

    CorrelateArgs cargs;
    auto *correlate = app.add_subcommand("correlate", "stationary two-time correlation C(m, t)");
    add_shape(correlate, common);
    correlate->add_option("--m", cargs.sites, "site(s) m")->required()->delimiter(',');
    correlate->add_option("--t", cargs.times, "time grid, e.g. 0,0.5,1")->required()->delimiter(',');
    correlate->add_option("--method", cargs.method)->check(CLI::IsMember({"bethe", "oracle", "both"}));
    correlate->add_option("--format", cargs.format)->check(CLI::IsMember({"json", "csv"}));
    correlate->add_option("--tol", cargs.tol, "Bethe residual tolerance");
    correlate->add_option("--out", common.out, "output file (default stdout)");
    correlate->add_option("--threads", common.threads, "worker threads");

    int max_M = 6;
    std::uint64_t seed = 20240601;
    bool fault = false;
    auto *selftest = app.add_subcommand("selftest", "run the invariant matrix up to max_M");
    selftest->add_option("--max-M", max_M, "largest ring")->check(CLI::Range(1, 10));
    selftest->add_option("--seed", seed);
    selftest->add_option("--threads", common.threads, "worker threads");
    selftest->add_flag("--inject-sign-fault", fault, "dev: flip the sign of one determinant");

    int mc_m = 1;
    double mc_t = 1.0;
    std::uint64_t samples = 100000;
    std::uint64_t mc_seed = 1;
    auto *mc = app.add_subcommand("mc", "Monte Carlo estimate of C(m, t)");
    add_shape(mc, common);
    mc->add_option("--m", mc_m)->required();
    mc->add_option("--t", mc_t)->required();
    mc->add_option("--samples", samples);
    mc->add_option("--seed", mc_seed);
    mc->add_option("--threads", common.threads, "worker threads");
    mc->add_option("--out", common.out, "output file (default stdout)");

    auto *spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues of the Markov generator");
    add_shape(spectrum_cmd, common);
    spectrum_cmd->add_option("--out", common.out, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*bethe) {
            return cmd_bethe(common, bethe_tol);
        }
        if (*correlate) {
            return cmd_correlate(common, cargs);
        }
        if (*selftest) {
            return cmd_selftest(max_M, common.threads, seed, fault);
        }
        if (*mc) {
            return cmd_mc(common, mc_m, mc_t, samples, mc_seed);
        }
        if (*spectrum_cmd) {
            return cmd_spectrum(common);
        }
    } catch (const ValidationError &e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return exit_mismatch;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_internal;
}
