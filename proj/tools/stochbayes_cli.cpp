// stochbayes: stochastic-computing Bayesian inference simulator.
//
// Subcommands: pv-curve, sbg-bench, netlist-run, fusion, bbn.
// Every run is fully determined by its flags: a fixed default seed, no
// time-based state, and the STOCHBAYES_THREADS cap changes speed only,
// never output bytes.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stochbayes/bbn.hpp"
#include "stochbayes/bitstream.hpp"
#include "stochbayes/config.hpp"
#include "stochbayes/errors.hpp"
#include "stochbayes/format.hpp"
#include "stochbayes/fusion.hpp"
#include "stochbayes/mtj.hpp"
#include "stochbayes/netlist.hpp"
#include "stochbayes/rng.hpp"
#include "stochbayes/version.hpp"

namespace sb = stochbayes;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;      // usage, config, I/O
constexpr int kExitValidation = 2; // parse/validate/precondition failures
constexpr int kExitDegenerate = 3; // degenerate computation

struct RunConfig {
    std::uint64_t seed = 1;
    std::size_t length = 256;
    std::string device_path;
    std::string scenario_path;
    std::string model_path;
    std::string netlist_path;
    std::string out_path;
    std::string format = "csv";
};

sb::MtjParams device_of(const RunConfig& cfg) {
    return cfg.device_path.empty() ? sb::MtjParams{} : sb::load_device_config(cfg.device_path);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw sb::ConfigError("cannot open output file: " + path);
    }
    return out;
}

std::string header_text(const char* subcommand, const RunConfig& cfg) {
    std::ostringstream out;
    out << "# stochbayes " << sb::kVersion << "\n";
    out << "# subcommand: " << subcommand << "\n";
    out << "# seed: " << cfg.seed << "\n";
    out << "# length: " << cfg.length << "\n";
    out << "# device: " << (cfg.device_path.empty() ? "(builtin defaults)" : cfg.device_path)
        << "\n";
    if (!cfg.scenario_path.empty()) {
        out << "# scenario: " << cfg.scenario_path << "\n";
    }
    if (!cfg.model_path.empty()) {
        out << "# model: " << cfg.model_path << "\n";
    }
    if (!cfg.netlist_path.empty()) {
        out << "# netlist: " << cfg.netlist_path << "\n";
    }
    return out.str();
}

void write_header(std::ostream& out, const char* subcommand, const RunConfig& cfg) {
    out << header_text(subcommand, cfg);
}

// ---------------------------------------------------------------- pv-curve

int cmd_pv_curve(const RunConfig& cfg, int points, int trials) {
    const sb::MtjParams params = device_of(cfg);
    const auto curve = sb::pv_curve(params, points);
    auto out = open_out(cfg.out_path);
    write_header(out, "pv-curve", cfg);
    out << "voltage,analytic_p,mc_p,mc_trials\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const auto& [v, p] = curve[i];
        const auto mc = sb::mc_probability(
            v, trials, params, sb::derive_seed(cfg.seed, "mc" + std::to_string(i)));
        out << sb::fmt_double(v) << ',' << sb::fmt_double(p.value()) << ','
            << sb::fmt_double(mc.value()) << ',' << trials << '\n';
    }
    return kExitOk;
}

// --------------------------------------------------------------- sbg-bench

struct BenchRow {
    std::size_t length;
    double repr_mae;
    double repr_expected;
    double product_mae;
    double product_expected;
};

BenchRow bench_length(std::size_t n, int seeds, std::uint64_t master,
                      const sb::MtjParams& params) {
    const auto curve = sb::pv_curve(params, 24);
    std::vector<std::pair<double, double>> repr;
    std::vector<std::pair<double, double>> product;
    double repr_expected = 0.0;
    double product_expected = 0.0;
    for (std::size_t vi = 0; vi < curve.size(); ++vi) {
        const auto& [v, pv] = curve[vi];
        const double p = pv.value();
        repr_expected += std::sqrt(2.0 / M_PI) * std::sqrt(p * (1.0 - p) / double(n));
        const double pp = p * p;
        product_expected += std::sqrt(2.0 / M_PI) * std::sqrt(pp * (1.0 - pp) / double(n));
        for (int s = 1; s <= seeds; ++s) {
            const std::string tag = std::to_string(vi) + "_" + std::to_string(s);
            sb::SbgNode node{"bench_" + tag, v,
                             sb::derive_seed(master, "bench_" + tag), params};
            repr.emplace_back(p, sb::estimate(sb::generate(node, n)).value());

            sb::SbgNode a{"prod_a_" + tag, v, sb::derive_seed(master, "prod_a_" + tag), params};
            sb::SbgNode b{"prod_b_" + tag, v, sb::derive_seed(master, "prod_b_" + tag), params};
            const auto anded = sb::and_gate(sb::generate(a, n), sb::generate(b, n));
            product.emplace_back(pp, sb::estimate(anded).value());
        }
    }
    return {n, sb::mean_abs_error(repr), repr_expected / double(curve.size()),
            sb::mean_abs_error(product), product_expected / double(curve.size())};
}

int cmd_sbg_bench(const RunConfig& cfg, int seeds) {
    const sb::MtjParams params = device_of(cfg);
    auto out = open_out(cfg.out_path);
    write_header(out, "sbg-bench", cfg);
    out << "# seeds per point: " << seeds << "\n";
    out << "length,repr_mae,repr_expected_mae,product_mae,product_expected_mae\n";
    for (std::size_t n : {std::size_t{64}, std::size_t{128}, std::size_t{256}}) {
        const BenchRow row = bench_length(n, seeds, cfg.seed, params);
        out << row.length << ',' << sb::fmt_double(row.repr_mae) << ','
            << sb::fmt_double(row.repr_expected) << ',' << sb::fmt_double(row.product_mae) << ','
            << sb::fmt_double(row.product_expected) << '\n';
    }
    return kExitOk;
}

// ------------------------------------------------------------- netlist-run

int cmd_netlist_run(const RunConfig& cfg) {
    std::ifstream in(cfg.netlist_path);
    if (!in) {
        throw sb::ConfigError("cannot open netlist file: " + cfg.netlist_path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();

    const sb::MtjParams params = device_of(cfg);
    const sb::Netlist netlist = sb::parse_netlist(buf.str());
    for (const sb::Diagnostic& w : netlist.warnings) {
        std::cerr << "warning: line " << w.line << ": " << w.message << "\n";
    }
    if (const auto diags = sb::validate(netlist, params); !diags.empty()) {
        for (const sb::Diagnostic& d : diags) {
            std::cerr << "error: " << d.message << "\n";
        }
        return kExitValidation;
    }

    const sb::EvalResult result = sb::evaluate(netlist, cfg.length, cfg.seed, params);
    const sb::ResourceReport report = sb::resource_report(netlist, cfg.length, params);

    auto out = open_out(cfg.out_path);
    write_header(out, "netlist-run", cfg);
    out << "# resource: n_sbg=" << report.n_sbg << " n_and=" << report.n_and
        << " n_mux=" << report.n_mux << "\n";
    out << "# latency_ns: " << sb::fmt_double(report.latency_ns) << "\n";
    out << "# energy_mj_estimate: " << sb::fmt_double(report.energy_mj)
        << " (unvalidated estimate)\n";
    if (result.clamped_sources > 0) {
        out << "# clamped_sources: " << result.clamped_sources << "\n";
    }
    sb::write_eval_csv(result, out);
    return kExitOk;
}

// ------------------------------------------------------------------ fusion

std::string heatmap_name(const std::string& prefix, const std::string& stem,
                         const std::string& format) {
    return prefix + "_" + stem + "." + format;
}

void write_heatmap(const sb::PosteriorGrid& grid, const sb::GridSpec& spec,
                   const std::string& path, const std::string& format, const char* sub,
                   const RunConfig& cfg) {
    auto out = open_out(path);
    if (format == "csv") {
        write_header(out, sub, cfg);
        sb::export_heatmap_csv(grid, spec, out);
    } else {
        sb::export_heatmap_pgm(grid, out, header_text(sub, cfg));
    }
}

int cmd_fusion(const RunConfig& cfg, int grid_flag, std::vector<std::size_t> lengths,
               int kl_seeds) {
    const sb::MtjParams params = device_of(cfg);
    sb::FusionScenario scenario = cfg.scenario_path.empty()
                                      ? sb::default_scenario()
                                      : sb::load_scenario(cfg.scenario_path);
    if (grid_flag > 0) {
        scenario.grid.size = grid_flag;
    }
    const sb::GridSpec grid = scenario.grid;
    if (lengths.empty()) {
        lengths = {64, 128, 256};
    }

    const sb::PosteriorGrid exact = sb::exact_posterior(scenario.sensors, grid);
    write_heatmap(exact, grid, heatmap_name(cfg.out_path, "exact", cfg.format), cfg.format,
                  "fusion", cfg);

    const sb::Netlist netlist = sb::build_fusion_netlist(scenario.sensors, grid);

    auto kl_out = open_out(cfg.out_path + "_kl.csv");
    write_header(kl_out, "fusion", cfg);
    kl_out << "# kl: D(exact||stochastic), natural log; counters pooled across " << kl_seeds
           << " master seeds\n";
    kl_out << "grid_size,length,kl\n";
    for (std::size_t n : lengths) {
        const auto single = sb::stochastic_posterior(netlist, grid, n, cfg.seed, params);
        write_heatmap(single, grid,
                      heatmap_name(cfg.out_path, "stoch" + std::to_string(n), cfg.format),
                      cfg.format, "fusion", cfg);
        const auto pooled =
            sb::accumulated_stochastic_posterior(netlist, grid, n, cfg.seed, kl_seeds, params);
        kl_out << grid.size << ',' << n << ',' << sb::fmt_double(sb::kl_divergence(exact, pooled, n))
               << '\n';
    }
    return kExitOk;
}

// --------------------------------------------------------------------- bbn

int cmd_bbn(const RunConfig& cfg, const std::string& evidence_text) {
    const sb::MtjParams params = device_of(cfg);
    const sb::HeartBbn model =
        cfg.model_path.empty() ? sb::HeartBbn{} : sb::load_model(cfg.model_path);

    std::vector<std::pair<std::string, sb::Evidence>> queries;
    if (evidence_text.empty()) {
        queries = sb::standard_queries();
    } else {
        queries.emplace_back("p(HD|" + evidence_text + ")", sb::parse_evidence(evidence_text));
    }

    auto out = open_out(cfg.out_path);
    write_header(out, "bbn", cfg);
    out << "query,ctrl1,ctrl2,ctrl3,ctrl4,exact,stochastic,abs_err\n";
    for (const auto& [name, evidence] : queries) {
        const sb::ControlSignals s = sb::control_signals(model, evidence);
        out << name << ',' << sb::fmt_double(s.ctrl1) << ',' << sb::fmt_double(s.ctrl2) << ','
            << sb::fmt_double(s.ctrl3) << ',' << sb::fmt_double(s.ctrl4) << ',';
        try {
            const double exact = sb::posterior_hd(model, evidence);
            const double sc = sb::infer_stochastic(model, evidence, cfg.length, cfg.seed, params);
            out << sb::fmt_double(exact) << ',' << sb::fmt_double(sc) << ','
                << sb::fmt_double(std::abs(exact - sc)) << '\n';
        } catch (const sb::DegenerateError& e) {
            out << "nan,nan,nan # degenerate evidence\n";
            std::cerr << "warning: " << name << ": " << e.what() << "\n";
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spintronics stochastic-computing Bayesian inference simulator"};
    app.require_subcommand(1);

    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool with_length = true) {
        sub->add_option("--seed", cfg.seed, "master seed for every random draw")
            ->capture_default_str();
        if (with_length) {
            sub->add_option("--length", cfg.length, "stochastic bitstream length")
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
        }
        sub->add_option("--device", cfg.device_path, "device config file (defaults built in)");
        sub->add_option("--out", cfg.out_path, "output file")->required();
    };

    // pv-curve
    auto* pv = app.add_subcommand("pv-curve", "analytic and Monte-Carlo P-V curve");
    int points = 24;
    int trials = 1000;
    pv->add_option("--points", points, "voltage points")->check(CLI::Range(2, 100000))
        ->capture_default_str();
    pv->add_option("--trials", trials, "Monte-Carlo trials per voltage")
        ->check(CLI::PositiveNumber)->capture_default_str();
    add_common(pv, false);

    // sbg-bench
    auto* bench = app.add_subcommand("sbg-bench", "bitstream representation and product errors");
    int bench_seeds = 50;
    bench->add_option("--seeds", bench_seeds, "seeds per sweep point")
        ->check(CLI::PositiveNumber)->capture_default_str();
    add_common(bench, false);

    // netlist-run
    auto* nrun = app.add_subcommand("netlist-run", "evaluate a netlist file");
    nrun->add_option("netlist", cfg.netlist_path, "netlist text file")->required();
    add_common(nrun);

    // fusion
    auto* fusion = app.add_subcommand("fusion", "target-location data fusion");
    int grid_flag = 0;
    std::vector<std::size_t> lengths;
    int kl_seeds = 10;
    fusion->add_option("--grid", grid_flag, "grid size (cells per side)")
        ->check(CLI::Range(2, 4096));
    fusion->add_option("--length", lengths,
                       "stream length for the KL report (repeatable; default 64 128 256)");
    fusion->add_option("--kl-seeds", kl_seeds, "seeds to average the KL over")
        ->check(CLI::PositiveNumber)->capture_default_str();
    fusion->add_option("--scenario", cfg.scenario_path, "scenario file (default built in)");
    fusion->add_option("--format", cfg.format, "heat map format: csv or pgm")
        ->check(CLI::IsMember({"csv", "pgm"}))->capture_default_str();
    fusion->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    fusion->add_option("--device", cfg.device_path, "device config file");
    fusion->add_option("--out", cfg.out_path, "output prefix (files get _exact/_stochN/_kl suffixes)")
        ->required();

    // bbn
    auto* bbn = app.add_subcommand("bbn", "heart-disease belief network inference");
    std::string evidence_text;
    bbn->add_option("--evidence", evidence_text,
                    "evidence like 'bp=high' or 'e=y,d=unhealthy' (default: report queries)");
    bbn->add_option("--model", cfg.model_path, "model file (default built in)");
    add_common(bbn);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (pv->parsed()) {
            return cmd_pv_curve(cfg, points, trials);
        }
        if (bench->parsed()) {
            return cmd_sbg_bench(cfg, bench_seeds);
        }
        if (nrun->parsed()) {
            return cmd_netlist_run(cfg);
        }
        if (fusion->parsed()) {
            return cmd_fusion(cfg, grid_flag, lengths, kl_seeds);
        }
        if (bbn->parsed()) {
            return cmd_bbn(cfg, evidence_text);
        }
    } catch (const sb::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const sb::DegenerateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const sb::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const sb::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
