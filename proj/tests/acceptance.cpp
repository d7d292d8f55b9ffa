// Acceptance suite: exercises every release criterion end to end and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
//
// Usage: acceptance --cli <path-to-stochbayes-binary> --root <repo-root>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stochbayes/bbn.hpp"
#include "stochbayes/bitstream.hpp"
#include "stochbayes/fusion.hpp"
#include "stochbayes/mtj.hpp"
#include "stochbayes/netlist.hpp"
#include "stochbayes/rng.hpp"
#include "oracles.hpp"

using namespace stochbayes;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%d] %-22s %s  %s\n", id, name.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) {
        ++g_failures;
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------- criteria

// 1: analytic P-V curve monotone, spanning <=0.05 .. >=0.95, within 0.15 of
//    its endpoint chord.
void criterion_pv_curve() {
    const MtjParams params;
    const auto curve = pv_curve(params, 24);
    bool increasing = true;
    double max_dev = 0.0;
    const double p0 = curve.front().second.value();
    const double p1 = curve.back().second.value();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (i > 0 && curve[i].second.value() <= curve[i - 1].second.value()) {
            increasing = false;
        }
        const double chord = p0 + (p1 - p0) * (curve[i].first - curve.front().first) /
                                      (curve.back().first - curve.front().first);
        max_dev = std::max(max_dev, std::abs(curve[i].second.value() - chord));
    }
    const bool pass = increasing && p0 <= 0.05 && p1 >= 0.95 && max_dev <= 0.15;
    report(1, "pv-monotone-linear", pass,
           "span " + fmt(p0) + ".." + fmt(p1) + ", max chord dev " + fmt(max_dev) +
               (increasing ? ", strictly increasing" : ", NOT increasing"));
}

// 2: representation MAE over a 24-voltage sweep, 50 seeds: decreasing in N
//    and at most twice the analytic half-normal expectation.
// 3: the same for AND products of two independently seeded streams.
void criterion_sbg_and_product_error() {
    const MtjParams params;
    const auto curve = pv_curve(params, 24);
    const int seeds = 50;
    std::vector<double> repr_mae, repr_lim, prod_mae, prod_lim;
    for (std::size_t n : {std::size_t{64}, std::size_t{128}, std::size_t{256}}) {
        std::vector<std::pair<double, double>> repr, prod;
        double repr_expected = 0.0, prod_expected = 0.0;
        for (std::size_t vi = 0; vi < curve.size(); ++vi) {
            const double v = curve[vi].first;
            const double p = curve[vi].second.value();
            repr_expected += oracle::expected_abs_error(p, double(n));
            prod_expected += oracle::expected_abs_error(p * p, double(n));
            for (int s = 1; s <= seeds; ++s) {
                const std::string tag = std::to_string(vi) + "_" + std::to_string(s);
                SbgNode node{"r" + tag, v, derive_seed(2024, "r" + tag), params};
                repr.emplace_back(p, estimate(generate(node, n)).value());
                SbgNode a{"a" + tag, v, derive_seed(2024, "a" + tag), params};
                SbgNode b{"b" + tag, v, derive_seed(2024, "b" + tag), params};
                prod.emplace_back(p * p,
                                  estimate(and_gate(generate(a, n), generate(b, n))).value());
            }
        }
        repr_mae.push_back(mean_abs_error(repr));
        repr_lim.push_back(2.0 * repr_expected / double(curve.size()));
        prod_mae.push_back(mean_abs_error(prod));
        prod_lim.push_back(2.0 * prod_expected / double(curve.size()));
    }
    const bool repr_ok = repr_mae[0] > repr_mae[1] && repr_mae[1] > repr_mae[2] &&
                         repr_mae[0] <= repr_lim[0] && repr_mae[1] <= repr_lim[1] &&
                         repr_mae[2] <= repr_lim[2];
    report(2, "sbg-representation", repr_ok,
           "mae " + fmt(repr_mae[0]) + "/" + fmt(repr_mae[1]) + "/" + fmt(repr_mae[2]) +
               " vs limits " + fmt(repr_lim[0]) + "/" + fmt(repr_lim[1]) + "/" + fmt(repr_lim[2]));
    const bool prod_ok = prod_mae[0] > prod_mae[1] && prod_mae[1] > prod_mae[2] &&
                         prod_mae[0] <= prod_lim[0] && prod_mae[1] <= prod_lim[1] &&
                         prod_mae[2] <= prod_lim[2];
    report(3, "and-product-accuracy", prod_ok,
           "mae " + fmt(prod_mae[0]) + "/" + fmt(prod_mae[1]) + "/" + fmt(prod_mae[2]) +
               " vs limits " + fmt(prod_lim[0]) + "/" + fmt(prod_lim[1]) + "/" + fmt(prod_lim[2]));
}

// 4: 1000 independently seeded SBG pairs at p = 0.5, N = 256: |Pearson|
//    within 3/sqrt(N) for at least 99% of pairs.
void criterion_correlation() {
    const MtjParams params;
    const std::size_t n = 256;
    const double v = voltage_for_probability(Probability(0.5), params).voltage;
    const double bound = 3.0 / std::sqrt(double(n));
    int ok = 0;
    for (int i = 0; i < 1000; ++i) {
        SbgNode a{"corr_a" + std::to_string(i), v,
                  derive_seed(77, "corr_a" + std::to_string(i)), params};
        SbgNode b{"corr_b" + std::to_string(i), v,
                  derive_seed(77, "corr_b" + std::to_string(i)), params};
        if (std::abs(correlation(generate(a, n), generate(b, n))) <= bound) {
            ++ok;
        }
    }
    report(4, "sbg-low-correlation", ok >= 990,
           std::to_string(ok) + "/1000 pairs within 3/sqrt(256) = " + fmt(bound));
}

// 5: fusion structure: exact gate census and exact 40T ns latency.
void criterion_fusion_structure() {
    const FusionScenario sc = default_scenario();
    const Netlist nl = build_fusion_netlist(sc.sensors, {64});
    const ResourceReport r256 = resource_report(nl, 256);
    const ResourceReport r64 = resource_report(nl, 64);
    const bool pass = r256.n_sbg == 24576 && r256.n_and == 20480 && r256.n_mux == 0 &&
                      r256.latency_ns == 40.0 * 256.0 && r64.latency_ns == 40.0 * 64.0;
    report(5, "fusion-structure", pass,
           "n_sbg=" + std::to_string(r256.n_sbg) + " n_and=" + std::to_string(r256.n_and) +
               " latency(256)=" + fmt(r256.latency_ns) + "ns");
}

// 6: fusion accuracy: seed-averaged KL (counters pooled over 16 master
//    seeds) within 3x of the reference table, monotone non-increasing in N,
//    and the exact 64x64 argmax within Chebyshev distance 2 of (28,29).
void criterion_fusion_accuracy() {
    const std::map<int, std::map<std::size_t, double>> reference = {
        {64, {{64, 0.0090}, {128, 0.0043}, {256, 0.0018}}},
        {32, {{64, 0.0086}, {128, 0.0041}, {256, 0.0019}}},
        {16, {{64, 0.0080}, {128, 0.0035}, {256, 0.0011}}},
    };
    const int pool_seeds = 16;
    bool pass = true;
    std::string detail;
    const FusionScenario base = default_scenario();
    for (int size : {16, 32, 64}) {
        const GridSpec grid{size};
        const PosteriorGrid exact = exact_posterior(base.sensors, grid);
        const Netlist nl = build_fusion_netlist(base.sensors, grid);
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t n : {std::size_t{64}, std::size_t{128}, std::size_t{256}}) {
            const PosteriorGrid pooled =
                accumulated_stochastic_posterior(nl, grid, n, 1000, pool_seeds);
            const double kl = kl_divergence(exact, pooled, n);
            const double limit = 3.0 * reference.at(size).at(n);
            if (kl > limit || kl > previous) {
                pass = false;
            }
            previous = kl;
            detail += std::to_string(size) + "/" + std::to_string(n) + ":" + fmt(kl) +
                      (kl <= limit ? "<=" : ">") + fmt(limit) + " ";
        }
    }
    const PosteriorGrid exact64 = exact_posterior(base.sensors, {64});
    const auto [ax, ay] = exact64.argmax();
    if (std::abs(ax - 28) > 2 || std::abs(ay - 29) > 2) {
        pass = false;
    }
    detail += "argmax=(" + std::to_string(ax) + "," + std::to_string(ay) + ")";
    report(6, "fusion-accuracy", pass, detail);
}

// 7: posterior_hd equals 2^5 joint enumeration on all 81 evidence cases.
void criterion_bbn_exact() {
    const HeartBbn model;
    const Ternary states[3] = {Ternary::Yes, Ternary::No, Ternary::Unknown};
    double worst = 0.0;
    for (Ternary e : states)
        for (Ternary d : states)
            for (Ternary bp : states)
                for (Ternary cp : states) {
                    const Evidence ev{e, d, bp, cp};
                    worst = std::max(worst, std::abs(posterior_hd(model, ev) -
                                                     oracle::bbn_enumeration(model, ev)));
                }
    report(7, "bbn-exactness", worst <= 1e-12, "worst |diff| = " + fmt(worst) + " over 81 cases");
}

// 8: circuit censuses, the five standard control tuples, and the
//    seed-averaged stochastic-vs-exact gap at N = 1024.
void criterion_bbn_circuits() {
    const HeartBbn model;
    bool pass = true;
    std::string detail;

    const Evidence none;
    const ResourceReport eq2 =
        resource_report(build_eq2_circuit(model, control_signals(model, none)), 64);
    if (eq2.n_mux != 3 || eq2.n_and != 0) {
        pass = false;
    }
    const Evidence bp_ev = parse_evidence("bp=high");
    const ResourceReport eq3 =
        resource_report(build_eq3_circuit(model, control_signals(model, bp_ev), bp_ev), 64);
    if (eq3.n_and != 3 || eq3.n_mux != 5) {
        pass = false;
    }
    detail += "eq2=" + std::to_string(eq2.n_mux) + "mux eq3=" + std::to_string(eq3.n_and) +
              "and+" + std::to_string(eq3.n_mux) + "mux ";

    const std::vector<std::vector<double>> expected_tuples = {
        {0.25, 0.75, 1.0, 0.0},
        {1.0, 1.0, 1.0, 0.0},
        {0.25, 1.0, 1.0, 0.0},
        {1.0, 1.0, 1.0, 1.0},
        {0.25, 0.75, 0.0, 1.0},
    };
    const auto queries = standard_queries();
    bool tuples_ok = queries.size() == expected_tuples.size();
    for (std::size_t i = 0; i < queries.size() && tuples_ok; ++i) {
        const ControlSignals s = control_signals(model, queries[i].second);
        tuples_ok = s.ctrl1 == expected_tuples[i][0] && s.ctrl2 == expected_tuples[i][1] &&
                    s.ctrl3 == expected_tuples[i][2] && s.ctrl4 == expected_tuples[i][3];
    }
    if (!tuples_ok) {
        pass = false;
    }
    detail += std::string("tuples ") + (tuples_ok ? "exact" : "WRONG") + " ";

    double worst_gap = 0.0;
    for (const auto& [name, ev] : queries) {
        const double exact = posterior_hd(model, ev);
        double gap_sum = 0.0;
        const int seeds = 20;
        for (int s = 1; s <= seeds; ++s) {
            gap_sum += std::abs(infer_stochastic(model, ev, 1024, 4000 + s) - exact);
        }
        worst_gap = std::max(worst_gap, gap_sum / seeds);
    }
    if (worst_gap > 0.05) {
        pass = false;
    }
    detail += "worst seed-avg gap " + fmt(worst_gap) + " @N=1024";
    report(8, "bbn-circuits", pass, detail);
}

// 9: byte-identical outputs across reruns and across thread counts.
struct CliCase {
    std::string name;
    std::string args; // without --out
    std::vector<std::string> outputs;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_determinism(const std::string& cli) {
    if (std::system("rm -rf acceptance_tmp && mkdir -p acceptance_tmp") != 0) {
        report(9, "determinism", false, "could not create scratch directory");
        return;
    }
    {
        std::ofstream nl("acceptance_tmp/demo.nl");
        nl << "sbg a p=0.5\nsbg b p=0.25\nsbg s p=0.5\nand c a b\nmux m c b s\nout m\nout c\n";
    }
    const std::vector<CliCase> cases = {
        {"pv", "pv-curve --points 8 --trials 200 --seed 3", {"pv.csv"}},
        {"bench", "sbg-bench --seeds 3 --seed 5", {"bench.csv"}},
        {"netlist", "netlist-run acceptance_tmp/demo.nl --length 128 --seed 7", {"net.csv"}},
        {"fusion",
         "fusion --grid 16 --length 64 --kl-seeds 3 --seed 9",
         {"fus_exact.csv", "fus_stoch64.csv", "fus_kl.csv"}},
        {"bbn", "bbn --length 256 --seed 11", {"bbn.csv"}},
    };
    bool pass = true;
    std::string detail;
    for (const CliCase& c : cases) {
        std::map<std::string, std::string> reference;
        for (const char* threads : {"1", "4", "1"}) { // rerun at 1 to catch hidden state
            std::string out_arg = "acceptance_tmp/" + c.outputs[0];
            if (c.name == "fusion") {
                out_arg = "acceptance_tmp/fus"; // prefix
            }
            const std::string cmd = std::string("STOCHBAYES_THREADS=") + threads + " " + cli +
                                    " " + c.args + " --out " + out_arg + " > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) {
                pass = false;
                detail += c.name + ":exit!=0 ";
                break;
            }
            for (const std::string& file : c.outputs) {
                const std::string content = slurp("acceptance_tmp/" + file);
                if (content.empty()) {
                    pass = false;
                    detail += c.name + ":" + file + " empty ";
                } else if (auto it = reference.find(file); it == reference.end()) {
                    reference[file] = content;
                } else if (it->second != content) {
                    pass = false;
                    detail += c.name + ":" + file + " differs ";
                }
            }
        }
    }
    if (pass) {
        detail = "5 subcommands x {threads 1, threads 4, rerun}: output bytes identical";
    }
    report(9, "determinism", pass, detail);
}

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    std::string root;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--cli") {
            cli = argv[i + 1];
        } else if (flag == "--root") {
            root = argv[i + 1];
        }
    }
    (void)root;

    criterion_pv_curve();
    criterion_sbg_and_product_error();
    criterion_correlation();
    criterion_fusion_structure();
    criterion_fusion_accuracy();
    criterion_bbn_exact();
    criterion_bbn_circuits();
    if (cli.empty()) {
        report(9, "determinism", false, "no --cli path given");
    } else {
        criterion_determinism(cli);
    }

    if (g_failures == 0) {
        std::printf("acceptance: all 9 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
