#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stochbayes/bitstream.hpp"
#include "stochbayes/errors.hpp"
#include "stochbayes/mtj.hpp"

namespace stochbayes {

/// A bitstream source: an SBG biased either directly by voltage or by a
/// probability that is converted through the P-V inverse.
struct SbgSource {
    std::string id;
    std::optional<double> probability;
    std::optional<double> voltage;
};

enum class GateKind { And, Mux };

struct Gate {
    GateKind kind = GateKind::And;
    std::string id;
    std::string a;
    std::string b;
    std::string sel; ///< only for Mux; sel bit 1 selects input a
};

struct Diagnostic {
    std::string message;
    int line = 0; ///< 0 when the netlist was built programmatically
};

/// Gate-level stochastic circuit: SBG sources feeding a DAG of AND and MUX
/// gates, with counters attached to the named outputs.
///
/// Text format (one directive per line, '#' starts a comment):
///     sbg <id> p=<float>      probability source
///     sbg <id> v=<float>      voltage source
///     and <id> <a> <b>
///     mux <id> <a> <b> <sel>  sel = 1 selects <a>
///     out <id>                attach a counter
struct Netlist {
    std::vector<SbgSource> sources;
    std::vector<Gate> gates;
    std::vector<std::string> outputs;
    std::vector<Diagnostic> warnings; ///< non-fatal: correlation hazards etc.

    void add_probability_source(std::string id, double p);
    void add_voltage_source(std::string id, double v);
    void add_and(std::string id, std::string a, std::string b);
    void add_mux(std::string id, std::string a, std::string b, std::string sel);
    void add_output(std::string id);
};

/// Parses netlist text. Throws ParseError (naming the line) on unknown
/// directives, duplicate ids, references to undefined nodes, or malformed
/// numbers. Degenerate-but-legal constructs such as `and c a a` parse fine
/// and are recorded in `warnings`.
Netlist parse_netlist(std::string_view text);

/// Structural checks: unique ids, defined references, acyclicity, at least
/// one output, source values in range (probabilities in [0,1], voltages in
/// the calibrated window). Returns every violation found, never stopping at
/// the first; an empty vector means the netlist is valid.
std::vector<Diagnostic> validate(const Netlist& netlist, const MtjParams& params = {});

struct EvalResult {
    std::vector<std::string> output_ids;
    std::vector<Bitstream> streams;      ///< one per output, same order
    std::vector<double> probabilities;   ///< counter decode, popcount/length
    std::size_t length = 0;
    std::uint64_t master_seed = 0;
    int clamped_sources = 0; ///< probability sources outside the P-V window
};

/// Evaluates the netlist at the given stream length. Every source generates
/// its stream from a seed derived from (master_seed, source id), so results
/// are reproducible and independent of evaluation schedule; gates are applied
/// word-parallel in topological order, bit-identical to the bit-serial
/// definition. Throws ValidationError when validate() reports problems and
/// std::invalid_argument for length < 1.
EvalResult evaluate(const Netlist& netlist, std::size_t length, std::uint64_t master_seed,
                    const MtjParams& params = {});

struct ResourceReport {
    std::size_t n_sbg = 0;
    std::size_t n_and = 0;
    std::size_t n_mux = 0;
    double latency_ns = 0.0;
    double energy_mj = 0.0; ///< n_sbg * N * e_cycle; estimate only, not validated
};

/// Gate census plus latency (t_cycle_ns per generated bit; every SBG and
/// gate operates in parallel) and an unvalidated energy estimate.
ResourceReport resource_report(const Netlist& netlist, std::size_t length,
                               const MtjParams& params = {});

/// Writes `output_id,probability,popcount,length` rows.
void write_eval_csv(const EvalResult& result, std::ostream& out);

} // namespace stochbayes
