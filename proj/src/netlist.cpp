#include "stochbayes/netlist.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "stochbayes/format.hpp"
#include "stochbayes/parallel.hpp"
#include "stochbayes/rng.hpp"

namespace stochbayes {

void Netlist::add_probability_source(std::string id, double p) {
    sources.push_back({std::move(id), p, std::nullopt});
}

void Netlist::add_voltage_source(std::string id, double v) {
    sources.push_back({std::move(id), std::nullopt, v});
}

void Netlist::add_and(std::string id, std::string a, std::string b) {
    gates.push_back({GateKind::And, std::move(id), std::move(a), std::move(b), {}});
}

void Netlist::add_mux(std::string id, std::string a, std::string b, std::string sel) {
    gates.push_back({GateKind::Mux, std::move(id), std::move(a), std::move(b), std::move(sel)});
}

void Netlist::add_output(std::string id) {
    outputs.push_back(std::move(id));
}

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        tokens.push_back(tok);
    }
    return tokens;
}

double parse_number(const std::string& text, int lineno, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::exception&) {
        throw ParseError(lineno, std::string("bad ") + what + " value '" + text + "'");
    }
}

void warn_repeated_inputs(Netlist& nl, const Gate& g, int lineno) {
    const bool repeated = (g.a == g.b) ||
                          (g.kind == GateKind::Mux && (g.sel == g.a || g.sel == g.b));
    if (repeated) {
        nl.warnings.push_back({"gate '" + g.id +
                                   "' uses node '" + g.a +
                                   "' on more than one input; identical inputs are fully "
                                   "correlated and the output will not decode to a product",
                               lineno});
    }
}

} // namespace

Netlist parse_netlist(std::string_view text) {
    Netlist nl;
    std::unordered_set<std::string> defined;
    std::unordered_set<std::string> already_output;

    auto require_defined = [&](const std::string& id, int lineno) {
        if (!defined.count(id)) {
            throw ParseError(lineno, "reference to undefined node '" + id + "'");
        }
    };
    auto define = [&](const std::string& id, int lineno) {
        if (!defined.insert(id).second) {
            throw ParseError(lineno, "duplicate node id '" + id + "'");
        }
    };

    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const auto tokens = split_tokens(line);
        if (tokens.empty()) {
            continue;
        }
        const std::string& directive = tokens[0];
        if (directive == "sbg") {
            if (tokens.size() != 3) {
                throw ParseError(lineno, "expected 'sbg <id> p=<float>' or 'sbg <id> v=<float>'");
            }
            const std::string& spec = tokens[2];
            if (spec.rfind("p=", 0) == 0) {
                define(tokens[1], lineno);
                nl.add_probability_source(tokens[1], parse_number(spec.substr(2), lineno, "probability"));
            } else if (spec.rfind("v=", 0) == 0) {
                define(tokens[1], lineno);
                nl.add_voltage_source(tokens[1], parse_number(spec.substr(2), lineno, "voltage"));
            } else {
                throw ParseError(lineno, "source needs p=<float> or v=<float>, got '" + spec + "'");
            }
        } else if (directive == "and") {
            if (tokens.size() != 4) {
                throw ParseError(lineno, "expected 'and <id> <a> <b>'");
            }
            require_defined(tokens[2], lineno);
            require_defined(tokens[3], lineno);
            define(tokens[1], lineno);
            nl.add_and(tokens[1], tokens[2], tokens[3]);
            warn_repeated_inputs(nl, nl.gates.back(), lineno);
        } else if (directive == "mux") {
            if (tokens.size() != 5) {
                throw ParseError(lineno, "expected 'mux <id> <a> <b> <sel>'");
            }
            require_defined(tokens[2], lineno);
            require_defined(tokens[3], lineno);
            require_defined(tokens[4], lineno);
            define(tokens[1], lineno);
            nl.add_mux(tokens[1], tokens[2], tokens[3], tokens[4]);
            warn_repeated_inputs(nl, nl.gates.back(), lineno);
        } else if (directive == "out") {
            if (tokens.size() != 2) {
                throw ParseError(lineno, "expected 'out <id>'");
            }
            require_defined(tokens[1], lineno);
            if (!already_output.insert(tokens[1]).second) {
                throw ParseError(lineno, "duplicate output '" + tokens[1] + "'");
            }
            nl.add_output(tokens[1]);
        } else {
            throw ParseError(lineno, "unknown directive '" + directive + "'");
        }
    }
    return nl;
}

namespace {

struct NodeTable {
    // node index: sources first, then gates, in declaration order
    std::unordered_map<std::string, std::size_t> index;
    std::size_t n_sources = 0;

    static NodeTable build(const Netlist& nl, std::vector<Diagnostic>* diags) {
        NodeTable t;
        t.n_sources = nl.sources.size();
        auto add = [&](const std::string& id, std::size_t idx) {
            if (!t.index.emplace(id, idx).second && diags) {
                diags->push_back({"duplicate node id '" + id + "'"});
            }
        };
        for (std::size_t i = 0; i < nl.sources.size(); ++i) {
            add(nl.sources[i].id, i);
        }
        for (std::size_t i = 0; i < nl.gates.size(); ++i) {
            add(nl.gates[i].id, t.n_sources + i);
        }
        return t;
    }
};

std::vector<const std::string*> gate_inputs(const Gate& g) {
    if (g.kind == GateKind::And) {
        return {&g.a, &g.b};
    }
    return {&g.a, &g.b, &g.sel};
}

/// Kahn topological order over gate indices, stable by declaration order.
/// Returns nullopt when the gate graph has a cycle.
std::optional<std::vector<std::size_t>> gate_topo_order(const Netlist& nl,
                                                        const NodeTable& table) {
    const std::size_t n_gates = nl.gates.size();
    std::vector<int> pending(n_gates, 0);
    std::vector<std::vector<std::size_t>> dependents(n_gates);
    for (std::size_t g = 0; g < n_gates; ++g) {
        for (const std::string* input : gate_inputs(nl.gates[g])) {
            auto it = table.index.find(*input);
            if (it == table.index.end() || it->second < table.n_sources) {
                continue; // undefined refs are reported elsewhere; sources are always ready
            }
            const std::size_t dep_gate = it->second - table.n_sources;
            ++pending[g];
            dependents[dep_gate].push_back(g);
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t g = 0; g < n_gates; ++g) {
        if (pending[g] == 0) {
            ready.push(g);
        }
    }
    std::vector<std::size_t> order;
    order.reserve(n_gates);
    while (!ready.empty()) {
        const std::size_t g = ready.top();
        ready.pop();
        order.push_back(g);
        for (std::size_t d : dependents[g]) {
            if (--pending[d] == 0) {
                ready.push(d);
            }
        }
    }
    if (order.size() != n_gates) {
        return std::nullopt;
    }
    return order;
}

} // namespace

std::vector<Diagnostic> validate(const Netlist& netlist, const MtjParams& params) {
    std::vector<Diagnostic> diags;
    const NodeTable table = NodeTable::build(netlist, &diags);

    for (const SbgSource& src : netlist.sources) {
        if (src.probability.has_value() == src.voltage.has_value()) {
            diags.push_back({"source '" + src.id + "' must set exactly one of probability or voltage"});
            continue;
        }
        if (src.probability && !(*src.probability >= 0.0 && *src.probability <= 1.0)) {
            diags.push_back({"source '" + src.id + "' probability " + fmt_double(*src.probability) +
                             " outside [0,1]"});
        }
        if (src.voltage && !(*src.voltage >= params.v_min_v && *src.voltage <= params.v_max_v)) {
            diags.push_back({"source '" + src.id + "' voltage " + fmt_double(*src.voltage) +
                             " outside calibrated window [" + fmt_double(params.v_min_v) + ", " +
                             fmt_double(params.v_max_v) + "]"});
        }
    }

    for (const Gate& g : netlist.gates) {
        for (const std::string* input : gate_inputs(g)) {
            if (!table.index.count(*input)) {
                diags.push_back({"gate '" + g.id + "' references undefined node '" + *input + "'"});
            }
        }
    }

    if (netlist.outputs.empty()) {
        diags.push_back({"netlist has no outputs"});
    }
    for (const std::string& out : netlist.outputs) {
        if (!table.index.count(out)) {
            diags.push_back({"output references undefined node '" + out + "'"});
        }
    }

    if (!gate_topo_order(netlist, table)) {
        diags.push_back({"gate graph contains a cycle"});
    }
    return diags;
}

EvalResult evaluate(const Netlist& netlist, std::size_t length, std::uint64_t master_seed,
                    const MtjParams& params) {
    if (length < 1) {
        throw std::invalid_argument("evaluate: stream length must be >= 1");
    }
    if (const auto diags = validate(netlist, params); !diags.empty()) {
        throw ValidationError("invalid netlist: " + diags.front().message +
                              (diags.size() > 1
                                   ? " (+" + std::to_string(diags.size() - 1) + " more)"
                                   : ""));
    }

    const NodeTable table = NodeTable::build(netlist, nullptr);
    std::vector<std::optional<Bitstream>> streams(netlist.sources.size() + netlist.gates.size());

    // Sources are independent: each one derives its own seed from
    // (master_seed, id), so the schedule cannot affect the bits.
    std::vector<int> clamped(netlist.sources.size(), 0);
    parallel_for(netlist.sources.size(), [&](std::size_t i) {
        const SbgSource& src = netlist.sources[i];
        // Exact rails: p = 0 and p = 1 stand for a gated-off / saturated
        // write pulse, not a bias voltage, so they emit constant streams.
        if (src.probability && (*src.probability == 0.0 || *src.probability == 1.0)) {
            Bitstream bs(length);
            if (*src.probability == 1.0) {
                for (auto& w : bs.words()) {
                    w = ~std::uint64_t{0};
                }
                bs.mask_tail();
            }
            streams[i] = std::move(bs);
            return;
        }
        SbgNode node;
        node.id = src.id;
        node.seed = derive_seed(master_seed, src.id);
        node.params = params;
        if (src.voltage) {
            node.bias_voltage = *src.voltage;
        } else {
            const auto v = voltage_for_probability(Probability(*src.probability), params);
            node.bias_voltage = v.voltage;
            clamped[i] = v.clamped ? 1 : 0;
        }
        streams[i] = generate(node, length);
    });

    const auto order = gate_topo_order(netlist, table);
    for (std::size_t g : *order) {
        const Gate& gate = netlist.gates[g];
        const Bitstream& a = *streams[table.index.at(gate.a)];
        const Bitstream& b = *streams[table.index.at(gate.b)];
        if (gate.kind == GateKind::And) {
            streams[table.n_sources + g] = and_gate(a, b);
        } else {
            const Bitstream& sel = *streams[table.index.at(gate.sel)];
            streams[table.n_sources + g] = mux_gate(a, b, sel);
        }
    }

    EvalResult result;
    result.length = length;
    result.master_seed = master_seed;
    for (int c : clamped) {
        result.clamped_sources += c;
    }
    result.output_ids = netlist.outputs;
    result.streams.reserve(netlist.outputs.size());
    result.probabilities.reserve(netlist.outputs.size());
    for (const std::string& out : netlist.outputs) {
        const Bitstream& bs = *streams[table.index.at(out)];
        result.streams.push_back(bs);
        result.probabilities.push_back(estimate(bs).value());
    }
    return result;
}

ResourceReport resource_report(const Netlist& netlist, std::size_t length,
                               const MtjParams& params) {
    ResourceReport report;
    report.n_sbg = netlist.sources.size();
    for (const Gate& g : netlist.gates) {
        if (g.kind == GateKind::And) {
            ++report.n_and;
        } else {
            ++report.n_mux;
        }
    }
    report.latency_ns = params.t_cycle_ns * static_cast<double>(length);
    report.energy_mj = static_cast<double>(report.n_sbg) * static_cast<double>(length) *
                       params.e_cycle_pj * 1e-9;
    return report;
}

void write_eval_csv(const EvalResult& result, std::ostream& out) {
    out << "output_id,probability,popcount,length\n";
    for (std::size_t i = 0; i < result.output_ids.size(); ++i) {
        out << result.output_ids[i] << ',' << fmt_double(result.probabilities[i]) << ','
            << result.streams[i].popcount() << ',' << result.length << '\n';
    }
}

} // namespace stochbayes
