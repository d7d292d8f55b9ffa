#include "stochbayes/bbn.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

#include "stochbayes/config.hpp"
#include "stochbayes/errors.hpp"

namespace stochbayes {

namespace {

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " outside [0,1]");
    }
}

/// Likelihood factor pair (given HD = yes, HD = no) for one symptom;
/// unobserved symptoms contribute the neutral factor 1.
std::pair<double, double> symptom_factors(Ternary observed, double p_given_yes,
                                          double p_given_no) {
    switch (observed) {
        case Ternary::Yes: return {p_given_yes, p_given_no};
        case Ternary::No: return {1.0 - p_given_yes, 1.0 - p_given_no};
        case Ternary::Unknown: return {1.0, 1.0};
    }
    return {1.0, 1.0};
}

} // namespace

void HeartBbn::validate() const {
    check_unit(p_e, "p_e");
    check_unit(p_d, "p_d");
    check_unit(cpt_hd_yy, "cpt_hd_yy");
    check_unit(cpt_hd_yn, "cpt_hd_yn");
    check_unit(cpt_hd_ny, "cpt_hd_ny");
    check_unit(cpt_hd_nn, "cpt_hd_nn");
    check_unit(cpt_bp_y, "cpt_bp_y");
    check_unit(cpt_bp_n, "cpt_bp_n");
    check_unit(cpt_cp_y, "cpt_cp_y");
    check_unit(cpt_cp_n, "cpt_cp_n");
}

double prior_hd(const HeartBbn& model, const Evidence& evidence) {
    const double we = evidence.e == Ternary::Unknown ? model.p_e
                                                     : (evidence.e == Ternary::Yes ? 1.0 : 0.0);
    const double wd = evidence.d == Ternary::Unknown ? model.p_d
                                                     : (evidence.d == Ternary::Yes ? 1.0 : 0.0);
    return we * (wd * model.cpt_hd_yy + (1.0 - wd) * model.cpt_hd_yn) +
           (1.0 - we) * (wd * model.cpt_hd_ny + (1.0 - wd) * model.cpt_hd_nn);
}

double posterior_hd(const HeartBbn& model, const Evidence& evidence) {
    const double prior = prior_hd(model, evidence);
    const auto [bp_y, bp_n] = symptom_factors(evidence.bp, model.cpt_bp_y, model.cpt_bp_n);
    const auto [cp_y, cp_n] = symptom_factors(evidence.cp, model.cpt_cp_y, model.cpt_cp_n);
    const double numerator = bp_y * cp_y * prior;
    const double denominator = numerator + bp_n * cp_n * (1.0 - prior);
    if (denominator == 0.0) {
        throw DegenerateError("posterior_hd: evidence has probability 0 under the model");
    }
    return numerator / denominator;
}

ControlSignals control_signals(const HeartBbn& model, const Evidence& evidence) {
    ControlSignals s;
    s.ctrl1 = evidence.e == Ternary::Unknown ? model.p_e
                                             : (evidence.e == Ternary::Yes ? 1.0 : 0.0);
    s.ctrl2 = evidence.d == Ternary::Unknown ? model.p_d
                                             : (evidence.d == Ternary::Yes ? 1.0 : 0.0);
    s.ctrl3 = evidence.bp == Ternary::Unknown ? 0.0 : 1.0;
    s.ctrl4 = evidence.cp == Ternary::Unknown ? 0.0 : 1.0;
    return s;
}

Netlist build_eq2_circuit(const HeartBbn& model, const ControlSignals& signals) {
    Netlist nl;
    nl.add_probability_source("hd_yy", model.cpt_hd_yy);
    nl.add_probability_source("hd_yn", model.cpt_hd_yn);
    nl.add_probability_source("hd_ny", model.cpt_hd_ny);
    nl.add_probability_source("hd_nn", model.cpt_hd_nn);
    nl.add_probability_source("ctrl_d", signals.ctrl2);
    nl.add_probability_source("ctrl_e", signals.ctrl1);
    nl.add_mux("mix_d_when_e", "hd_yy", "hd_yn", "ctrl_d");
    nl.add_mux("mix_d_when_not_e", "hd_ny", "hd_nn", "ctrl_d");
    nl.add_mux("prior", "mix_d_when_e", "mix_d_when_not_e", "ctrl_e");
    nl.add_output("prior");
    return nl;
}

Netlist build_eq3_circuit(const HeartBbn& model, const ControlSignals& signals,
                          const Evidence& evidence) {
    const auto [bp_y, bp_n] = symptom_factors(evidence.bp, model.cpt_bp_y, model.cpt_bp_n);
    const auto [cp_y, cp_n] = symptom_factors(evidence.cp, model.cpt_cp_y, model.cpt_cp_n);

    Netlist nl = build_eq2_circuit(model, signals);
    nl.outputs.clear();
    nl.add_probability_source("bp_if_hd", bp_y);
    nl.add_probability_source("bp_if_not_hd", bp_n);
    nl.add_probability_source("cp_if_hd", cp_y);
    nl.add_probability_source("cp_if_not_hd", cp_n);
    // Per bit: the sampled HD state (the prior stream) picks which CPT row
    // each symptom factor is drawn from, so ANDing the picks reproduces the
    // law of total probability for the denominator, and ANDing the prior
    // back in keeps only the HD = yes bits for the numerator.
    nl.add_mux("bp_factor", "bp_if_hd", "bp_if_not_hd", "prior");
    nl.add_mux("cp_factor", "cp_if_hd", "cp_if_not_hd", "prior");
    nl.add_and("bp_and_prior", "bp_factor", "prior");
    nl.add_and("num", "bp_and_prior", "cp_factor");
    nl.add_and("den", "bp_factor", "cp_factor");
    nl.add_output("num");
    nl.add_output("den");
    return nl;
}

double infer_stochastic(const HeartBbn& model, const Evidence& evidence, std::size_t length,
                        std::uint64_t master_seed, const MtjParams& params) {
    model.validate();
    const ControlSignals signals = control_signals(model, evidence);
    if (evidence.bp == Ternary::Unknown && evidence.cp == Ternary::Unknown) {
        const Netlist nl = build_eq2_circuit(model, signals);
        return evaluate(nl, length, master_seed, params).probabilities.front();
    }
    const Netlist nl = build_eq3_circuit(model, signals, evidence);
    const EvalResult result = evaluate(nl, length, master_seed, params);
    const std::size_t num = result.streams[0].popcount();
    const std::size_t den = result.streams[1].popcount();
    if (den == 0) {
        throw DegenerateError("infer_stochastic: decoded denominator is zero");
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

HeartBbn load_model(const std::string& path) {
    const KeyValueFile kv = KeyValueFile::load(path);
    HeartBbn model;
    model.p_e = kv.get_double("p_e", model.p_e);
    model.p_d = kv.get_double("p_d", model.p_d);
    model.cpt_hd_yy = kv.get_double("cpt_hd_yy", model.cpt_hd_yy);
    model.cpt_hd_yn = kv.get_double("cpt_hd_yn", model.cpt_hd_yn);
    model.cpt_hd_ny = kv.get_double("cpt_hd_ny", model.cpt_hd_ny);
    model.cpt_hd_nn = kv.get_double("cpt_hd_nn", model.cpt_hd_nn);
    model.cpt_bp_y = kv.get_double("cpt_bp_y", model.cpt_bp_y);
    model.cpt_bp_n = kv.get_double("cpt_bp_n", model.cpt_bp_n);
    model.cpt_cp_y = kv.get_double("cpt_cp_y", model.cpt_cp_y);
    model.cpt_cp_n = kv.get_double("cpt_cp_n", model.cpt_cp_n);
    model.validate();
    return model;
}

Evidence parse_evidence(const std::string& text) {
    Evidence evidence;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) {
            continue;
        }
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("evidence item needs key=value: '" + item + "'");
        }
        std::string key = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        for (auto& c : value) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

        Ternary state;
        if (value == "y" || value == "yes" || value == "healthy" || value == "high") {
            state = Ternary::Yes;
        } else if (value == "n" || value == "no" || value == "unhealthy" || value == "low") {
            state = Ternary::No;
        } else if (value == "u" || value == "unknown") {
            state = Ternary::Unknown;
        } else {
            throw std::invalid_argument("evidence value '" + value + "' for '" + key +
                                        "' (want y/n/unknown)");
        }
        if (key == "e") {
            evidence.e = state;
        } else if (key == "d") {
            evidence.d = state;
        } else if (key == "bp") {
            evidence.bp = state;
        } else if (key == "cp") {
            evidence.cp = state;
        } else {
            throw std::invalid_argument("unknown evidence variable '" + key + "'");
        }
    }
    return evidence;
}

std::vector<std::pair<std::string, Evidence>> standard_queries() {
    std::vector<std::pair<std::string, Evidence>> queries;
    queries.emplace_back("p(HD|BP)", parse_evidence("bp=high"));
    queries.emplace_back("p(HD|D,E,BP)", parse_evidence("e=y,d=healthy,bp=high"));
    queries.emplace_back("p(HD|D,BP)", parse_evidence("d=healthy,bp=high"));
    queries.emplace_back("p(HD|D,E,BP,CP)", parse_evidence("e=y,d=healthy,bp=high,cp=y"));
    queries.emplace_back("p(HD|CP)", parse_evidence("cp=y"));
    return queries;
}

} // namespace stochbayes
