#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stochbayes/mtj.hpp"
#include "stochbayes/netlist.hpp"

namespace stochbayes {

/// Parameters of the five-node heart-disease belief network:
/// exercise (E) and diet (D) are parents of heart disease (HD); blood
/// pressure (BP, called HB in some sources) and chest pain (CP) are its
/// children.
///
/// The defaults mirror a common tutorial parameterization of this
/// network; every operation accepts any model file.
struct HeartBbn {
    double p_e = 0.25;  ///< P(E = yes)
    double p_d = 0.75;  ///< P(D = healthy)
    // P(HD = yes | E, D), suffix: E then D (y = exercises / healthy diet)
    double cpt_hd_yy = 0.25;
    double cpt_hd_yn = 0.45;
    double cpt_hd_ny = 0.55;
    double cpt_hd_nn = 0.75;
    // P(BP = high | HD)
    double cpt_bp_y = 0.85;
    double cpt_bp_n = 0.20;
    // P(CP = yes | HD)
    double cpt_cp_y = 0.75;
    double cpt_cp_n = 0.35;

    /// Throws std::invalid_argument when any parameter leaves [0,1].
    void validate() const;
};

/// Observation state of one variable. `Yes` stands for the positive level of
/// each node: E = exercises, D = healthy diet, BP = high pressure, CP = pain.
enum class Ternary { Yes, No, Unknown };

struct Evidence {
    Ternary e = Ternary::Unknown;
    Ternary d = Ternary::Unknown;
    Ternary bp = Ternary::Unknown;
    Ternary cp = Ternary::Unknown;
};

/// MUX control settings derived from evidence: ctrl1 carries the E branch
/// weight (1/0 when observed, else p_e), ctrl2 the D branch weight (else
/// p_d), ctrl3/ctrl4 flag whether the BP/CP likelihood factor is asserted
/// (1) or bypassed (0).
struct ControlSignals {
    double ctrl1 = 0.0;
    double ctrl2 = 0.0;
    double ctrl3 = 0.0;
    double ctrl4 = 0.0;
};

/// P(HD = yes) marginalized over the unobserved parents; an observed parent
/// contributes branch weight 1 for its observed value and 0 for the other.
double prior_hd(const HeartBbn& model, const Evidence& evidence);

/// P(HD = yes | evidence): symptom likelihood factors scale the prior, with
/// unobserved symptoms contributing factor 1. Throws DegenerateError when
/// the evidence has probability zero under the model.
double posterior_hd(const HeartBbn& model, const Evidence& evidence);

ControlSignals control_signals(const HeartBbn& model, const Evidence& evidence);

/// Parent-marginalization circuit: the two inner MUXes pick the HD CPT
/// column by the D control, the outer MUX mixes them by the E control.
/// Census: exactly 3 MUX, 0 AND; single output "prior".
Netlist build_eq2_circuit(const HeartBbn& model, const ControlSignals& signals);

/// Posterior circuit: the prior subcircuit feeds two more MUXes that select
/// each symptom's CPT row per sampled HD state, and three AND gates combine
/// them into a numerator stream and a denominator stream (outputs "num",
/// "den"). A bypassed symptom (ctrl = 0) contributes probability-1 factor
/// sources. Census: exactly 3 AND + 5 MUX. The final division happens on
/// decoded counter values, not in the circuit.
Netlist build_eq3_circuit(const HeartBbn& model, const ControlSignals& signals,
                          const Evidence& evidence);

/// End-to-end stochastic inference: builds the control signals and circuit,
/// evaluates at the given stream length, and decodes. Uses the prior circuit
/// when no symptom is observed, otherwise the num/den ratio. Deterministic
/// per master_seed. Throws DegenerateError when the decoded denominator is 0.
double infer_stochastic(const HeartBbn& model, const Evidence& evidence, std::size_t length,
                        std::uint64_t master_seed, const MtjParams& params = {});

/// Model file reader; keys: p_e, p_d, cpt_hd_yy, cpt_hd_yn, cpt_hd_ny,
/// cpt_hd_nn, cpt_bp_y, cpt_bp_n, cpt_cp_y, cpt_cp_n. Missing keys keep the
/// defaults.
HeartBbn load_model(const std::string& path);

/// Parses evidence like "bp=high" or "e=y,d=unhealthy,cp=n". Keys e, d, bp,
/// cp; values y/n (aliases: yes/no, healthy/unhealthy for d, high/low for
/// bp) or unknown/u. Unlisted variables stay Unknown.
Evidence parse_evidence(const std::string& text);

/// The five standard report queries with their evidence sets. Labels name
/// the observed variables.
std::vector<std::pair<std::string, Evidence>> standard_queries();

} // namespace stochbayes
