#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stochbayes/bitstream.hpp"
#include "stochbayes/rng.hpp"

namespace stochbayes {

/// Behavioral constants of the MTJ switching model plus the calibrated
/// operating window of the bitstream generator.
///
/// The write pulse switches AP->P with probability
///     P(v, t) = 1 - exp(-t / tau(v)),   tau(v) = tau0 * exp(delta * (1 - v/vc0)),
/// the thermally activated (Neel-Brown) switching law. The defaults are
/// calibrated so that over [v_min, v_max] at the 5 ns write pulse the P-V
/// curve rises from below 0.05 to above 0.95 and stays within 0.15 of the
/// straight line through its endpoints.
struct MtjParams {
    double tau0_s = 1e-9;    ///< attempt time
    double delta = 29.6;     ///< thermal stability factor
    double vc0_v = 1.34;     ///< critical voltage
    double v_min_v = 1.13;   ///< lower end of calibrated window
    double v_max_v = 1.36;   ///< upper end of calibrated window
    double t_write_s = 5e-9; ///< write pulse duration
    double t_reset_s = 10e-9;///< reset pulse duration (guarantees AP)

    // Device-to-device variation: relative lognormal spread of tau0 and
    // delta, resolved once per SBG instance from its seed. Off by default.
    double tau0_spread = 0.0;
    double delta_spread = 0.0;

    // System-level cost constants used by the resource reporter.
    double t_cycle_ns = 40.0;  ///< reset + write + read period per bit
    double e_cycle_pj = 6.0;   ///< energy per SBG cycle, unvalidated estimate

    /// Throws std::invalid_argument when a constant is out of range.
    void validate() const;
};

/// Free-layer orientation; AP reads as 0, P reads as 1.
enum class MtjState { P, AP };

/// One stochastic bitstream generator: an MTJ biased at a fixed write
/// voltage with its own seeded generator state.
struct SbgNode {
    std::string id;
    double bias_voltage = 0.0;
    std::uint64_t seed = 0;
    MtjParams params;
};

/// Switching probability of a write pulse of amplitude v and duration t.
/// Strictly increasing in both arguments, in (0, 1). Throws
/// std::invalid_argument for non-positive v or t.
Probability switching_probability(double v, double t, const MtjParams& params = {});

/// Analytic P-V curve at t_write over n_points evenly spaced voltages in
/// [v_min, v_max]. n_points must be >= 2.
std::vector<std::pair<double, Probability>> pv_curve(const MtjParams& params, int n_points);

struct VoltageForProbability {
    double voltage = 0.0;
    bool clamped = false; ///< requested p was outside [P(v_min), P(v_max)]
};

/// Monotone inverse of switching_probability at t_write, solved by bisection
/// to |P(v) - p| <= 1e-9. Probabilities outside the achievable window are
/// clamped to the nearest endpoint and reported via `clamped`.
VoltageForProbability voltage_for_probability(Probability p, const MtjParams& params = {});

/// Constants of the physical device the node stands for: a copy of
/// node.params with any tau0/delta variation resolved from the node's seed.
/// With both spreads at 0 this is node.params unchanged.
MtjParams device_instance_params(const SbgNode& node);

/// One reset/write/read cycle. Reset drives the state to AP unconditionally
/// (the 10 ns reset pulse switches at 100%), the write pulse then switches
/// AP->P with switching_probability(bias, t_write), and the read returns the
/// final state: 1 for P, 0 for AP.
int sbg_cycle(const SbgNode& node, MtjState& state, SplitMix64& rng);

/// n consecutive sbg_cycle draws from the node's own seeded generator.
/// Deterministic for a fixed (seed, bias) pair. n must be >= 1.
Bitstream generate(const SbgNode& node, std::size_t n);

/// Monte-Carlo estimate of the switching probability: the fraction of
/// `trials` simulated write pulses at voltage v that switch. trials >= 1.
Probability mc_probability(double v, int trials, const MtjParams& params, std::uint64_t seed);

/// Reads a device config file (key = value per line, '#' comments).
/// Documented keys: tau0_s, delta, vc0_v, v_min_v, v_max_v, t_write_ns,
/// t_reset_ns; optional t_cycle_ns, e_cycle_pj. Missing keys keep their
/// defaults.
MtjParams load_device_config(const std::string& path);

} // namespace stochbayes
