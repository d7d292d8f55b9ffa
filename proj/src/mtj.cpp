#include "stochbayes/mtj.hpp"

#include <cmath>
#include <stdexcept>

#include "stochbayes/config.hpp"

namespace stochbayes {

void MtjParams::validate() const {
    if (!(tau0_s > 0.0)) throw std::invalid_argument("tau0_s must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
    if (!(vc0_v > 0.0)) throw std::invalid_argument("vc0_v must be > 0");
    if (!(v_min_v < v_max_v)) throw std::invalid_argument("v_min_v must be < v_max_v");
    if (!(t_write_s > 0.0)) throw std::invalid_argument("t_write_s must be > 0");
    if (!(t_reset_s > 0.0)) throw std::invalid_argument("t_reset_s must be > 0");
    if (!(tau0_spread >= 0.0)) throw std::invalid_argument("tau0_spread must be >= 0");
    if (!(delta_spread >= 0.0)) throw std::invalid_argument("delta_spread must be >= 0");
    if (!(t_cycle_ns > 0.0)) throw std::invalid_argument("t_cycle_ns must be > 0");
    if (!(e_cycle_pj >= 0.0)) throw std::invalid_argument("e_cycle_pj must be >= 0");
}

Probability switching_probability(double v, double t, const MtjParams& params) {
    if (!(v > 0.0)) throw std::invalid_argument("switching_probability: voltage must be > 0");
    if (!(t > 0.0)) throw std::invalid_argument("switching_probability: duration must be > 0");
    const double tau = params.tau0_s * std::exp(params.delta * (1.0 - v / params.vc0_v));
    // -expm1 keeps precision near P = 0.
    return Probability(-std::expm1(-t / tau));
}

std::vector<std::pair<double, Probability>> pv_curve(const MtjParams& params, int n_points) {
    if (n_points < 2) {
        throw std::invalid_argument("pv_curve: n_points must be >= 2");
    }
    std::vector<std::pair<double, Probability>> curve;
    curve.reserve(static_cast<std::size_t>(n_points));
    const double step = (params.v_max_v - params.v_min_v) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        const double v = (i == n_points - 1) ? params.v_max_v : params.v_min_v + step * i;
        curve.emplace_back(v, switching_probability(v, params.t_write_s, params));
    }
    return curve;
}

VoltageForProbability voltage_for_probability(Probability p, const MtjParams& params) {
    const double p_lo = switching_probability(params.v_min_v, params.t_write_s, params).value();
    const double p_hi = switching_probability(params.v_max_v, params.t_write_s, params).value();

    VoltageForProbability result;
    double target = p.value();
    if (target <= p_lo) {
        result.voltage = params.v_min_v;
        result.clamped = target < p_lo;
        return result;
    }
    if (target >= p_hi) {
        result.voltage = params.v_max_v;
        result.clamped = target > p_hi;
        return result;
    }

    double lo = params.v_min_v;
    double hi = params.v_max_v;
    // P is strictly increasing in v, so plain bisection converges; 100
    // halvings of a 0.23 V interval are far below double resolution.
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double pm = switching_probability(mid, params.t_write_s, params).value();
        if (std::abs(pm - target) <= 1e-12 || hi - lo < 1e-15) {
            result.voltage = mid;
            return result;
        }
        if (pm < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    result.voltage = 0.5 * (lo + hi);
    return result;
}

MtjParams device_instance_params(const SbgNode& node) {
    MtjParams params = node.params;
    if (params.tau0_spread == 0.0 && params.delta_spread == 0.0) {
        return params;
    }
    // Separate stream from the bit draws so variation does not shift them.
    SplitMix64 rng(node.seed ^ UINT64_C(0xD1B54A32D192ED03));
    auto lognormal_factor = [&rng](double spread) {
        const double u1 = 1.0 - rng.next_unit();
        const double u2 = rng.next_unit();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return std::exp(spread * z);
    };
    params.tau0_s *= lognormal_factor(params.tau0_spread);
    params.delta *= lognormal_factor(params.delta_spread);
    return params;
}

int sbg_cycle(const SbgNode& node, MtjState& state, SplitMix64& rng) {
    state = MtjState::AP; // reset pulse switches to AP at 100%
    const double p = switching_probability(node.bias_voltage, node.params.t_write_s,
                                           node.params).value();
    if (rng.next_unit() < p) {
        state = MtjState::P;
    }
    return state == MtjState::P ? 1 : 0;
}

Bitstream generate(const SbgNode& node, std::size_t n) {
    if (n < 1) {
        throw std::invalid_argument("generate: stream length must be >= 1");
    }
    SbgNode device = node;
    device.params = device_instance_params(node);
    SplitMix64 rng(node.seed);
    MtjState state = MtjState::AP;
    Bitstream bs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (sbg_cycle(device, state, rng)) {
            bs.set_bit(i, true);
        }
    }
    return bs;
}

Probability mc_probability(double v, int trials, const MtjParams& params, std::uint64_t seed) {
    if (trials < 1) {
        throw std::invalid_argument("mc_probability: trials must be >= 1");
    }
    const double p = switching_probability(v, params.t_write_s, params).value();
    SplitMix64 rng(seed);
    int switched = 0;
    for (int i = 0; i < trials; ++i) {
        if (rng.next_unit() < p) {
            ++switched;
        }
    }
    return Probability(static_cast<double>(switched) / static_cast<double>(trials));
}

MtjParams load_device_config(const std::string& path) {
    const KeyValueFile kv = KeyValueFile::load(path);
    MtjParams params;
    params.tau0_s = kv.get_double("tau0_s", params.tau0_s);
    params.delta = kv.get_double("delta", params.delta);
    params.vc0_v = kv.get_double("vc0_v", params.vc0_v);
    params.v_min_v = kv.get_double("v_min_v", params.v_min_v);
    params.v_max_v = kv.get_double("v_max_v", params.v_max_v);
    params.t_write_s = kv.get_double("t_write_ns", params.t_write_s * 1e9) * 1e-9;
    params.t_reset_s = kv.get_double("t_reset_ns", params.t_reset_s * 1e9) * 1e-9;
    params.tau0_spread = kv.get_double("tau0_spread", params.tau0_spread);
    params.delta_spread = kv.get_double("delta_spread", params.delta_spread);
    params.t_cycle_ns = kv.get_double("t_cycle_ns", params.t_cycle_ns);
    params.e_cycle_pj = kv.get_double("e_cycle_pj", params.e_cycle_pj);
    params.validate();
    return params;
}

} // namespace stochbayes
