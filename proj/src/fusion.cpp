#include "stochbayes/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "stochbayes/config.hpp"
#include "stochbayes/errors.hpp"
#include "stochbayes/format.hpp"
#include "stochbayes/parallel.hpp"
#include "stochbayes/rng.hpp"

namespace stochbayes {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double gaussian_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
}

double log_gaussian_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma * std::sqrt(kTwoPi));
}

/// Wraps an angle difference into (-180, 180].
double wrap_degrees(double d) {
    d = std::fmod(d, 360.0);
    if (d <= -180.0) {
        d += 360.0;
    } else if (d > 180.0) {
        d -= 360.0;
    }
    return d;
}

double viewing_angle_deg(const SensorSpec& sensor, double cx, double cy) {
    return std::atan2(cy - sensor.y, cx - sensor.x) * 180.0 / std::numbers::pi;
}

/// One standard normal draw by Box-Muller; implementation-defined stdlib
/// distributions would break byte-for-byte reproducibility across platforms.
double draw_normal(SplitMix64& rng) {
    const double u1 = 1.0 - rng.next_unit(); // (0, 1]
    const double u2 = rng.next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::string cell_node_id(const char* prefix, int sensor, int ix, int iy) {
    std::ostringstream id;
    id << prefix << sensor << '_' << ix << '_' << iy;
    return id.str();
}

} // namespace

std::pair<int, int> PosteriorGrid::argmax() const {
    int best_ix = 0;
    int best_iy = 0;
    double best = values.empty() ? 0.0 : values[0];
    for (int ix = 0; ix < size; ++ix) {
        for (int iy = 0; iy < size; ++iy) {
            if (at(ix, iy) > best) {
                best = at(ix, iy);
                best_ix = ix;
                best_iy = iy;
            }
        }
    }
    return {best_ix, best_iy};
}

FusionScenario default_scenario(int grid_size) {
    FusionScenario scenario;
    scenario.grid.size = grid_size;
    scenario.true_x = 28.0;
    scenario.true_y = 29.0;
    scenario.reading_seed = 303;
    scenario.sensors.resize(3);
    scenario.sensors[0].x = 0.0;
    scenario.sensors[0].y = 0.0;
    scenario.sensors[1].x = 0.0;
    scenario.sensors[1].y = 32.0;
    scenario.sensors[2].x = 32.0;
    scenario.sensors[2].y = 0.0;
    synthesize_readings(scenario);
    return scenario;
}

void synthesize_readings(FusionScenario& scenario) {
    SplitMix64 rng(scenario.reading_seed);
    for (SensorSpec& sensor : scenario.sensors) {
        const double mu_d = std::hypot(scenario.true_x - sensor.x, scenario.true_y - sensor.y);
        const double mu_b = viewing_angle_deg(sensor, scenario.true_x, scenario.true_y);
        // draw both readings even if one is preset, to keep the stream stable
        const double zd = draw_normal(rng);
        const double zb = draw_normal(rng);
        if (std::isnan(sensor.reading_distance)) {
            sensor.reading_distance = mu_d + sensor.distance_sigma(mu_d) * zd;
        }
        if (std::isnan(sensor.reading_bearing_deg)) {
            sensor.reading_bearing_deg = wrap_degrees(mu_b + sensor.sigma_bearing_deg * zb);
        }
    }
}

FusionScenario load_scenario(const std::string& path) {
    const KeyValueFile kv = KeyValueFile::load(path);
    FusionScenario scenario;
    scenario.grid.size = kv.get_int("grid_size", 64);
    if (scenario.grid.size < 2) {
        throw ConfigError(path + ": grid_size must be >= 2");
    }
    scenario.reading_seed = kv.get_u64("seed", 0);
    scenario.true_x = kv.get_double("true_x", 0.0);
    scenario.true_y = kv.get_double("true_y", 0.0);
    for (int i = 1;; ++i) {
        const std::string base = "sensor" + std::to_string(i);
        if (!kv.has(base + "_x")) {
            break;
        }
        SensorSpec sensor;
        sensor.x = kv.get_double(base + "_x");
        sensor.y = kv.get_double(base + "_y");
        if (kv.has(base + "_d")) {
            sensor.reading_distance = kv.get_double(base + "_d");
        }
        if (kv.has(base + "_b")) {
            sensor.reading_bearing_deg = kv.get_double(base + "_b");
        }
        sensor.sigma_distance_base = kv.get_double("sigma_distance_base", sensor.sigma_distance_base);
        sensor.sigma_distance_slope = kv.get_double("sigma_distance_slope", sensor.sigma_distance_slope);
        sensor.sigma_bearing_deg = kv.get_double("sigma_bearing_deg", sensor.sigma_bearing_deg);
        scenario.sensors.push_back(sensor);
    }
    if (scenario.sensors.empty()) {
        throw ConfigError(path + ": no sensors (need sensor1_x, sensor1_y, ...)");
    }
    synthesize_readings(scenario);
    return scenario;
}

double distance_likelihood(const SensorSpec& sensor, double cx, double cy) {
    const double mu = std::hypot(cx - sensor.x, cy - sensor.y);
    return gaussian_pdf(sensor.reading_distance, mu, sensor.distance_sigma(mu));
}

double bearing_likelihood(const SensorSpec& sensor, double cx, double cy, bool* coincident) {
    if (coincident) {
        *coincident = false;
    }
    double residual = 0.0;
    if (cx == sensor.x && cy == sensor.y) {
        if (coincident) {
            *coincident = true;
        }
    } else {
        residual = wrap_degrees(sensor.reading_bearing_deg - viewing_angle_deg(sensor, cx, cy));
    }
    return gaussian_pdf(residual, 0.0, sensor.sigma_bearing_deg);
}

std::vector<std::vector<double>> likelihood_grids(const std::vector<SensorSpec>& sensors,
                                                  const GridSpec& grid) {
    const std::size_t cells = static_cast<std::size_t>(grid.size) * grid.size;
    std::vector<std::vector<double>> factors(2 * sensors.size(),
                                             std::vector<double>(cells, 0.0));
    parallel_for(cells, [&](std::size_t c) {
        const int ix = static_cast<int>(c) / grid.size;
        const int iy = static_cast<int>(c) % grid.size;
        const double cx = grid.cell_x(ix);
        const double cy = grid.cell_y(iy);
        for (std::size_t s = 0; s < sensors.size(); ++s) {
            factors[2 * s][c] = distance_likelihood(sensors[s], cx, cy);
            factors[2 * s + 1][c] = bearing_likelihood(sensors[s], cx, cy);
        }
    });
    return factors;
}

std::vector<double> scale_likelihoods(const std::vector<double>& factors) {
    const double max = *std::max_element(factors.begin(), factors.end());
    if (!(max > 0.0)) {
        throw std::invalid_argument("scale_likelihoods: factor grid is all zero");
    }
    std::vector<double> scaled(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) {
        scaled[i] = factors[i] / max;
    }
    return scaled;
}

PosteriorGrid exact_posterior(const std::vector<SensorSpec>& sensors, const GridSpec& grid) {
    if (sensors.empty()) {
        throw std::invalid_argument("exact_posterior: need at least one sensor");
    }
    const std::size_t cells = static_cast<std::size_t>(grid.size) * grid.size;
    std::vector<double> log_post(cells, 0.0);
    parallel_for(cells, [&](std::size_t c) {
        const int ix = static_cast<int>(c) / grid.size;
        const int iy = static_cast<int>(c) % grid.size;
        const double cx = grid.cell_x(ix);
        const double cy = grid.cell_y(iy);
        double lp = 0.0;
        for (const SensorSpec& sensor : sensors) {
            const double mu = std::hypot(cx - sensor.x, cy - sensor.y);
            lp += log_gaussian_pdf(sensor.reading_distance, mu, sensor.distance_sigma(mu));
            double residual = 0.0;
            if (!(cx == sensor.x && cy == sensor.y)) {
                residual = wrap_degrees(sensor.reading_bearing_deg -
                                        viewing_angle_deg(sensor, cx, cy));
            }
            lp += log_gaussian_pdf(residual, 0.0, sensor.sigma_bearing_deg);
        }
        log_post[c] = lp;
    });

    const double shift = *std::max_element(log_post.begin(), log_post.end());
    PosteriorGrid posterior;
    posterior.size = grid.size;
    posterior.values.resize(cells);
    double sum = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        posterior.values[c] = std::exp(log_post[c] - shift);
        sum += posterior.values[c];
    }
    for (double& v : posterior.values) {
        v /= sum;
    }
    return posterior;
}

Netlist build_fusion_netlist(const std::vector<SensorSpec>& sensors, const GridSpec& grid) {
    auto factors = likelihood_grids(sensors, grid);
    for (auto& f : factors) {
        f = scale_likelihoods(f);
    }

    Netlist nl;
    const std::size_t cells = static_cast<std::size_t>(grid.size) * grid.size;
    nl.sources.reserve(cells * factors.size());
    nl.gates.reserve(cells * (factors.size() - 1));
    nl.outputs.reserve(cells);
    for (int ix = 0; ix < grid.size; ++ix) {
        for (int iy = 0; iy < grid.size; ++iy) {
            const std::size_t c = static_cast<std::size_t>(ix) * grid.size + iy;
            std::string previous;
            for (std::size_t s = 0; s < sensors.size(); ++s) {
                const std::string d_id = cell_node_id("d", static_cast<int>(s), ix, iy);
                const std::string b_id = cell_node_id("b", static_cast<int>(s), ix, iy);
                nl.add_probability_source(d_id, factors[2 * s][c]);
                nl.add_probability_source(b_id, factors[2 * s + 1][c]);
                if (previous.empty()) {
                    const std::string m_id = cell_node_id("m", 0, ix, iy);
                    nl.add_and(m_id, d_id, b_id);
                    previous = m_id;
                } else {
                    std::string m_id = cell_node_id("m", static_cast<int>(2 * s - 1), ix, iy);
                    nl.add_and(m_id, previous, d_id);
                    previous = std::move(m_id);
                    m_id = cell_node_id("m", static_cast<int>(2 * s), ix, iy);
                    nl.add_and(m_id, previous, b_id);
                    previous = std::move(m_id);
                }
            }
            nl.add_output(previous);
        }
    }
    return nl;
}

PosteriorGrid stochastic_posterior(const Netlist& netlist, const GridSpec& grid,
                                   std::size_t length, std::uint64_t master_seed,
                                   const MtjParams& params) {
    const std::size_t cells = static_cast<std::size_t>(grid.size) * grid.size;
    const EvalResult result = evaluate(netlist, length, master_seed, params);
    if (result.output_ids.size() != cells) {
        throw std::invalid_argument("stochastic_posterior: netlist outputs do not match grid");
    }
    PosteriorGrid posterior;
    posterior.size = grid.size;
    posterior.values.resize(cells);
    double sum = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        posterior.values[c] = result.probabilities[c];
        sum += posterior.values[c];
    }
    if (sum == 0.0) {
        throw DegenerateError("stochastic_posterior: all counters are zero; "
                              "increase the stream length");
    }
    for (double& v : posterior.values) {
        v /= sum;
    }
    return posterior;
}

PosteriorGrid accumulated_stochastic_posterior(const Netlist& netlist, const GridSpec& grid,
                                               std::size_t length,
                                               std::uint64_t master_seed_base, int n_seeds,
                                               const MtjParams& params) {
    if (n_seeds < 1) {
        throw std::invalid_argument("accumulated_stochastic_posterior: n_seeds must be >= 1");
    }
    const std::size_t cells = static_cast<std::size_t>(grid.size) * grid.size;
    std::vector<double> counts(cells, 0.0);
    for (int s = 0; s < n_seeds; ++s) {
        const EvalResult result =
            evaluate(netlist, length, master_seed_base + static_cast<std::uint64_t>(s), params);
        if (result.output_ids.size() != cells) {
            throw std::invalid_argument("accumulated_stochastic_posterior: outputs do not match grid");
        }
        for (std::size_t c = 0; c < cells; ++c) {
            counts[c] += static_cast<double>(result.streams[c].popcount());
        }
    }
    double sum = 0.0;
    for (double v : counts) {
        sum += v;
    }
    if (sum == 0.0) {
        throw DegenerateError("accumulated_stochastic_posterior: all counters are zero; "
                              "increase the stream length");
    }
    PosteriorGrid posterior;
    posterior.size = grid.size;
    posterior.values.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        posterior.values[c] = counts[c] / sum;
    }
    return posterior;
}

double kl_divergence(const PosteriorGrid& p, const PosteriorGrid& q, std::size_t length) {
    if (p.size != q.size || p.values.size() != q.values.size()) {
        throw std::invalid_argument("kl_divergence: grid shape mismatch");
    }
    bool needs_smoothing = false;
    for (std::size_t c = 0; c < p.values.size(); ++c) {
        if (p.values[c] > 0.0 && q.values[c] == 0.0) {
            needs_smoothing = true;
            break;
        }
    }
    const std::size_t cells = p.values.size();
    std::vector<double> qs;
    const std::vector<double>* q_used = &q.values;
    if (needs_smoothing) {
        const double eps = 1.0 / (10.0 * static_cast<double>(length) * static_cast<double>(cells));
        qs.resize(cells);
        const double norm = 1.0 + eps * static_cast<double>(cells);
        for (std::size_t c = 0; c < cells; ++c) {
            qs[c] = (q.values[c] + eps) / norm;
        }
        q_used = &qs;
    }
    double d = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        if (p.values[c] > 0.0) {
            d += p.values[c] * std::log(p.values[c] / (*q_used)[c]);
        }
    }
    return d;
}

void export_heatmap_csv(const PosteriorGrid& grid, const GridSpec& spec, std::ostream& out) {
    out << "x,y,prob\n";
    for (int ix = 0; ix < grid.size; ++ix) {
        for (int iy = 0; iy < grid.size; ++iy) {
            out << fmt_double(spec.cell_x(ix)) << ',' << fmt_double(spec.cell_y(iy)) << ','
                << fmt_double(grid.at(ix, iy)) << '\n';
        }
    }
}

PosteriorGrid load_heatmap_csv(std::istream& in, const GridSpec& spec) {
    PosteriorGrid grid;
    grid.size = spec.size;
    grid.values.assign(static_cast<std::size_t>(spec.size) * spec.size, 0.0);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) {
            continue;
        }
        std::istringstream row(line);
        std::string xs, ys, ps;
        if (!std::getline(row, xs, ',') || !std::getline(row, ys, ',') || !std::getline(row, ps)) {
            throw std::invalid_argument("heatmap csv: malformed row '" + line + "'");
        }
        const int ix = static_cast<int>(std::lround(std::stod(xs) / spec.spacing()));
        const int iy = static_cast<int>(std::lround(std::stod(ys) / spec.spacing()));
        if (ix < 0 || ix >= spec.size || iy < 0 || iy >= spec.size) {
            throw std::invalid_argument("heatmap csv: cell out of range in '" + line + "'");
        }
        grid.at(ix, iy) = std::stod(ps);
    }
    return grid;
}

void export_heatmap_pgm(const PosteriorGrid& grid, std::ostream& out,
                        const std::string& comment) {
    const double max = grid.values.empty()
                           ? 0.0
                           : *std::max_element(grid.values.begin(), grid.values.end());
    out << "P5\n" << comment << grid.size << ' ' << grid.size << "\n255\n";
    for (int iy = 0; iy < grid.size; ++iy) {
        for (int ix = 0; ix < grid.size; ++ix) {
            const double scaled = max > 0.0 ? grid.at(ix, iy) / max : 0.0;
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(scaled * 255.0))));
        }
    }
}

} // namespace stochbayes
