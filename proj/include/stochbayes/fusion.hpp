#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "stochbayes/mtj.hpp"
#include "stochbayes/netlist.hpp"

namespace stochbayes {

/// One range/bearing sensor with the noise law of its two readings. The
/// distance reading is Gaussian around the true Euclidean distance with
/// std 5 + distance/10; the bearing reading is Gaussian around the viewing
/// angle with a fixed std in degrees.
struct SensorSpec {
    double x = 0.0;
    double y = 0.0;
    // NaN marks a reading that synthesize_readings still has to draw.
    double reading_distance = std::numeric_limits<double>::quiet_NaN();
    double reading_bearing_deg = std::numeric_limits<double>::quiet_NaN();
    double sigma_distance_base = 5.0;
    double sigma_distance_slope = 0.1;
    double sigma_bearing_deg = 14.0626;

    double distance_sigma(double mu_distance) const {
        return sigma_distance_base + sigma_distance_slope * mu_distance;
    }
};

/// Square inference grid. Cell (ix, iy) sits at plane point
/// (ix * spacing, iy * spacing) with spacing 64/size, so every grid size
/// covers the same region around the sensors.
struct GridSpec {
    int size = 64;

    double spacing() const { return 64.0 / size; }
    double cell_x(int ix) const { return ix * spacing(); }
    double cell_y(int iy) const { return iy * spacing(); }
};

struct FusionScenario {
    std::vector<SensorSpec> sensors;
    GridSpec grid;
    double true_x = 0.0;
    double true_y = 0.0;
    std::uint64_t reading_seed = 0;
};

/// Normalized distribution over grid cells, stored x-major:
/// value(ix, iy) = values[ix * size + iy].
struct PosteriorGrid {
    int size = 0;
    std::vector<double> values;

    double& at(int ix, int iy) { return values[static_cast<std::size_t>(ix) * size + iy]; }
    double at(int ix, int iy) const { return values[static_cast<std::size_t>(ix) * size + iy]; }

    /// Index (ix, iy) of the largest cell (first occurrence wins ties).
    std::pair<int, int> argmax() const;
};

/// The three-sensor target-location scenario: sensors at (0,0), (0,32),
/// (32,0), target at (28,29), readings drawn from each sensor's noise law
/// at the target position with the scenario's documented seed.
FusionScenario default_scenario(int grid_size = 64);

/// Reads a scenario file (key = value, '#' comments). Keys: grid_size, seed,
/// true_x, true_y, sensor<i>_x, sensor<i>_y for i = 1..n (consecutive), plus
/// optional explicit readings sensor<i>_d / sensor<i>_b (when present for all
/// sensors, no synthesis happens and the seed only drives stochastic runs).
FusionScenario load_scenario(const std::string& path);

/// Draws the two readings of every sensor at the scenario's true position.
/// No-op for sensors that already carry explicit readings.
void synthesize_readings(FusionScenario& scenario);

/// Density of the sensor's recorded distance reading at a hypothetical cell
/// center (per plane-unit).
double distance_likelihood(const SensorSpec& sensor, double cx, double cy);

/// Density of the sensor's recorded bearing reading at a hypothetical cell
/// center (per degree). The residual is wrapped to (-180, 180]. A cell that
/// coincides with the sensor has no defined viewing angle: the density at
/// residual 0 is returned and *coincident (when given) is set.
double bearing_likelihood(const SensorSpec& sensor, double cx, double cy,
                          bool* coincident = nullptr);

/// The six per-cell likelihood factor grids in source order: distance then
/// bearing for each sensor.
std::vector<std::vector<double>> likelihood_grids(const std::vector<SensorSpec>& sensors,
                                                  const GridSpec& grid);

/// Rescales one factor grid by its own maximum so values fit in [0,1] for
/// bitstream encoding; the normalized posterior is invariant to this.
/// Throws std::invalid_argument when the grid is all zero.
std::vector<double> scale_likelihoods(const std::vector<double>& factors);

/// Product of all per-sensor likelihoods, cell by cell, normalized to sum 1.
/// Computed in log domain so fine grids cannot underflow to an all-zero
/// product.
PosteriorGrid exact_posterior(const std::vector<SensorSpec>& sensors, const GridSpec& grid);

/// Stochastic-computing circuit for the same product: per cell, six
/// probability sources (the max-scaled likelihood factors) reduced by a
/// chain of five AND gates into one counter output per cell, emitted in
/// x-major cell order.
Netlist build_fusion_netlist(const std::vector<SensorSpec>& sensors, const GridSpec& grid);

/// Evaluates a fusion netlist and normalizes the per-cell counter decodes
/// into a posterior. Throws DegenerateError when every counter is zero
/// (stream length too short for the scenario).
PosteriorGrid stochastic_posterior(const Netlist& netlist, const GridSpec& grid,
                                   std::size_t length, std::uint64_t master_seed,
                                   const MtjParams& params = {});

/// Seed-averaged stochastic posterior: counters pooled across n_seeds runs
/// with master seeds master_seed_base .. master_seed_base + n_seeds - 1,
/// then normalized once. This is the distribution the KL reports quote.
PosteriorGrid accumulated_stochastic_posterior(const Netlist& netlist, const GridSpec& grid,
                                               std::size_t length,
                                               std::uint64_t master_seed_base, int n_seeds,
                                               const MtjParams& params = {});

/// D(p || q) = sum p * ln(p/q), natural log; cells with p = 0 contribute 0.
/// When q is zero somewhere p is not, q gets additive smoothing
/// eps = 1/(10 * length * size^2) and is renormalized first. `length` is the
/// stream length that produced q.
double kl_divergence(const PosteriorGrid& p, const PosteriorGrid& q, std::size_t length);

/// `x,y,prob` rows in plane coordinates, full double precision.
void export_heatmap_csv(const PosteriorGrid& grid, const GridSpec& spec, std::ostream& out);

/// Parses rows produced by export_heatmap_csv (header line optional).
PosteriorGrid load_heatmap_csv(std::istream& in, const GridSpec& spec);

/// 8-bit binary PGM scaled so the largest cell maps to 255. Row j of the
/// image is iy = j, column i is ix = i. `comment` (preformatted '#' lines,
/// may be empty) is embedded after the magic number.
void export_heatmap_pgm(const PosteriorGrid& grid, std::ostream& out,
                        const std::string& comment = {});

} // namespace stochbayes
