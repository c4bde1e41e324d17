#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radnas/tensor.hpp"

namespace radnas::sim {

// The ten generation scenarios: three aircraft speeds crossed with three
// elevations, plus a thermal-noise-only case.
struct Scenario {
    int id = 1;
    double speed_mps = 250.0;
    double elevation_ft = 5000.0;
    bool thermal_only = false;
};

const std::array<Scenario, 10>& scenario_table();
const Scenario& scenario_by_id(int id);

struct GenConfig {
    int height = 128;               // Doppler axis
    int width = 128;                // range axis
    double noise_power = 1.0;       // complex thermal noise power
    double cnr_at_1000ft = 100.0;   // clutter-to-noise power ratio at 1000 ft
    double ridge_sigma_cells = 2.5; // Doppler std of the ridge at 250 m/s
    double snr_db_min = 8.0;
    double snr_db_max = 20.0;
    int target_footprint = 1;       // square footprint edge, 1 or 2
    int max_targets = 6;
};

// One synthetic range-Doppler map: magnitudes of thermal noise, a ground
// clutter ridge centered at zero Doppler (span scales with aircraft speed,
// power inversely with elevation), and 0..6 point targets.
struct RangeDopplerSample {
    int h = 0, w = 0;
    std::vector<float> map;         // |y|, row-major, rows = Doppler
    std::vector<std::uint8_t> mask; // 1 inside target footprints
    int n_targets = 0;
    int scenario_id = 0;
    std::uint64_t seed = 0;
};

RangeDopplerSample generate_sample(const Scenario& scenario, std::uint64_t seed,
                                   const GenConfig& cfg = {});

// Ridge shape by the generator's own formulas (not measured from samples).
double clutter_sigma_cells(const Scenario& scenario, const GenConfig& cfg);
double clutter_power(const Scenario& scenario, const GenConfig& cfg);
// Doppler cells whose ridge power exceeds the thermal floor.
int clutter_support_cells(const Scenario& scenario, const GenConfig& cfg);

// Scoring minibatch: log-magnitude maps, each standardized to zero mean and
// unit variance, scenarios cycled round-robin.
fwd::Tensor4 make_batch(const std::vector<Scenario>& scenarios, int batch_size,
                        std::uint64_t seed, const GenConfig& cfg = {});

// Pixel proxies for detection and false-alarm probability. Undefined cases
// (no target pixels / no background pixels) return nullopt.
std::optional<double> pd_proxy(const std::vector<std::uint8_t>& pred,
                               const std::vector<std::uint8_t>& label);
std::optional<double> pfa_proxy(const std::vector<std::uint8_t>& pred,
                                const std::vector<std::uint8_t>& label);

struct DetectionMetrics {
    std::optional<double> pd;   // undefined when the label has no targets
    std::optional<double> pfa;  // undefined when the label is all targets
    double threshold = 0.5;
};

// Binarizes one logit plane at logistic(x) > threshold and evaluates both
// proxies against the label mask.
DetectionMetrics evaluate_detection(const float* logits, const std::vector<std::uint8_t>& label,
                                    double threshold = 0.5);

struct MetricsRow {
    int scenario_id = 0;
    std::uint64_t seed = 0;
    DetectionMetrics metrics;
};

// Metric table export; undefined entries stay empty rather than 0 or 1.
std::string metrics_to_csv(const std::vector<MetricsRow>& rows);

// Zero-pads to 128x128 with the original content anchored top-left.
RangeDopplerSample pad_to_128(const RangeDopplerSample& sample);

// Seeded shuffle split into train/validation index sets.
struct SplitIndices {
    std::vector<int> train;
    std::vector<int> validation;
};
SplitIndices split_indices(int count, double train_fraction, std::uint64_t seed);

// Binary batch file: magic "RDSB", u32 version, u32 count, u32 h, u32 w,
// u32 dtype (0 = f32 map + u8 mask), then count records of map and mask.
void write_batch_file(const std::vector<RangeDopplerSample>& samples, const std::string& path);
std::vector<RangeDopplerSample> read_batch_file(const std::string& path);

}  // namespace radnas::sim
