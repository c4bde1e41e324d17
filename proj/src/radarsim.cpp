#include "radnas/radarsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "radnas/rng.hpp"

namespace radnas::sim {

const std::array<Scenario, 10>& scenario_table() {
    static const std::array<Scenario, 10> table = {{
        {1, 250.0, 5000.0, false},
        {2, 250.0, 1000.0, false},
        {3, 250.0, 10000.0, false},
        {4, 500.0, 5000.0, false},
        {5, 500.0, 1000.0, false},
        {6, 500.0, 10000.0, false},
        {7, 1000.0, 5000.0, false},
        {8, 1000.0, 1000.0, false},
        {9, 1000.0, 10000.0, false},
        {10, 0.0, 0.0, true},
    }};
    return table;
}

const Scenario& scenario_by_id(int id) {
    for (const Scenario& s : scenario_table()) {
        if (s.id == id) return s;
    }
    throw std::invalid_argument("unknown scenario id " + std::to_string(id));
}

double clutter_sigma_cells(const Scenario& scenario, const GenConfig& cfg) {
    if (scenario.thermal_only) return 0.0;
    return cfg.ridge_sigma_cells * scenario.speed_mps / 250.0;
}

double clutter_power(const Scenario& scenario, const GenConfig& cfg) {
    if (scenario.thermal_only) return 0.0;
    return cfg.cnr_at_1000ft * 1000.0 / scenario.elevation_ft;
}

int clutter_support_cells(const Scenario& scenario, const GenConfig& cfg) {
    const double power = clutter_power(scenario, cfg);
    if (power <= cfg.noise_power) return 0;
    const double sigma = clutter_sigma_cells(scenario, cfg);
    // P * exp(-d^2 / (2 sigma^2)) > noise_power  <=>  |d| < sigma * sqrt(2 ln(P/noise))
    const double half = sigma * std::sqrt(2.0 * std::log(power / cfg.noise_power));
    return 2 * static_cast<int>(half) + 1;
}

RangeDopplerSample generate_sample(const Scenario& scenario, std::uint64_t seed,
                                   const GenConfig& cfg) {
    RangeDopplerSample sample;
    sample.h = cfg.height;
    sample.w = cfg.width;
    sample.scenario_id = scenario.id;
    sample.seed = seed;
    const std::size_t cells = static_cast<std::size_t>(cfg.height) * cfg.width;
    sample.mask.assign(cells, 0);

    Rng rng(derive_seed(seed, 0x7261647221ull));

    // Complex field, drawn in a fixed order: targets, thermal noise, clutter.
    std::vector<double> re(cells, 0.0), im(cells, 0.0);

    sample.n_targets = rng.uniform_int(cfg.max_targets + 1);
    for (int t = 0; t < sample.n_targets; ++t) {
        const int row = rng.uniform_int(cfg.height);
        const int col = rng.uniform_int(cfg.width);
        const double snr_db = rng.uniform(cfg.snr_db_min, cfg.snr_db_max);
        const double amplitude = std::sqrt(std::pow(10.0, snr_db / 10.0) * cfg.noise_power);
        const double phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        for (int dy = 0; dy < cfg.target_footprint; ++dy) {
            for (int dx = 0; dx < cfg.target_footprint; ++dx) {
                const int y = row + dy, x = col + dx;
                if (y >= cfg.height || x >= cfg.width) continue;
                const std::size_t idx = static_cast<std::size_t>(y) * cfg.width + x;
                re[idx] += amplitude * std::cos(phase);
                im[idx] += amplitude * std::sin(phase);
                sample.mask[idx] = 1;
            }
        }
    }

    const double noise_sigma = std::sqrt(cfg.noise_power / 2.0);
    for (std::size_t i = 0; i < cells; ++i) {
        re[i] += noise_sigma * rng.normal();
        im[i] += noise_sigma * rng.normal();
    }

    if (!scenario.thermal_only) {
        const double ridge_power = clutter_power(scenario, cfg);
        const double sigma = clutter_sigma_cells(scenario, cfg);
        const double center = (cfg.height - 1) / 2.0;  // zero Doppler
        for (int y = 0; y < cfg.height; ++y) {
            const double d = (y - center) / sigma;
            const double p = ridge_power * std::exp(-0.5 * d * d);
            const double s = std::sqrt(p / 2.0);
            for (int x = 0; x < cfg.width; ++x) {
                const std::size_t idx = static_cast<std::size_t>(y) * cfg.width + x;
                re[idx] += s * rng.normal();
                im[idx] += s * rng.normal();
            }
        }
    }

    sample.map.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        sample.map[i] = static_cast<float>(std::sqrt(re[i] * re[i] + im[i] * im[i]));
    }
    return sample;
}

fwd::Tensor4 make_batch(const std::vector<Scenario>& scenarios, int batch_size,
                        std::uint64_t seed, const GenConfig& cfg) {
    if (scenarios.empty()) throw std::invalid_argument("make_batch: no scenarios");
    if (batch_size < 1) throw std::invalid_argument("make_batch: batch_size must be >= 1");
    fwd::Tensor4 batch(batch_size, 1, cfg.height, cfg.width);
    const std::size_t cells = static_cast<std::size_t>(cfg.height) * cfg.width;
    for (int i = 0; i < batch_size; ++i) {
        const Scenario& sc = scenarios[i % scenarios.size()];
        RangeDopplerSample s = generate_sample(sc, derive_seed(seed, i), cfg);
        float* dst = batch.plane(i, 0);
        double mean = 0.0;
        for (std::size_t u = 0; u < cells; ++u) {
            dst[u] = std::log(s.map[u] + 1e-6f);
            mean += dst[u];
        }
        mean /= static_cast<double>(cells);
        double var = 0.0;
        for (std::size_t u = 0; u < cells; ++u) {
            const double d = dst[u] - mean;
            var += d * d;
        }
        var /= static_cast<double>(cells);
        const double inv = 1.0 / std::sqrt(var > 0.0 ? var : 1.0);
        for (std::size_t u = 0; u < cells; ++u) {
            dst[u] = static_cast<float>((dst[u] - mean) * inv);
        }
    }
    return batch;
}

std::optional<double> pd_proxy(const std::vector<std::uint8_t>& pred,
                               const std::vector<std::uint8_t>& label) {
    if (pred.size() != label.size()) throw std::invalid_argument("pd_proxy: size mismatch");
    long long hits = 0, positives = 0;
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (label[i]) {
            ++positives;
            if (pred[i]) ++hits;
        }
    }
    if (positives == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(positives);
}

std::optional<double> pfa_proxy(const std::vector<std::uint8_t>& pred,
                                const std::vector<std::uint8_t>& label) {
    if (pred.size() != label.size()) throw std::invalid_argument("pfa_proxy: size mismatch");
    long long false_alarms = 0, negatives = 0;
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (!label[i]) {
            ++negatives;
            if (pred[i]) ++false_alarms;
        }
    }
    if (negatives == 0) return std::nullopt;
    return static_cast<double>(false_alarms) / static_cast<double>(negatives);
}

DetectionMetrics evaluate_detection(const float* logits, const std::vector<std::uint8_t>& label,
                                    double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0) {
        throw std::invalid_argument("evaluate_detection: threshold must lie in (0, 1)");
    }
    // logistic(x) > t  <=>  x > log(t / (1 - t))
    const float logit_cut = static_cast<float>(std::log(threshold / (1.0 - threshold)));
    std::vector<std::uint8_t> pred(label.size());
    for (std::size_t i = 0; i < label.size(); ++i) pred[i] = logits[i] > logit_cut ? 1 : 0;
    DetectionMetrics m;
    m.threshold = threshold;
    m.pd = pd_proxy(pred, label);
    m.pfa = pfa_proxy(pred, label);
    return m;
}

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
    std::string csv = "scenario,seed,pd_proxy,pfa_proxy,threshold\n";
    for (const auto& r : rows) {
        csv += std::to_string(r.scenario_id) + "," + std::to_string(r.seed) + ",";
        if (r.metrics.pd) csv += std::to_string(*r.metrics.pd);
        csv += ",";
        if (r.metrics.pfa) csv += std::to_string(*r.metrics.pfa);
        csv += "," + std::to_string(r.metrics.threshold) + "\n";
    }
    return csv;
}

RangeDopplerSample pad_to_128(const RangeDopplerSample& sample) {
    if (sample.h > 128 || sample.w > 128) {
        throw std::invalid_argument("pad_to_128: input exceeds 128 in some axis");
    }
    if (sample.h == 128 && sample.w == 128) return sample;
    RangeDopplerSample out;
    out.h = 128;
    out.w = 128;
    out.n_targets = sample.n_targets;
    out.scenario_id = sample.scenario_id;
    out.seed = sample.seed;
    out.map.assign(128 * 128, 0.0f);
    out.mask.assign(128 * 128, 0);
    for (int y = 0; y < sample.h; ++y) {
        std::copy_n(sample.map.data() + static_cast<std::size_t>(y) * sample.w, sample.w,
                    out.map.data() + static_cast<std::size_t>(y) * 128);
        std::copy_n(sample.mask.data() + static_cast<std::size_t>(y) * sample.w, sample.w,
                    out.mask.data() + static_cast<std::size_t>(y) * 128);
    }
    return out;
}

SplitIndices split_indices(int count, double train_fraction, std::uint64_t seed) {
    if (count < 0 || train_fraction < 0.0 || train_fraction > 1.0) {
        throw std::invalid_argument("split_indices: bad arguments");
    }
    std::vector<int> order(count);
    for (int i = 0; i < count; ++i) order[i] = i;
    Rng rng(derive_seed(seed, 0x73706c6974ull));
    for (int i = count - 1; i > 0; --i) {  // Fisher-Yates
        std::swap(order[i], order[rng.uniform_int(i + 1)]);
    }
    const int n_train = static_cast<int>(train_fraction * count + 0.5);
    SplitIndices split;
    split.train.assign(order.begin(), order.begin() + n_train);
    split.validation.assign(order.begin() + n_train, order.end());
    return split;
}

void write_batch_file(const std::vector<RangeDopplerSample>& samples, const std::string& path) {
    if (samples.empty()) throw std::invalid_argument("write_batch_file: no samples");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("write_batch_file: cannot open " + path);
    const char magic[4] = {'R', 'D', 'S', 'B'};
    const std::uint32_t version = 1;
    const std::uint32_t count = static_cast<std::uint32_t>(samples.size());
    const std::uint32_t h = samples.front().h;
    const std::uint32_t w = samples.front().w;
    const std::uint32_t dtype = 0;  // f32 map + u8 mask
    std::fwrite(magic, 1, 4, f);
    std::fwrite(&version, 4, 1, f);
    std::fwrite(&count, 4, 1, f);
    std::fwrite(&h, 4, 1, f);
    std::fwrite(&w, 4, 1, f);
    std::fwrite(&dtype, 4, 1, f);
    for (const auto& s : samples) {
        if (s.h != static_cast<int>(h) || s.w != static_cast<int>(w)) {
            std::fclose(f);
            throw std::invalid_argument("write_batch_file: mixed sample dims");
        }
        std::fwrite(s.map.data(), sizeof(float), s.map.size(), f);
        std::fwrite(s.mask.data(), 1, s.mask.size(), f);
    }
    std::fclose(f);
}

std::vector<RangeDopplerSample> read_batch_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("read_batch_file: cannot open " + path);
    char magic[4];
    std::uint32_t version = 0, count = 0, h = 0, w = 0, dtype = 0;
    bool ok = std::fread(magic, 1, 4, f) == 4 && std::fread(&version, 4, 1, f) == 1 &&
              std::fread(&count, 4, 1, f) == 1 && std::fread(&h, 4, 1, f) == 1 &&
              std::fread(&w, 4, 1, f) == 1 && std::fread(&dtype, 4, 1, f) == 1;
    if (!ok || std::string(magic, 4) != "RDSB" || version != 1 || dtype != 0) {
        std::fclose(f);
        throw std::runtime_error("read_batch_file: bad header in " + path);
    }
    std::vector<RangeDopplerSample> samples(count);
    const std::size_t cells = static_cast<std::size_t>(h) * w;
    for (auto& s : samples) {
        s.h = static_cast<int>(h);
        s.w = static_cast<int>(w);
        s.map.resize(cells);
        s.mask.resize(cells);
        ok = std::fread(s.map.data(), sizeof(float), cells, f) == cells &&
             std::fread(s.mask.data(), 1, cells, f) == cells;
        if (!ok) {
            std::fclose(f);
            throw std::runtime_error("read_batch_file: truncated file " + path);
        }
    }
    std::fclose(f);
    return samples;
}

}  // namespace radnas::sim
