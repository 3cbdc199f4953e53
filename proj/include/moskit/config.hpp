#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace moskit {

// Ordered (key, weight) rows; row order is the tie-break order for
// largest-remainder apportionment.
using WeightTable = std::vector<std::pair<std::string, double>>;

enum class RmseDenominator { n_minus_one, n };
enum class MeanWeighting { unweighted, clip_count };

// One JSON document configures the whole toolkit: paths, seeds, proportion
// overrides, and adapter command templates. Every field has a default; an
// empty config file is valid.
struct Config {
    uint64_t seed = 0;
    int min_votes = 20;
    int mos_bins = 8;
    int workers = 1;

    // Degradation plan overrides; empty means the built-in tables.
    WeightTable stage1_weights;
    WeightTable stage2_weights;

    // Adapter command templates with {in}/{out} (and optional {bitrate})
    // placeholders, keyed "amr", "opus", "ns", "plc".
    std::map<std::string, std::string> adapters;
    double adapter_timeout_seconds = 120.0;

    std::string noise_dir;
    double white_snr_lo_db = 0.0;
    double white_snr_hi_db = 40.0;
    double background_snr_lo_db = 0.0;
    double background_snr_hi_db = 40.0;
    double lowpass_cutoff_hz = 3500.0;
    double highpass_cutoff_hz = 300.0;
    double clip_threshold_lo = 0.1;
    double clip_threshold_hi = 0.5;
    std::string codec_bitrate;

    RmseDenominator rmse_denominator = RmseDenominator::n_minus_one;
    MeanWeighting dataset_mean_weighting = MeanWeighting::unweighted;
};

Config load_config(const std::string& path);
Config parse_config(const std::string& json_text, const std::string& origin = "<config>");

} // namespace moskit
