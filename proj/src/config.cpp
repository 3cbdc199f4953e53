#include "moskit/config.hpp"

#include "moskit/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace moskit {

namespace {

using ordered_json = nlohmann::ordered_json;

WeightTable parse_weights(const ordered_json& obj, const std::string& key) {
    WeightTable table;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!it.value().is_number())
            throw ValidationError("config: " + key + "." + it.key() + " must be a number");
        table.emplace_back(it.key(), it.value().get<double>());
    }
    return table;
}

void parse_range(const ordered_json& arr, const std::string& key, double& lo, double& hi) {
    if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() || !arr[1].is_number())
        throw ValidationError("config: " + key + " must be a [lo, hi] number pair");
    lo = arr[0].get<double>();
    hi = arr[1].get<double>();
    if (!(lo <= hi)) throw ValidationError("config: " + key + " must have lo <= hi");
}

} // namespace

Config parse_config(const std::string& json_text, const std::string& origin) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(origin + ": JSON parse error: " + e.what());
    }
    if (!j.is_object()) throw ValidationError(origin + ": config must be a JSON object");

    Config cfg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const ordered_json& v = it.value();
        try {
            if (key == "seed") cfg.seed = v.get<uint64_t>();
            else if (key == "min_votes") cfg.min_votes = v.get<int>();
            else if (key == "mos_bins") cfg.mos_bins = v.get<int>();
            else if (key == "workers") cfg.workers = v.get<int>();
            else if (key == "stage1_weights") cfg.stage1_weights = parse_weights(v, key);
            else if (key == "stage2_weights") cfg.stage2_weights = parse_weights(v, key);
            else if (key == "adapters") {
                for (auto a = v.begin(); a != v.end(); ++a)
                    cfg.adapters[a.key()] = a.value().get<std::string>();
            } else if (key == "adapter_timeout_seconds") cfg.adapter_timeout_seconds = v.get<double>();
            else if (key == "noise_dir") cfg.noise_dir = v.get<std::string>();
            else if (key == "white_snr_range_db") parse_range(v, key, cfg.white_snr_lo_db, cfg.white_snr_hi_db);
            else if (key == "background_snr_range_db") parse_range(v, key, cfg.background_snr_lo_db, cfg.background_snr_hi_db);
            else if (key == "lowpass_cutoff_hz") cfg.lowpass_cutoff_hz = v.get<double>();
            else if (key == "highpass_cutoff_hz") cfg.highpass_cutoff_hz = v.get<double>();
            else if (key == "clip_threshold_range") parse_range(v, key, cfg.clip_threshold_lo, cfg.clip_threshold_hi);
            else if (key == "codec_bitrate") cfg.codec_bitrate = v.get<std::string>();
            else if (key == "rmse_denominator") {
                std::string s = v.get<std::string>();
                if (s == "n_minus_1") cfg.rmse_denominator = RmseDenominator::n_minus_one;
                else if (s == "n") cfg.rmse_denominator = RmseDenominator::n;
                else throw ValidationError("config: rmse_denominator must be 'n_minus_1' or 'n'");
            } else if (key == "dataset_mean_weighting") {
                std::string s = v.get<std::string>();
                if (s == "unweighted") cfg.dataset_mean_weighting = MeanWeighting::unweighted;
                else if (s == "clip_count") cfg.dataset_mean_weighting = MeanWeighting::clip_count;
                else throw ValidationError("config: dataset_mean_weighting must be 'unweighted' or 'clip_count'");
            } else {
                throw ValidationError(origin + ": unknown config key '" + key + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(origin + ": bad value for '" + key + "': " + e.what());
        }
    }

    if (cfg.min_votes < 1) throw ValidationError("config: min_votes must be >= 1");
    if (cfg.mos_bins < 1) throw ValidationError("config: mos_bins must be >= 1");
    if (cfg.workers < 1) throw ValidationError("config: workers must be >= 1");
    if (!(cfg.adapter_timeout_seconds > 0))
        throw ValidationError("config: adapter_timeout_seconds must be > 0");
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

} // namespace moskit
