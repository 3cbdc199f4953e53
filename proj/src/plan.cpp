#include "moskit/plan.hpp"

#include "moskit/errors.hpp"
#include "moskit/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace moskit {

namespace {

constexpr const char* kStage1Rows[] = {
    "white_noise",
    "background_noise",
    "filtering",
    "clipping",
    "codec",
    "background_noise+codec",
    "white_noise+codec",
    "filtering+codec",
    "clipping+background_noise",
};

constexpr const char* kStage2Rows[] = {
    "first_only", "first+ns", "first+ns+plc", "clean", "clean+plc",
};

FirstStage stage1_from_row(const std::string& row) {
    if (row == "white_noise") return FirstStage::white_noise;
    if (row == "background_noise") return FirstStage::background_noise;
    if (row == "filtering") return FirstStage::filtering;
    if (row == "clipping") return FirstStage::clipping;
    if (row == "codec") return FirstStage::codec;
    if (row == "background_noise+codec") return FirstStage::background_noise_codec;
    if (row == "white_noise+codec") return FirstStage::white_noise_codec;
    if (row == "filtering+codec") return FirstStage::filtering_codec;
    if (row == "clipping+background_noise") return FirstStage::clipping_background_noise;
    if (row == "clean") return FirstStage::clean;
    throw ValidationError("unknown first-step condition row '" + row + "'");
}

std::string row_from_stage1(FirstStage s) {
    switch (s) {
        case FirstStage::clean: return "clean";
        case FirstStage::white_noise: return "white_noise";
        case FirstStage::background_noise: return "background_noise";
        case FirstStage::filtering: return "filtering";
        case FirstStage::clipping: return "clipping";
        case FirstStage::codec: return "codec";
        case FirstStage::background_noise_codec: return "background_noise+codec";
        case FirstStage::white_noise_codec: return "white_noise+codec";
        case FirstStage::filtering_codec: return "filtering+codec";
        case FirstStage::clipping_background_noise: return "clipping+background_noise";
    }
    throw ValidationError("invalid first-step value");
}

SecondStage stage2_from_row(const std::string& row) {
    if (row == "first_only" || row == "clean") return SecondStage::none;
    if (row == "first+ns") return SecondStage::ns;
    if (row == "first+ns+plc") return SecondStage::ns_plc;
    if (row == "clean+plc") return SecondStage::plc;
    throw ValidationError("unknown second-step condition row '" + row + "'");
}

bool stage2_has_first_step(const std::string& row) {
    return row == "first_only" || row == "first+ns" || row == "first+ns+plc";
}

std::string second_stage_suffix(SecondStage s) {
    switch (s) {
        case SecondStage::none: return "";
        case SecondStage::ns: return "+ns";
        case SecondStage::ns_plc: return "+ns+plc";
        case SecondStage::plc: return "+plc";
    }
    throw ValidationError("invalid second-step value");
}

WeightTable normalize(const WeightTable& table, const char* what) {
    double sum = 0.0;
    for (const auto& [key, w] : table) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ValidationError(std::string(what) + ": weight for '" + key +
                                  "' must be finite and non-negative");
        sum += w;
    }
    if (!(sum > 0.0)) throw ValidationError(std::string(what) + ": all weights are zero");
    WeightTable out = table;
    for (auto& [key, w] : out) w /= sum;
    return out;
}

} // namespace

bool ConditionSpec::has_white() const {
    return first_stage == FirstStage::white_noise || first_stage == FirstStage::white_noise_codec;
}

bool ConditionSpec::has_background() const {
    return first_stage == FirstStage::background_noise ||
           first_stage == FirstStage::background_noise_codec ||
           first_stage == FirstStage::clipping_background_noise;
}

bool ConditionSpec::has_filter() const {
    return first_stage == FirstStage::filtering || first_stage == FirstStage::filtering_codec;
}

bool ConditionSpec::has_clipping() const {
    return first_stage == FirstStage::clipping ||
           first_stage == FirstStage::clipping_background_noise;
}

bool ConditionSpec::has_codec() const {
    return first_stage == FirstStage::codec || first_stage == FirstStage::background_noise_codec ||
           first_stage == FirstStage::white_noise_codec ||
           first_stage == FirstStage::filtering_codec;
}

std::string ConditionSpec::tag() const {
    std::string base;
    switch (first_stage) {
        case FirstStage::clean: base = "clean"; break;
        case FirstStage::white_noise: base = "white_noise"; break;
        case FirstStage::background_noise: base = "background_noise"; break;
        case FirstStage::clipping: base = "clipping"; break;
        case FirstStage::clipping_background_noise: base = "clipping+background_noise"; break;
        case FirstStage::filtering:
            base = filter_kind == FilterKind::lowpass ? "lowpass" : "highpass";
            break;
        case FirstStage::codec:
            base = codec_kind == CodecKind::amr ? "codec_amr" : "codec_opus";
            break;
        case FirstStage::background_noise_codec:
            base = codec_kind == CodecKind::amr ? "background_noise+codec_amr"
                                                : "background_noise+codec_opus";
            break;
        case FirstStage::white_noise_codec:
            base = codec_kind == CodecKind::amr ? "white_noise+codec_amr"
                                                : "white_noise+codec_opus";
            break;
        case FirstStage::filtering_codec:
            base = (filter_kind == FilterKind::lowpass ? "lowpass" : "highpass");
            base += codec_kind == CodecKind::amr ? "+codec_amr" : "+codec_opus";
            break;
    }
    return base + second_stage_suffix(second_stage);
}

void ConditionSpec::validate() const {
    const bool needs_snr = has_white() || has_background();
    if (needs_snr != snr_db.has_value())
        throw ValidationError("condition '" + row_from_stage1(first_stage) + "': snr_db " +
                              (needs_snr ? "missing" : "present but unused"));
    if (snr_db && !std::isfinite(*snr_db))
        throw ValidationError("condition: snr_db must be finite");
    if (has_filter() != filter_kind.has_value() || has_filter() != cutoff_hz.has_value())
        throw ValidationError("condition '" + row_from_stage1(first_stage) + "': filter kind/cutoff " +
                              (has_filter() ? "missing" : "present but unused"));
    if (cutoff_hz && !(*cutoff_hz > 0.0))
        throw ValidationError("condition: cutoff_hz must be positive");
    if (has_clipping() != clip_threshold.has_value())
        throw ValidationError("condition '" + row_from_stage1(first_stage) + "': clip threshold " +
                              (has_clipping() ? "missing" : "present but unused"));
    if (clip_threshold && !(*clip_threshold > 0.0 && *clip_threshold <= 1.0))
        throw ValidationError("condition: clip threshold must be in (0, 1]");
    if (has_codec() != codec_kind.has_value())
        throw ValidationError("condition '" + row_from_stage1(first_stage) + "': codec kind " +
                              (has_codec() ? "missing" : "present but unused"));
}

std::map<std::string, std::size_t> ConditionPlan::stage1_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& a : assignments) ++counts[a.stage1_row];
    return counts;
}

std::map<std::string, std::size_t> ConditionPlan::stage2_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& a : assignments) ++counts[a.stage2_row];
    return counts;
}

WeightTable default_stage1_weights() {
    return {
        {"white_noise", 10.0},
        {"background_noise", 60.0},
        {"filtering", 3.75},
        {"clipping", 1.25},
        {"codec", 5.0},
        {"background_noise+codec", 5.0},
        {"white_noise+codec", 5.0},
        {"filtering+codec", 5.0},
        {"clipping+background_noise", 5.0},
    };
}

WeightTable default_stage2_weights() {
    return {
        {"first_only", 60.0}, {"first+ns", 10.0}, {"first+ns+plc", 1.25},
        {"clean", 3.75},      {"clean+plc", 1.25},
    };
}

std::vector<std::size_t> largest_remainder_apportion(const std::vector<double>& weights,
                                                     std::size_t total) {
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ValidationError("apportion: weights must be finite and non-negative");
        sum += w;
    }
    if (!(sum > 0.0)) throw ValidationError("apportion: all weights are zero");

    std::vector<std::size_t> counts(weights.size(), 0);
    std::vector<double> remainders(weights.size(), 0.0);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double share = static_cast<double>(total) * weights[i] / sum;
        counts[i] = static_cast<std::size_t>(std::floor(share));
        remainders[i] = share - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t i = 0; assigned < total; ++assigned, ++i) ++counts[order[i % order.size()]];
    return counts;
}

ConditionPlan sample_plan(const std::vector<std::string>& clip_ids,
                          const WeightTable& stage1_weights, const WeightTable& stage2_weights,
                          std::uint64_t master_seed, const PlanParams& params) {
    if (clip_ids.empty()) throw ValidationError("sample_plan: empty clip list");
    {
        std::set<std::string> unique(clip_ids.begin(), clip_ids.end());
        if (unique.size() != clip_ids.size())
            throw ValidationError("sample_plan: duplicate clip ids in input");
    }
    for (const auto& [row, w] : stage1_weights) {
        (void)w;
        stage1_from_row(row); // rejects unknown rows
    }
    for (const auto& [row, w] : stage2_weights) {
        (void)w;
        stage2_from_row(row);
    }

    ConditionPlan plan;
    plan.master_seed = master_seed;
    plan.stage1_raw = stage1_weights;
    plan.stage2_raw = stage2_weights;
    plan.stage1_normalized = normalize(stage1_weights, "sample_plan stage1");
    plan.stage2_normalized = normalize(stage2_weights, "sample_plan stage2");

    // Second-step rows cover the whole corpus.
    std::vector<std::string> order(clip_ids);
    std::sort(order.begin(), order.end());
    {
        Prng rng(derive_seed(master_seed, "plan.stage2"));
        rng.shuffle(order);
    }
    std::vector<double> w2;
    for (const auto& [row, w] : plan.stage2_normalized) {
        (void)row;
        w2.push_back(w);
    }
    const std::vector<std::size_t> counts2 = largest_remainder_apportion(w2, order.size());

    std::map<std::string, std::string> stage2_of; // clip -> stage2 row
    std::size_t cursor = 0;
    for (std::size_t r = 0; r < plan.stage2_normalized.size(); ++r) {
        for (std::size_t k = 0; k < counts2[r]; ++k)
            stage2_of[order[cursor++]] = plan.stage2_normalized[r].first;
    }

    // First-step rows cover the clips whose second-step row includes the
    // first-step impairments; the rest stay clean.
    std::vector<std::string> first_step_clips;
    for (const auto& id : clip_ids)
        if (stage2_has_first_step(stage2_of.at(id))) first_step_clips.push_back(id);
    std::sort(first_step_clips.begin(), first_step_clips.end());
    {
        Prng rng(derive_seed(master_seed, "plan.stage1"));
        rng.shuffle(first_step_clips);
    }
    std::vector<double> w1;
    for (const auto& [row, w] : plan.stage1_normalized) {
        (void)row;
        w1.push_back(w);
    }
    const std::vector<std::size_t> counts1 =
        largest_remainder_apportion(w1, first_step_clips.size());

    std::map<std::string, std::string> stage1_of; // clip -> stage1 row
    cursor = 0;
    for (std::size_t r = 0; r < plan.stage1_normalized.size(); ++r) {
        for (std::size_t k = 0; k < counts1[r]; ++k)
            stage1_of[first_step_clips[cursor++]] = plan.stage1_normalized[r].first;
    }

    std::vector<std::string> sorted_ids(clip_ids);
    std::sort(sorted_ids.begin(), sorted_ids.end());
    for (const auto& id : sorted_ids) {
        PlanAssignment a;
        a.clip_id = id;
        a.stage2_row = stage2_of.at(id);
        a.stage1_row = stage2_has_first_step(a.stage2_row) ? stage1_of.at(id) : "clean";

        ConditionSpec spec;
        spec.first_stage = stage1_from_row(a.stage1_row);
        spec.second_stage = stage2_from_row(a.stage2_row);
        spec.seed = derive_seed(master_seed, "cond:" + id);
        spec.codec_bitrate = params.codec_bitrate;

        // Fixed draw order so realized parameters depend only on the seed.
        Prng rng(derive_seed(spec.seed, "params"));
        if (spec.has_filter()) {
            spec.filter_kind = rng.coin() ? FilterKind::lowpass : FilterKind::highpass;
            spec.cutoff_hz = *spec.filter_kind == FilterKind::lowpass ? params.lowpass_cutoff_hz
                                                                      : params.highpass_cutoff_hz;
        }
        if (spec.has_codec()) spec.codec_kind = rng.coin() ? CodecKind::amr : CodecKind::opus;
        if (spec.has_white()) spec.snr_db = rng.uniform(params.white_snr_lo, params.white_snr_hi);
        if (spec.has_background())
            spec.snr_db = rng.uniform(params.background_snr_lo, params.background_snr_hi);
        if (spec.has_clipping())
            spec.clip_threshold = rng.uniform(params.clip_threshold_lo, params.clip_threshold_hi);

        spec.validate();
        a.spec = std::move(spec);
        plan.assignments.push_back(std::move(a));
    }
    return plan;
}

namespace {

nlohmann::ordered_json table_to_json(const WeightTable& t) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [key, w] : t) arr.push_back({{"row", key}, {"weight", w}});
    return arr;
}

WeightTable table_from_json(const nlohmann::json& arr, const char* what) {
    if (!arr.is_array()) throw ValidationError(std::string(what) + ": expected an array");
    WeightTable t;
    for (const auto& item : arr)
        t.emplace_back(item.at("row").get<std::string>(), item.at("weight").get<double>());
    return t;
}

} // namespace

void save_plan(const std::string& path, const ConditionPlan& plan) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["master_seed"] = plan.master_seed;
    doc["stage1_weights"] = table_to_json(plan.stage1_raw);
    doc["stage1_normalized"] = table_to_json(plan.stage1_normalized);
    doc["stage2_weights"] = table_to_json(plan.stage2_raw);
    doc["stage2_normalized"] = table_to_json(plan.stage2_normalized);

    nlohmann::ordered_json assignments = nlohmann::ordered_json::array();
    for (const auto& a : plan.assignments) {
        nlohmann::ordered_json item;
        item["clip_id"] = a.clip_id;
        item["stage1_row"] = a.stage1_row;
        item["stage2_row"] = a.stage2_row;
        item["condition"] = a.spec.tag();
        item["seed"] = a.spec.seed;
        nlohmann::ordered_json p;
        if (a.spec.snr_db) p["snr_db"] = *a.spec.snr_db;
        if (a.spec.filter_kind)
            p["filter"] = *a.spec.filter_kind == FilterKind::lowpass ? "lowpass" : "highpass";
        if (a.spec.cutoff_hz) p["cutoff_hz"] = *a.spec.cutoff_hz;
        if (a.spec.clip_threshold) p["clip_threshold"] = *a.spec.clip_threshold;
        if (a.spec.codec_kind)
            p["codec"] = *a.spec.codec_kind == CodecKind::amr ? "amr" : "opus";
        if (!a.spec.codec_bitrate.empty()) p["bitrate"] = a.spec.codec_bitrate;
        item["params"] = std::move(p);
        assignments.push_back(std::move(item));
    }
    doc["assignments"] = std::move(assignments);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write plan file '" + path + "'");
    out << doc.dump(2) << '\n';
    if (!out.good()) throw IoError("failed writing plan file '" + path + "'");
}

ConditionPlan load_plan(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read plan file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("plan file '" + path + "': " + e.what());
    }
    try {
        ConditionPlan plan;
        plan.master_seed = doc.at("master_seed").get<std::uint64_t>();
        plan.stage1_raw = table_from_json(doc.at("stage1_weights"), "stage1_weights");
        plan.stage1_normalized = table_from_json(doc.at("stage1_normalized"), "stage1_normalized");
        plan.stage2_raw = table_from_json(doc.at("stage2_weights"), "stage2_weights");
        plan.stage2_normalized = table_from_json(doc.at("stage2_normalized"), "stage2_normalized");
        for (const auto& item : doc.at("assignments")) {
            PlanAssignment a;
            a.clip_id = item.at("clip_id").get<std::string>();
            a.stage1_row = item.at("stage1_row").get<std::string>();
            a.stage2_row = item.at("stage2_row").get<std::string>();
            ConditionSpec spec;
            spec.first_stage = stage1_from_row(a.stage1_row);
            spec.second_stage = stage2_from_row(a.stage2_row);
            spec.seed = item.at("seed").get<std::uint64_t>();
            const auto& p = item.at("params");
            if (p.contains("snr_db")) spec.snr_db = p.at("snr_db").get<double>();
            if (p.contains("filter"))
                spec.filter_kind = p.at("filter").get<std::string>() == "lowpass"
                                       ? FilterKind::lowpass
                                       : FilterKind::highpass;
            if (p.contains("cutoff_hz")) spec.cutoff_hz = p.at("cutoff_hz").get<double>();
            if (p.contains("clip_threshold"))
                spec.clip_threshold = p.at("clip_threshold").get<double>();
            if (p.contains("codec"))
                spec.codec_kind =
                    p.at("codec").get<std::string>() == "amr" ? CodecKind::amr : CodecKind::opus;
            if (p.contains("bitrate")) spec.codec_bitrate = p.at("bitrate").get<std::string>();
            spec.validate();
            a.spec = std::move(spec);
            plan.assignments.push_back(std::move(a));
        }
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("plan file '" + path + "': " + e.what());
    }
}

} // namespace moskit
