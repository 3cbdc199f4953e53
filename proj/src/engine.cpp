#include "moskit/engine.hpp"

#include "moskit/adapter.hpp"
#include "moskit/audio_io.hpp"
#include "moskit/dsp.hpp"
#include "moskit/errors.hpp"
#include "moskit/rng.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <thread>
#include <unistd.h>

namespace moskit {

namespace {

namespace fs = std::filesystem;

void check_output_dir(const std::string& output_dir) {
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    const fs::path probe =
        fs::path(output_dir) / (".moskit_probe_" + std::to_string(::getpid()));
    std::ofstream out(probe, std::ios::binary | std::ios::trunc);
    out << "probe";
    const bool ok = out.good();
    out.close();
    fs::remove(probe, ec);
    if (!ok) throw IoError("output directory '" + output_dir + "' is not writable");
}

std::vector<std::string> adapters_needed(const ConditionSpec& spec) {
    std::vector<std::string> keys;
    if (spec.has_codec()) keys.push_back(spec.codec_kind == CodecKind::amr ? "amr" : "opus");
    if (spec.second_stage == SecondStage::ns || spec.second_stage == SecondStage::ns_plc)
        keys.push_back("ns");
    if (spec.second_stage == SecondStage::plc || spec.second_stage == SecondStage::ns_plc)
        keys.push_back("plc");
    return keys;
}

Clip process_clip(Clip clip, const ConditionSpec& spec, const std::vector<Clip>& noises,
                  const EngineConfig& config) {
    const auto run_adapter = [&](Clip input, const std::string& key) {
        AdapterOptions options;
        options.timeout_seconds = config.adapter_timeout_seconds;
        options.bitrate = spec.codec_bitrate;
        return run_external_adapter(input, config.adapters.at(key), options);
    };
    const auto mix_background = [&](Clip input) {
        Prng pick(derive_seed(spec.seed, "noise_pick"));
        const Clip& noise = noises[pick.uniform_index(noises.size())];
        return mix_background_noise(input, noise, *spec.snr_db, derive_seed(spec.seed, "background"));
    };

    switch (spec.first_stage) {
        case FirstStage::clean:
            break;
        case FirstStage::white_noise:
            clip = add_white_noise(clip, *spec.snr_db, derive_seed(spec.seed, "white"));
            break;
        case FirstStage::background_noise:
            clip = mix_background(std::move(clip));
            break;
        case FirstStage::filtering:
            clip = apply_filter(clip, *spec.filter_kind, *spec.cutoff_hz);
            break;
        case FirstStage::clipping:
            clip = clip_amplitude(clip, *spec.clip_threshold);
            break;
        case FirstStage::codec:
            clip = run_adapter(std::move(clip), spec.codec_kind == CodecKind::amr ? "amr" : "opus");
            break;
        case FirstStage::background_noise_codec:
            clip = mix_background(std::move(clip));
            clip = run_adapter(std::move(clip), spec.codec_kind == CodecKind::amr ? "amr" : "opus");
            break;
        case FirstStage::white_noise_codec:
            clip = add_white_noise(clip, *spec.snr_db, derive_seed(spec.seed, "white"));
            clip = run_adapter(std::move(clip), spec.codec_kind == CodecKind::amr ? "amr" : "opus");
            break;
        case FirstStage::filtering_codec:
            clip = apply_filter(clip, *spec.filter_kind, *spec.cutoff_hz);
            clip = run_adapter(std::move(clip), spec.codec_kind == CodecKind::amr ? "amr" : "opus");
            break;
        case FirstStage::clipping_background_noise:
            clip = clip_amplitude(clip, *spec.clip_threshold);
            clip = mix_background(std::move(clip));
            break;
    }

    switch (spec.second_stage) {
        case SecondStage::none:
            break;
        case SecondStage::ns:
            clip = run_adapter(std::move(clip), "ns");
            break;
        case SecondStage::ns_plc:
            clip = run_adapter(std::move(clip), "ns");
            clip = run_adapter(std::move(clip), "plc");
            break;
        case SecondStage::plc:
            clip = run_adapter(std::move(clip), "plc");
            break;
    }
    return clip;
}

} // namespace

ExecutionResult execute_plan(const ConditionPlan& plan, const DatasetManifest& sources,
                             const std::string& output_dir, const EngineConfig& config) {
    if (plan.assignments.empty()) throw ValidationError("execute_plan: empty plan");

    check_output_dir(output_dir);

    std::map<std::string, const ManifestRow*> by_id;
    for (const auto& row : sources.rows) by_id.emplace(row.clip_id, &row);

    std::vector<std::string> missing_clips;
    std::set<std::string> missing_adapters;
    bool needs_noise = false;
    for (const auto& a : plan.assignments) {
        a.spec.validate();
        const auto it = by_id.find(a.clip_id);
        if (it == by_id.end() || it->second->audio_path.empty() ||
            !fs::exists(it->second->audio_path)) {
            if (missing_clips.size() < 10) missing_clips.push_back(a.clip_id);
        }
        for (const auto& key : adapters_needed(a.spec))
            if (!config.adapters.count(key)) missing_adapters.insert(key);
        needs_noise = needs_noise || a.spec.has_background();
    }
    if (!missing_clips.empty()) {
        std::string msg = "execute_plan: source audio missing for:";
        for (const auto& id : missing_clips) msg += " " + id;
        throw ValidationError(msg);
    }
    if (!missing_adapters.empty()) {
        std::string msg = "execute_plan: no adapter configured for:";
        for (const auto& key : missing_adapters) msg += " " + key;
        throw ValidationError(msg);
    }
    if (needs_noise && config.noise_files.empty())
        throw ValidationError("execute_plan: plan uses background noise but no noise files given");

    std::vector<Clip> noises;
    for (const auto& path : config.noise_files) noises.push_back(load_audio(path));

    struct Slot {
        std::optional<ManifestRow> row;
        std::optional<SkippedClip> skipped;
        std::exception_ptr failure;
    };
    std::vector<Slot> slots(plan.assignments.size());
    std::atomic<std::size_t> next{0};

    const auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plan.assignments.size()) return;
            const PlanAssignment& a = plan.assignments[i];
            const std::string tag = a.spec.tag();
            try {
                Clip clip = load_audio(by_id.at(a.clip_id)->audio_path);
                clip.clip_id = a.clip_id;
                clip = process_clip(std::move(clip), a.spec, noises, config);

                const fs::path out_path = fs::path(output_dir) / (a.clip_id + "__" + tag + ".wav");
                save_audio(clip, out_path.string());

                ManifestRow row;
                row.clip_id = a.clip_id;
                row.dataset = by_id.at(a.clip_id)->dataset;
                row.audio_path = out_path.string();
                row.condition = tag;
                slots[i].row = std::move(row);
            } catch (const AdapterError& e) {
                slots[i].skipped = SkippedClip{a.clip_id, tag, e.what()};
            } catch (...) {
                slots[i].failure = std::current_exception();
            }
        }
    };

    const int workers = std::clamp(config.workers, 1, 64);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    ExecutionResult result;
    std::set<std::string> datasets;
    for (auto& slot : slots) {
        if (slot.failure) std::rethrow_exception(slot.failure);
        if (slot.skipped) result.skipped.push_back(std::move(*slot.skipped));
        if (slot.row) {
            datasets.insert(slot.row->dataset);
            result.manifest.rows.push_back(std::move(*slot.row));
        }
    }
    if (datasets.size() == 1) result.manifest.dataset = *datasets.begin();
    return result;
}

} // namespace moskit
