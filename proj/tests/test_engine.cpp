#include "moskit/adapter.hpp"
#include "moskit/engine.hpp"

#include "moskit/audio_io.hpp"
#include "moskit/errors.hpp"
#include "moskit/plan.hpp"
#include "test_util.hpp"

#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

using namespace moskit;

namespace {

DatasetManifest tone_sources(const testutil::TempDir& tmp, int count) {
    DatasetManifest sources;
    sources.dataset = "demo";
    for (int i = 0; i < count; ++i) {
        Clip tone = testutil::make_tone("s" + std::to_string(i), 16000, 1.0, 300.0 + 100.0 * i);
        tone.dataset = "demo";
        ManifestRow row;
        row.clip_id = tone.clip_id;
        row.dataset = "demo";
        row.audio_path = tmp.file(tone.clip_id + ".wav");
        save_audio(tone, row.audio_path);
        sources.rows.push_back(std::move(row));
    }
    return sources;
}

std::vector<std::string> ids_of(const DatasetManifest& m) {
    std::vector<std::string> ids;
    for (const auto& r : m.rows) ids.push_back(r.clip_id);
    return ids;
}

} // namespace

TEST_CASE("a copy command is an identity adapter") {
    Clip tone = testutil::make_tone("orig", 16000, 0.5, 440.0);
    tone.dataset = "demo";
    Clip back = run_external_adapter(tone, "cp {in} {out}");
    CHECK(back.clip_id == "orig");
    CHECK(back.dataset == "demo");
    CHECK(back.sample_rate == 16000);
    REQUIRE(back.samples.size() == tone.samples.size());
    for (std::size_t i = 0; i < back.samples.size(); ++i)
        CHECK(std::abs(back.samples[i] - tone.samples[i]) <= 1.0 / 32768.0);
}

TEST_CASE("adapter failures carry the captured diagnostics") {
    Clip tone = testutil::make_tone("t", 16000, 0.2, 440.0);
    try {
        run_external_adapter(tone, "echo boom >&2; false # {in} {out}");
        FAIL("expected AdapterError");
    } catch (const AdapterError& e) {
        std::string msg = e.what();
        CHECK(msg.find("status 1") != std::string::npos);
        CHECK(msg.find("boom") != std::string::npos);
    }
}

TEST_CASE("adapter templates must name both files") {
    Clip tone = testutil::make_tone("t", 16000, 0.2, 440.0);
    CHECK_THROWS_AS(run_external_adapter(tone, "cp {in} /tmp/x.wav"), ValidationError);
    CHECK_THROWS_AS(run_external_adapter(tone, "cp a.wav {out}"), ValidationError);
    AdapterOptions opts;
    opts.timeout_seconds = 0.0;
    CHECK_THROWS_AS(run_external_adapter(tone, "cp {in} {out}", opts), ValidationError);
}

TEST_CASE("an adapter that writes nothing is reported") {
    Clip tone = testutil::make_tone("t", 16000, 0.2, 440.0);
    CHECK_THROWS_AS(run_external_adapter(tone, "true # {in} {out}"), AdapterError);
}

TEST_CASE("the adapter reports the sample rate the tool produced") {
    testutil::TempDir tmp;
    Clip low = testutil::make_tone("low", 8000, 0.5, 300.0);
    save_audio(low, tmp.file("low8k.wav"));
    Clip tone = testutil::make_tone("t", 16000, 0.2, 440.0);
    Clip out = run_external_adapter(
        tone, "cp {in} /dev/null && cp " + tmp.file("low8k.wav") + " {out}");
    CHECK(out.sample_rate == 8000);
    CHECK(out.clip_id == "t"); // identity comes from the input, not the file
}

TEST_CASE("the bitrate placeholder reaches the command line") {
    Clip tone = testutil::make_tone("t", 16000, 0.2, 440.0);
    AdapterOptions opts;
    opts.bitrate = "48k";
    Clip ok = run_external_adapter(tone, "[ \"{bitrate}\" = 48k ] && cp {in} {out}", opts);
    CHECK(ok.samples.size() == tone.samples.size());
    AdapterOptions empty;
    CHECK_THROWS_AS(
        run_external_adapter(tone, "[ \"{bitrate}\" = 48k ] && cp {in} {out}", empty),
        AdapterError);
}

TEST_CASE("slow adapters are killed at the deadline") {
    Clip tone = testutil::make_tone("t", 16000, 0.2, 440.0);
    AdapterOptions opts;
    opts.timeout_seconds = 0.3;
    const auto start = std::chrono::steady_clock::now();
    try {
        run_external_adapter(tone, "sleep 30; cp {in} {out}", opts);
        FAIL("expected AdapterError");
    } catch (const AdapterError& e) {
        CHECK(std::string(e.what()).find("timed out") != std::string::npos);
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(elapsed < 5.0);
}

TEST_CASE("executing a plan writes one tagged wav per assignment") {
    testutil::TempDir tmp;
    DatasetManifest sources = tone_sources(tmp, 3);
    WeightTable stage1{{"white_noise", 1.0}, {"clipping", 1.0}, {"filtering", 1.0}};
    WeightTable stage2{{"first_only", 1.0}};
    ConditionPlan plan = sample_plan(ids_of(sources), stage1, stage2, 11);

    const std::string out_dir = tmp.file("out");
    ExecutionResult result = execute_plan(plan, sources, out_dir);
    CHECK(result.skipped.empty());
    REQUIRE(result.manifest.rows.size() == 3);
    CHECK(result.manifest.dataset == "demo");

    std::map<std::string, std::string> tag_of;
    for (const auto& a : plan.assignments) tag_of[a.clip_id] = a.spec.tag();
    for (const auto& row : result.manifest.rows) {
        CHECK(row.condition == tag_of.at(row.clip_id));
        CHECK(row.n_ratings == 0);
        CHECK(std::isnan(row.mos));
        const std::string want =
            (std::filesystem::path(out_dir) / (row.clip_id + "__" + row.condition + ".wav"))
                .string();
        CHECK(row.audio_path == want);
        REQUIRE(std::filesystem::exists(row.audio_path));
        Clip written = load_audio(row.audio_path);
        CHECK(written.sample_rate == 16000);
        for (double s : written.samples) CHECK(std::abs(s) <= 1.0);
    }
}

TEST_CASE("reruns and extra workers produce byte-identical corpora") {
    testutil::TempDir tmp;
    DatasetManifest sources = tone_sources(tmp, 4);
    WeightTable stage1{{"white_noise", 2.0}, {"clipping", 1.0}, {"background_noise", 1.0}};
    WeightTable stage2{{"first_only", 1.0}};
    ConditionPlan plan = sample_plan(ids_of(sources), stage1, stage2, 21);

    Clip hum = testutil::make_tone("hum", 16000, 0.7, 90.0, 0.2);
    const std::string noise_path = tmp.file("hum.wav");
    save_audio(hum, noise_path);
    EngineConfig config;
    config.noise_files = {noise_path};

    ExecutionResult first = execute_plan(plan, sources, tmp.file("a"), config);
    ExecutionResult second = execute_plan(plan, sources, tmp.file("b"), config);
    config.workers = 4;
    ExecutionResult third = execute_plan(plan, sources, tmp.file("c"), config);
    REQUIRE(first.manifest.rows.size() == 4);
    REQUIRE(second.manifest.rows.size() == 4);
    REQUIRE(third.manifest.rows.size() == 4);

    for (std::size_t i = 0; i < first.manifest.rows.size(); ++i) {
        const std::string bytes = testutil::read_text(first.manifest.rows[i].audio_path);
        CHECK(bytes == testutil::read_text(second.manifest.rows[i].audio_path));
        CHECK(bytes == testutil::read_text(third.manifest.rows[i].audio_path));
        CHECK(!bytes.empty());
    }
}

TEST_CASE("clean conditions pass audio through") {
    testutil::TempDir tmp;
    DatasetManifest sources = tone_sources(tmp, 3);
    ConditionPlan plan = sample_plan(ids_of(sources), default_stage1_weights(),
                                     WeightTable{{"clean", 1.0}}, 31);
    ExecutionResult result = execute_plan(plan, sources, tmp.file("out"));
    REQUIRE(result.manifest.rows.size() == 3);
    for (const auto& row : result.manifest.rows) {
        CHECK(row.condition == "clean");
        Clip in = load_audio(tmp.file(row.clip_id + ".wav"));
        Clip out = load_audio(row.audio_path);
        REQUIRE(in.samples.size() == out.samples.size());
        for (std::size_t i = 0; i < in.samples.size(); ++i)
            CHECK(std::abs(in.samples[i] - out.samples[i]) <= 1.0 / 32768.0);
    }
}

TEST_CASE("second-stage adapters run after the first step") {
    testutil::TempDir tmp;
    DatasetManifest sources = tone_sources(tmp, 2);
    ConditionPlan plan = sample_plan(ids_of(sources), WeightTable{{"clipping", 1.0}},
                                     WeightTable{{"first+ns", 1.0}}, 41);
    EngineConfig config;
    config.adapters["ns"] = "cp {in} {out}";
    ExecutionResult result = execute_plan(plan, sources, tmp.file("out"), config);
    REQUIRE(result.manifest.rows.size() == 2);
    for (const auto& row : result.manifest.rows) CHECK(row.condition == "clipping+ns");
}

TEST_CASE("adapter failures skip the clip but keep the run alive") {
    testutil::TempDir tmp;
    DatasetManifest sources = tone_sources(tmp, 3);
    ConditionPlan plan = sample_plan(ids_of(sources), WeightTable{{"codec", 1.0}},
                                     WeightTable{{"first_only", 1.0}}, 51);
    EngineConfig config;
    config.adapters["amr"] = "echo nope >&2; false # {in} {out}";
    config.adapters["opus"] = "echo nope >&2; false # {in} {out}";
    ExecutionResult result = execute_plan(plan, sources, tmp.file("out"), config);
    CHECK(result.manifest.rows.empty());
    REQUIRE(result.skipped.size() == 3);
    for (const auto& s : result.skipped) {
        CHECK(s.condition.rfind("codec_", 0) == 0);
        CHECK(s.reason.find("nope") != std::string::npos);
    }
}

TEST_CASE("plan preconditions abort before any processing") {
    testutil::TempDir tmp;
    DatasetManifest sources = tone_sources(tmp, 2);

    ConditionPlan plan = sample_plan(ids_of(sources), WeightTable{{"codec", 1.0}},
                                     WeightTable{{"first_only", 1.0}}, 61);
    const std::string out_dir = tmp.file("out");
    CHECK_THROWS_AS(execute_plan(plan, sources, out_dir), ValidationError); // no adapters
    CHECK(std::filesystem::is_empty(out_dir));

    ConditionPlan noisy = sample_plan(ids_of(sources), WeightTable{{"background_noise", 1.0}},
                                      WeightTable{{"first_only", 1.0}}, 62);
    CHECK_THROWS_AS(execute_plan(noisy, sources, out_dir), ValidationError); // no noise files
    CHECK(std::filesystem::is_empty(out_dir));

    ConditionPlan widened =
        sample_plan({"s0", "s1", "ghost"}, WeightTable{{"clipping", 1.0}},
                    WeightTable{{"first_only", 1.0}}, 63);
    try {
        execute_plan(widened, sources, out_dir);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }

    CHECK_THROWS_AS(execute_plan(ConditionPlan{}, sources, out_dir), ValidationError);
}

TEST_CASE("an unwritable output directory fails fast") {
    testutil::TempDir tmp;
    DatasetManifest sources = tone_sources(tmp, 2);
    ConditionPlan plan = sample_plan(ids_of(sources), WeightTable{{"clipping", 1.0}},
                                     WeightTable{{"first_only", 1.0}}, 71);
    testutil::write_text(tmp.file("blocker"), "not a directory");
    CHECK_THROWS_AS(execute_plan(plan, sources, tmp.file("blocker") + "/out"), IoError);
}
