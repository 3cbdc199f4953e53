#pragma once

#include "moskit/plan.hpp"
#include "moskit/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace moskit {

struct EngineConfig {
    // Command templates keyed "amr", "opus", "ns", "plc".
    std::map<std::string, std::string> adapters;
    double adapter_timeout_seconds = 120.0;
    std::vector<std::string> noise_files; // background noise WAVs
    int workers = 1;
};

struct SkippedClip {
    std::string clip_id;
    std::string condition;
    std::string reason;
};

struct ExecutionResult {
    DatasetManifest manifest;         // one unrated row per written clip
    std::vector<SkippedClip> skipped; // adapter failures, in clip order
};

// Synthesize the corpus a plan describes: run each source clip through its
// first- and second-step chain and write `{clip_id}__{condition}.wav` files
// into output_dir. Preconditions (writable output directory, sources
// present, adapters configured, noise files available) are checked before
// any processing. Adapter failures skip the clip and are reported in the
// result; every other failure aborts. Results are identical for any worker
// count because all randomness comes from per-clip seeds.
ExecutionResult execute_plan(const ConditionPlan& plan, const DatasetManifest& sources,
                             const std::string& output_dir, const EngineConfig& config = {});

} // namespace moskit
