#pragma once

#include "moskit/config.hpp"
#include "moskit/dsp.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace moskit {

// First-step impairment rows of the condition weight table. Filter and codec
// rows carry the realized choice (highpass/lowpass, amr/opus) in ConditionSpec.
enum class FirstStage {
    clean,
    white_noise,
    background_noise,
    filtering,
    clipping,
    codec,
    background_noise_codec,
    white_noise_codec,
    filtering_codec,
    clipping_background_noise,
};

enum class SecondStage { none, ns, ns_plc, plc };

enum class CodecKind { amr, opus };

// Fully realized processing recipe for one clip.
struct ConditionSpec {
    FirstStage first_stage = FirstStage::clean;
    SecondStage second_stage = SecondStage::none;
    std::optional<double> snr_db;          // white or background noise steps
    std::optional<FilterKind> filter_kind; // filtering steps
    std::optional<double> cutoff_hz;       // filtering steps
    std::optional<double> clip_threshold;  // clipping steps
    std::optional<CodecKind> codec_kind;   // codec steps
    std::string codec_bitrate;             // free-form tag handed to the adapter
    std::uint64_t seed = 0;

    bool has_white() const;
    bool has_background() const;
    bool has_filter() const;
    bool has_clipping() const;
    bool has_codec() const;

    // Condition tag used in manifests and output filenames, e.g.
    // "white_noise+codec_opus+ns".
    std::string tag() const;

    // Check that parameters are present exactly for the steps that need
    // them and lie in their valid ranges.
    void validate() const;
};

struct PlanAssignment {
    std::string clip_id;
    std::string stage1_row; // weight-table row the clip was drawn for
    std::string stage2_row;
    ConditionSpec spec;
};

struct ConditionPlan {
    std::vector<PlanAssignment> assignments; // sorted by clip_id
    WeightTable stage1_raw;
    WeightTable stage1_normalized;
    WeightTable stage2_raw;
    WeightTable stage2_normalized;
    std::uint64_t master_seed = 0;

    std::map<std::string, std::size_t> stage1_counts() const;
    std::map<std::string, std::size_t> stage2_counts() const;
};

// Sampling ranges and fixed parameters used when realizing specs.
struct PlanParams {
    double white_snr_lo = 0.0;
    double white_snr_hi = 40.0;
    double background_snr_lo = 0.0;
    double background_snr_hi = 40.0;
    double lowpass_cutoff_hz = 3500.0;
    double highpass_cutoff_hz = 300.0;
    double clip_threshold_lo = 0.1;
    double clip_threshold_hi = 0.5;
    std::string codec_bitrate;
};

// First-step table: white noise 10, nonstationary background noise 60,
// filtering 3.75, clipping 1.25, then five combined rows at 5 each.
WeightTable default_stage1_weights();

// Second-step table as printed (sums to 76.25; normalized before use):
// first-step only 60, +ns 10, +ns+plc 1.25, clean 3.75, clean+plc 1.25.
WeightTable default_stage2_weights();

// Integer apportionment of `total` across normalized weights: floor shares,
// then leftovers to the largest fractional remainders, ties broken by row
// order. Every count is within 1 of its exact share and the counts sum to
// total.
std::vector<std::size_t> largest_remainder_apportion(const std::vector<double>& weights,
                                                     std::size_t total);

// Draw a complete degradation plan: second-step rows are apportioned over
// all clips, first-step rows over the clips that carry first-step
// impairments, and per-clip parameters come from seeds derived from
// (master_seed, clip_id) so the plan does not depend on input order.
ConditionPlan sample_plan(const std::vector<std::string>& clip_ids,
                          const WeightTable& stage1_weights, const WeightTable& stage2_weights,
                          std::uint64_t master_seed, const PlanParams& params = {});

void save_plan(const std::string& path, const ConditionPlan& plan);
ConditionPlan load_plan(const std::string& path);

} // namespace moskit
