#pragma once

#include "moskit/types.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace moskit {

struct ExcludedClip {
    std::string clip_id;
    std::string reason;
    int n_ratings = 0;
};

struct AggregationResult {
    std::vector<MOSLabel> labels;       // sorted by clip_id
    std::vector<ExcludedClip> excluded; // sorted by clip_id
    std::size_t duplicates_removed = 0;
};

// t(0.975, n-1) * stddev / sqrt(n); zero when n < 2 or stddev is 0.
double t_interval_half_width(double stddev, int n);

// Collapse raw votes into one label per clip: mos is the arithmetic mean,
// ci95 the two-sided Student-t half-width on the mean (zero when n < 2 or the
// votes are constant). Exact duplicate (clip, rater, rating) rows are dropped
// first; clips with fewer than min_votes votes are excluded and reported.
AggregationResult aggregate_ratings(const std::vector<RatingRecord>& records, int min_votes);

struct DescriptiveStats {
    std::string dataset;
    double avg_ratings_per_clip = 0.0;
    double avg_ci95 = 0.0;
    double mos_min = 0.0;
    double mos_max = 0.0;
    std::size_t clip_count = 0;
};

// Per-dataset rating statistics over labeled manifest rows.
std::vector<DescriptiveStats> descriptive_stats(const std::vector<DatasetManifest>& manifests);

// Split a labeled manifest into train/eval so the MOS distribution stays
// balanced: strata are (condition tag x equal-width MOS bin over [1,5]),
// per-stratum quotas use round-half-to-even, and a largest-remainder pass
// corrects the totals so the global train size lands within one clip of
// train_fraction * N. Same seed, same partition.
std::pair<DatasetManifest, DatasetManifest> stratified_split(const DatasetManifest& manifest,
                                                             double train_fraction, int mos_bins,
                                                             std::uint64_t seed);

void save_exclusion_report(const std::string& path, const std::vector<ExcludedClip>& excluded);

} // namespace moskit
