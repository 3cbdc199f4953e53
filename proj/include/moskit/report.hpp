#pragma once

#include "moskit/harness.hpp"
#include "moskit/ratings.hpp"
#include "moskit/types.hpp"

#include <string>
#include <vector>

namespace moskit {

void save_leaderboard_csv(const std::string& path, const Leaderboard& board);

// JSON form carries everything, including per-(model, dataset) mapping
// coefficients; loading it back reproduces the Leaderboard exactly.
void save_leaderboard_json(const std::string& path, const Leaderboard& board);
Leaderboard load_leaderboard_json(const std::string& path);

// columns: dataset, avg_ratings_per_clip (integer), avg_ci95, mos_min,
// mos_max (two decimals each).
void save_stats_csv(const std::string& path, const std::vector<DescriptiveStats>& stats);

// Histogram of MOS values, 16 bins of width 0.25 over [1, 5]; the last bin
// includes 5.0.
std::string render_mos_histogram_svg(const std::string& dataset, const std::vector<double>& mos);

// Grouped bars: PCC, RMSE, RMSE after mapping, and outlier ratio per model,
// for one dataset.
std::string render_metrics_chart_svg(const Leaderboard& board, const std::string& dataset);

// Write the full bundle into output_dir: leaderboard.csv / leaderboard.json,
// stats.csv plus one MOS histogram per labeled manifest, and one metrics
// chart per leaderboard dataset.
void render_report(const Leaderboard& board, const std::vector<DatasetManifest>& label_manifests,
                   const std::string& output_dir);

} // namespace moskit
