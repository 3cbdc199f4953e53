#pragma once

#include "moskit/config.hpp"
#include "moskit/metrics.hpp"
#include "moskit/types.hpp"

#include <string>
#include <vector>

namespace moskit {

struct EvaluateOptions {
    int grid_points = 1001;
    RmseDenominator rmse_denominator = RmseDenominator::n_minus_one;
};

// Score one model against every dataset: PCC and RMSE on the raw scores, a
// monotone third-order mapping fitted per dataset, RMSE after mapping, and
// the outlier ratio of mapped predictions against per-clip ci95. Every clip
// of every dataset must have a prediction; gaps raise an error naming them.
std::vector<MetricReport> evaluate_model(const PredictionSet& predictions,
                                         const std::vector<DatasetManifest>& datasets,
                                         const EvaluateOptions& options = {});

struct LeaderboardRow {
    int rank = 0;
    std::string model_id;
    double mean_rmse_map = 0.0;
    double mean_rmse = 0.0;
    double mean_pcc = 0.0;
    double mean_or = 0.0;
    std::vector<MetricReport> reports; // one per dataset, dataset-name order

    bool operator==(const LeaderboardRow&) const = default;
};

struct Leaderboard {
    std::vector<std::string> datasets; // sorted dataset names
    std::vector<LeaderboardRow> rows;  // ascending mean_rmse_map, ranks from 1

    bool operator==(const Leaderboard&) const = default;
};

// Order models by mean RMSE after mapping (ascending), averaging each metric
// over datasets (unweighted by default, clip-count weighted behind the
// flag). Ties break by lower mean RMSE, then higher mean PCC, then model id.
// Every model must cover the same dataset list.
Leaderboard rank_models(const std::vector<std::vector<MetricReport>>& model_reports,
                        MeanWeighting weighting = MeanWeighting::unweighted);

} // namespace moskit
