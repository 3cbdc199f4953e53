#include "moskit/harness.hpp"

#include "moskit/errors.hpp"
#include "moskit/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace moskit {

std::vector<MetricReport> evaluate_model(const PredictionSet& predictions,
                                         const std::vector<DatasetManifest>& datasets,
                                         const EvaluateOptions& options) {
    if (datasets.empty()) throw ValidationError("evaluate_model: no datasets");

    std::vector<MetricReport> reports;
    for (const auto& manifest : datasets) {
        if (manifest.rows.empty())
            throw ValidationError("evaluate_model: dataset '" + manifest.dataset + "' is empty");

        std::vector<std::string> missing;
        std::vector<double> mos, ci, preds;
        for (const auto& row : manifest.rows) {
            if (!row.rated())
                throw ValidationError("evaluate_model: clip '" + row.clip_id + "' in dataset '" +
                                      manifest.dataset + "' has no ratings");
            const auto it = predictions.entries.find(row.clip_id);
            if (it == predictions.entries.end()) {
                if (missing.size() < 10) missing.push_back(row.clip_id);
                continue;
            }
            mos.push_back(row.mos);
            ci.push_back(row.ci95);
            preds.push_back(it->second);
        }
        if (!missing.empty()) {
            std::string msg = "evaluate_model: model '" + predictions.model_id +
                              "' is missing predictions in dataset '" + manifest.dataset + "':";
            for (const auto& id : missing) msg += " " + id;
            throw ValidationError(msg);
        }

        MetricReport report;
        report.dataset = manifest.dataset;
        report.model_id = predictions.model_id;
        report.n = static_cast<int>(mos.size());
        report.pcc = pcc(mos, preds);
        report.rmse = rmse(mos, preds, options.rmse_denominator);
        report.mapping = fit_monotone_cubic(mos, preds, options.grid_points);
        const std::vector<double> mapped = apply_mapping(report.mapping, preds);
        report.rmse_map = rmse(mos, mapped, options.rmse_denominator);
        report.outlier_ratio = outlier_ratio(mos, ci, mapped);
        reports.push_back(std::move(report));
    }
    return reports;
}

Leaderboard rank_models(const std::vector<std::vector<MetricReport>>& model_reports,
                        MeanWeighting weighting) {
    if (model_reports.empty()) throw ValidationError("rank_models: no models");

    Leaderboard board;
    for (const auto& reports : model_reports) {
        if (reports.empty()) throw ValidationError("rank_models: model with no reports");

        LeaderboardRow row;
        row.model_id = reports.front().model_id;
        row.reports = reports;
        std::sort(row.reports.begin(), row.reports.end(),
                  [](const MetricReport& a, const MetricReport& b) { return a.dataset < b.dataset; });

        std::vector<std::string> names;
        double weight_sum = 0.0;
        for (const auto& r : row.reports) {
            if (r.model_id != row.model_id)
                throw ValidationError("rank_models: mixed model ids '" + row.model_id + "' and '" +
                                      r.model_id + "' in one report list");
            names.push_back(r.dataset);
            const double w =
                weighting == MeanWeighting::clip_count ? static_cast<double>(r.n) : 1.0;
            row.mean_rmse_map += w * r.rmse_map;
            row.mean_rmse += w * r.rmse;
            row.mean_pcc += w * r.pcc;
            row.mean_or += w * r.outlier_ratio;
            weight_sum += w;
        }
        if (std::set<std::string>(names.begin(), names.end()).size() != names.size())
            throw ValidationError("rank_models: duplicate dataset in reports for model '" +
                                  row.model_id + "'");
        if (!(weight_sum > 0.0))
            throw ValidationError("rank_models: zero total weight for model '" + row.model_id + "'");
        row.mean_rmse_map /= weight_sum;
        row.mean_rmse /= weight_sum;
        row.mean_pcc /= weight_sum;
        row.mean_or /= weight_sum;

        if (board.datasets.empty()) {
            board.datasets = names;
        } else if (board.datasets != names) {
            throw ValidationError("rank_models: model '" + row.model_id +
                                  "' was evaluated on a different dataset list");
        }
        board.rows.push_back(std::move(row));
    }

    {
        std::set<std::string> ids;
        for (const auto& row : board.rows)
            if (!ids.insert(row.model_id).second)
                throw ValidationError("rank_models: duplicate model id '" + row.model_id + "'");
    }

    std::sort(board.rows.begin(), board.rows.end(),
              [](const LeaderboardRow& a, const LeaderboardRow& b) {
                  if (a.mean_rmse_map != b.mean_rmse_map) return a.mean_rmse_map < b.mean_rmse_map;
                  if (a.mean_rmse != b.mean_rmse) return a.mean_rmse < b.mean_rmse;
                  if (a.mean_pcc != b.mean_pcc) return a.mean_pcc > b.mean_pcc;
                  return a.model_id < b.model_id;
              });
    for (std::size_t i = 0; i < board.rows.size(); ++i)
        board.rows[i].rank = static_cast<int>(i + 1);
    return board;
}

} // namespace moskit
