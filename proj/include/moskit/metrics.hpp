#pragma once

#include "moskit/config.hpp"
#include "moskit/types.hpp"

#include <vector>

namespace moskit {

// Per-(model, dataset) evaluation result. rmse_map <= rmse + 1e-6 always
// (the identity mapping is feasible).
struct MetricReport {
    std::string dataset;
    std::string model_id;
    double pcc = 0.0;
    double rmse = 0.0;
    double rmse_map = 0.0;
    double outlier_ratio = 0.0;
    int n = 0;
    MappingCoefficients mapping; // the per-dataset fit behind rmse_map

    bool operator==(const MetricReport&) const = default;
};

// Element-wise prediction error: labels[i] - preds[i].
std::vector<double> perror(const std::vector<double>& labels,
                           const std::vector<double>& preds);

// sqrt(sum(perror^2) / (N-1)) by default; the classical N denominator is
// available behind the flag for cross-tool comparisons. N >= 2 required.
double rmse(const std::vector<double>& labels, const std::vector<double>& preds,
            RmseDenominator denom = RmseDenominator::n_minus_one);

// Pearson correlation coefficient. Zero variance in either input is an
// error, not a silent NaN.
double pcc(const std::vector<double>& labels, const std::vector<double>& preds);

// Fraction of clips whose |prediction error| is strictly larger than the
// clip's 95% confidence interval.
double outlier_ratio(const std::vector<double>& mos, const std::vector<double>& ci95,
                     const std::vector<double>& preds);
double outlier_ratio(const std::vector<MOSLabel>& labels, const std::vector<double>& preds);

} // namespace moskit
