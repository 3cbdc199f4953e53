#include "moskit/metrics.hpp"

#include "moskit/errors.hpp"

#include <cmath>

namespace moskit {

namespace {

void check_aligned(size_t a, size_t b, const char* what) {
    if (a != b)
        throw ValidationError(std::string(what) + ": length mismatch (" +
                              std::to_string(a) + " vs " + std::to_string(b) + ")");
}

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw ValidationError(std::string(what) + ": non-finite input value");
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

std::vector<double> perror(const std::vector<double>& labels,
                           const std::vector<double>& preds) {
    check_aligned(labels.size(), preds.size(), "perror");
    if (labels.empty()) throw ValidationError("perror: empty input");
    std::vector<double> e(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) e[i] = labels[i] - preds[i];
    return e;
}

double rmse(const std::vector<double>& labels, const std::vector<double>& preds,
            RmseDenominator denom) {
    check_aligned(labels.size(), preds.size(), "rmse");
    size_t n = labels.size();
    if (n < 2) throw ValidationError("rmse: need at least 2 points (N-1 denominator)");
    check_finite(labels, "rmse");
    check_finite(preds, "rmse");
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double e = labels[i] - preds[i];
        ss += e * e;
    }
    double d = denom == RmseDenominator::n_minus_one ? static_cast<double>(n - 1)
                                                     : static_cast<double>(n);
    return std::sqrt(ss / d);
}

double pcc(const std::vector<double>& labels, const std::vector<double>& preds) {
    check_aligned(labels.size(), preds.size(), "pcc");
    size_t n = labels.size();
    if (n < 2) throw ValidationError("pcc: need at least 2 points");
    check_finite(labels, "pcc");
    check_finite(preds, "pcc");
    double ma = mean(labels), mb = mean(preds);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double da = labels[i] - ma;
        double db = preds[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw ValidationError("pcc: degenerate input (zero variance)");
    double r = sab / std::sqrt(saa * sbb);
    // guard roundoff just past +/-1
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

double outlier_ratio(const std::vector<double>& mos, const std::vector<double>& ci95,
                     const std::vector<double>& preds) {
    check_aligned(mos.size(), preds.size(), "outlier_ratio");
    check_aligned(mos.size(), ci95.size(), "outlier_ratio");
    if (mos.empty()) throw ValidationError("outlier_ratio: empty input");
    size_t outliers = 0;
    for (size_t i = 0; i < mos.size(); ++i) {
        if (!std::isfinite(ci95[i]) || ci95[i] < 0.0)
            throw ValidationError("outlier_ratio: missing or invalid ci95 at index " +
                                  std::to_string(i));
        // strictly larger than the CI; an error equal to the CI is not an outlier
        if (std::abs(mos[i] - preds[i]) > ci95[i]) ++outliers;
    }
    return static_cast<double>(outliers) / static_cast<double>(mos.size());
}

double outlier_ratio(const std::vector<MOSLabel>& labels, const std::vector<double>& preds) {
    std::vector<double> mos(labels.size()), ci(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
        mos[i] = labels[i].mos;
        ci[i] = labels[i].ci95;
    }
    return outlier_ratio(mos, ci, preds);
}

} // namespace moskit
