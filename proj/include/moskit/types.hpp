#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace moskit {

// Decoded mono audio. Samples are amplitudes in [-1, 1]; every engine
// operation keeps |amplitude| <= 1 on its output. `provenance` is a
// free-form processing history, informational only.
struct Clip {
    std::string clip_id;
    std::string dataset;
    int sample_rate = 0;
    std::vector<double> samples;
    std::string provenance;

    double duration_seconds() const {
        return sample_rate > 0
                   ? static_cast<double>(samples.size()) / sample_rate
                   : 0.0;
    }
};

// One crowdsourced vote on the 1-5 ACR scale.
struct RatingRecord {
    std::string clip_id;
    std::string rater_id;
    double rating = 0.0;
};

// Per-clip ground truth. ci95 is the half-width of the 95% confidence
// interval of the mean rating; 0 when all votes agree or n_ratings <= 1.
struct MOSLabel {
    std::string clip_id;
    double mos = 0.0;
    double ci95 = 0.0;
    int n_ratings = 0;
};

// A model's scores, possibly spanning several test sets.
struct PredictionSet {
    std::string model_id;
    std::map<std::string, double> entries; // clip_id -> score
};

// Third-order mapping y'' = a + b*y + c*y^2 + d*y^3, monotone
// (non-decreasing) on [range_lo, range_hi].
struct MappingCoefficients {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;
    double d = 0.0;
    double range_lo = 0.0;
    double range_hi = 0.0;

    double evaluate(double y) const { return a + y * (b + y * (c + y * d)); }
    double derivative(double y) const { return b + y * (2.0 * c + 3.0 * d * y); }

    // Derivative >= -eps at `grid_points` equally spaced points over
    // [range_lo, range_hi].
    bool monotone_on_grid(int grid_points = 1001, double eps = 1e-9) const {
        if (!(range_hi > range_lo) || grid_points < 2)
            return derivative(range_lo) >= -eps;
        for (int k = 0; k < grid_points; ++k) {
            double y = range_lo + (range_hi - range_lo) * k / (grid_points - 1);
            if (derivative(y) < -eps) return false;
        }
        return true;
    }

    bool operator==(const MappingCoefficients&) const = default;
};

// One manifest row. A row with n_ratings == 0 and NaN mos is "unrated":
// a synthesized corpus before any listening test. Label-consuming
// operations reject unrated rows.
struct ManifestRow {
    std::string clip_id;
    std::string dataset;
    std::string audio_path; // may be empty
    double mos = std::numeric_limits<double>::quiet_NaN();
    double ci95 = 0.0;
    int n_ratings = 0;
    std::string condition; // may be empty

    bool rated() const { return n_ratings > 0; }
    MOSLabel label() const { return MOSLabel{clip_id, mos, ci95, n_ratings}; }
};

struct DatasetManifest {
    std::string dataset; // common tag of the rows; empty when mixed
    std::vector<ManifestRow> rows;
};

} // namespace moskit
