#include "moskit/ratings.hpp"

#include "moskit/csv.hpp"
#include "moskit/errors.hpp"
#include "moskit/rng.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace moskit {

double t_interval_half_width(double stddev, int n) {
    if (n < 2 || stddev == 0.0) return 0.0;
    boost::math::students_t dist(static_cast<double>(n - 1));
    return boost::math::quantile(dist, 0.975) * stddev / std::sqrt(static_cast<double>(n));
}

AggregationResult aggregate_ratings(const std::vector<RatingRecord>& records, int min_votes) {
    if (records.empty()) throw ValidationError("aggregate_ratings: no rating records");
    if (min_votes < 1) throw ValidationError("aggregate_ratings: min_votes must be >= 1");

    AggregationResult result;
    std::set<std::tuple<std::string, std::string, double>> seen;
    std::map<std::string, std::vector<double>> votes;
    for (const auto& r : records) {
        if (!std::isfinite(r.rating) || r.rating < 1.0 || r.rating > 5.0)
            throw ValidationError("aggregate_ratings: rating " + std::to_string(r.rating) +
                                  " for clip '" + r.clip_id + "' is outside [1, 5]");
        if (!seen.emplace(r.clip_id, r.rater_id, r.rating).second) {
            ++result.duplicates_removed;
            continue;
        }
        votes[r.clip_id].push_back(r.rating);
    }

    for (const auto& [clip_id, v] : votes) {
        const int n = static_cast<int>(v.size());
        if (n < min_votes) {
            result.excluded.push_back(
                {clip_id, "fewer than " + std::to_string(min_votes) + " votes", n});
            continue;
        }
        double sum = 0.0;
        for (double r : v) sum += r;
        const double mean = sum / n;
        double ss = 0.0;
        for (double r : v) ss += (r - mean) * (r - mean);
        const double stddev = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        result.labels.push_back({clip_id, mean, t_interval_half_width(stddev, n), n});
    }

    if (result.labels.empty())
        throw ValidationError("aggregate_ratings: no clip reached min_votes=" +
                              std::to_string(min_votes) + " (" + std::to_string(votes.size()) +
                              " clips, " + std::to_string(records.size() - result.duplicates_removed) +
                              " votes after cleaning)");
    return result;
}

std::vector<DescriptiveStats> descriptive_stats(const std::vector<DatasetManifest>& manifests) {
    std::vector<DescriptiveStats> out;
    for (const auto& m : manifests) {
        if (m.rows.empty())
            throw ValidationError("descriptive_stats: dataset '" + m.dataset + "' has no clips");
        DescriptiveStats s;
        s.dataset = m.dataset;
        s.mos_min = std::numeric_limits<double>::infinity();
        s.mos_max = -std::numeric_limits<double>::infinity();
        for (const auto& row : m.rows) {
            if (!row.rated())
                throw ValidationError("descriptive_stats: clip '" + row.clip_id +
                                      "' in dataset '" + m.dataset + "' has no ratings");
            s.avg_ratings_per_clip += row.n_ratings;
            s.avg_ci95 += row.ci95;
            s.mos_min = std::min(s.mos_min, row.mos);
            s.mos_max = std::max(s.mos_max, row.mos);
        }
        s.clip_count = m.rows.size();
        s.avg_ratings_per_clip /= static_cast<double>(s.clip_count);
        s.avg_ci95 /= static_cast<double>(s.clip_count);
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

int mos_bin(double mos, int mos_bins) {
    const double width = 4.0 / mos_bins;
    int bin = static_cast<int>(std::floor((mos - 1.0) / width));
    return std::clamp(bin, 0, mos_bins - 1);
}

} // namespace

std::pair<DatasetManifest, DatasetManifest> stratified_split(const DatasetManifest& manifest,
                                                             double train_fraction, int mos_bins,
                                                             std::uint64_t seed) {
    const std::size_t total = manifest.rows.size();
    if (total < 2) throw ValidationError("stratified_split: need at least 2 clips");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ValidationError("stratified_split: train_fraction must be in (0, 1)");
    if (mos_bins < 1) throw ValidationError("stratified_split: mos_bins must be >= 1");

    // Strata keyed by (condition, MOS bin), rows canonically ordered before
    // the seeded shuffle so the partition depends only on content and seed.
    std::map<std::pair<std::string, int>, std::vector<ManifestRow>> strata;
    for (const auto& row : manifest.rows) {
        if (!row.rated())
            throw ValidationError("stratified_split: clip '" + row.clip_id + "' has no ratings");
        strata[{row.condition, mos_bin(row.mos, mos_bins)}].push_back(row);
    }

    struct Stratum {
        std::vector<ManifestRow> rows;
        double target = 0.0;
        std::size_t quota = 0;
    };
    std::vector<Stratum> groups;
    for (auto& [key, rows] : strata) {
        std::sort(rows.begin(), rows.end(),
                  [](const ManifestRow& a, const ManifestRow& b) { return a.clip_id < b.clip_id; });
        Prng rng(derive_seed(seed, "split:" + key.first + ":" + std::to_string(key.second)));
        rng.shuffle(rows);
        Stratum g;
        g.target = train_fraction * static_cast<double>(rows.size());
        g.quota = static_cast<std::size_t>(
            std::clamp(std::nearbyint(g.target), 0.0, static_cast<double>(rows.size())));
        g.rows = std::move(rows);
        groups.push_back(std::move(g));
    }

    // Correct the per-stratum round-half-even quotas so the global train
    // count hits round(fraction * N), clamped so neither side is empty.
    const auto goal = static_cast<long long>(
        std::clamp(std::nearbyint(train_fraction * static_cast<double>(total)), 1.0,
                   static_cast<double>(total - 1)));
    long long have = 0;
    for (const auto& g : groups) have += static_cast<long long>(g.quota);
    while (have != goal) {
        std::size_t best = groups.size();
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const auto& g = groups[i];
            double score;
            if (have < goal) {
                if (g.quota >= g.rows.size()) continue;
                score = g.target - static_cast<double>(g.quota);
            } else {
                if (g.quota == 0) continue;
                score = static_cast<double>(g.quota) - g.target;
            }
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        if (have < goal) {
            ++groups[best].quota;
            ++have;
        } else {
            --groups[best].quota;
            --have;
        }
    }

    DatasetManifest train{manifest.dataset, {}};
    DatasetManifest eval{manifest.dataset, {}};
    for (auto& g : groups) {
        for (std::size_t i = 0; i < g.rows.size(); ++i)
            (i < g.quota ? train : eval).rows.push_back(std::move(g.rows[i]));
    }
    auto by_id = [](const ManifestRow& a, const ManifestRow& b) { return a.clip_id < b.clip_id; };
    std::sort(train.rows.begin(), train.rows.end(), by_id);
    std::sort(eval.rows.begin(), eval.rows.end(), by_id);
    return {std::move(train), std::move(eval)};
}

void save_exclusion_report(const std::string& path, const std::vector<ExcludedClip>& excluded) {
    std::string text = "clip_id,reason,n_ratings\n";
    for (const auto& e : excluded) {
        text += csv::join({e.clip_id, e.reason, std::to_string(e.n_ratings)});
        text += '\n';
    }
    csv::write_file_atomic(path, text);
}

} // namespace moskit
