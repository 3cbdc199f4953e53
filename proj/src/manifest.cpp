#include "moskit/manifest.hpp"

#include "moskit/csv.hpp"
#include "moskit/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

namespace moskit {

namespace {

const std::vector<std::string> kManifestHeader = {
    "clip_id", "dataset", "audio_path", "mos", "ci95", "n_ratings", "condition"};

[[noreturn]] void cell_error(const std::string& path, size_t line,
                             const std::string& column, const std::string& what) {
    throw ValidationError(path + ":" + std::to_string(line) + ": column '" + column +
                          "': " + what);
}

double parse_double(const std::string& s, const std::string& path, size_t line,
                    const std::string& column) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        cell_error(path, line, column, "not a number: '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& path, size_t line,
              const std::string& column) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        cell_error(path, line, column, "not an integer: '" + s + "'");
    return v;
}

void check_header(const csv::Row& row, const std::vector<std::string>& expected,
                  const std::string& path) {
    if (row.fields != expected) {
        std::string want;
        for (size_t i = 0; i < expected.size(); ++i) {
            if (i) want.push_back(',');
            want += expected[i];
        }
        throw ValidationError(path + ":1: expected header '" + want + "', got '" +
                              csv::join(row.fields) + "'");
    }
}

} // namespace

DatasetManifest load_manifest(const std::string& path) {
    auto rows = csv::read_file(path);
    if (rows.empty()) throw ValidationError(path + ": empty manifest file");
    check_header(rows[0], kManifestHeader, path);

    DatasetManifest m;
    std::set<std::string> seen;
    std::vector<std::string> duplicates;
    bool uniform_dataset = true;

    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.fields.size() != kManifestHeader.size())
            throw ValidationError(path + ":" + std::to_string(r.line) + ": expected " +
                                  std::to_string(kManifestHeader.size()) + " columns, got " +
                                  std::to_string(r.fields.size()));
        ManifestRow row;
        row.clip_id = r.fields[0];
        row.dataset = r.fields[1];
        row.audio_path = r.fields[2];
        row.condition = r.fields[6];
        if (row.clip_id.empty()) cell_error(path, r.line, "clip_id", "must not be empty");

        const std::string& mos_s = r.fields[3];
        const std::string& ci_s = r.fields[4];
        const std::string& n_s = r.fields[5];
        bool all_empty = mos_s.empty() && ci_s.empty() && n_s.empty();
        if (!all_empty) {
            if (mos_s.empty()) cell_error(path, r.line, "mos", "missing value");
            if (ci_s.empty()) cell_error(path, r.line, "ci95", "missing value");
            if (n_s.empty()) cell_error(path, r.line, "n_ratings", "missing value");
            row.mos = parse_double(mos_s, path, r.line, "mos");
            row.ci95 = parse_double(ci_s, path, r.line, "ci95");
            row.n_ratings = parse_int(n_s, path, r.line, "n_ratings");
            if (!(row.mos >= 1.0 && row.mos <= 5.0))
                cell_error(path, r.line, "mos",
                           "value " + mos_s + " outside the MOS range [1,5]");
            if (!(row.ci95 >= 0.0))
                cell_error(path, r.line, "ci95", "must be >= 0, got " + ci_s);
            if (row.n_ratings < 1)
                cell_error(path, r.line, "n_ratings", "must be >= 1, got " + n_s);
        }

        if (!seen.insert(row.clip_id).second) duplicates.push_back(row.clip_id);
        if (m.rows.empty()) m.dataset = row.dataset;
        else if (row.dataset != m.dataset) uniform_dataset = false;
        m.rows.push_back(std::move(row));
    }

    if (!duplicates.empty()) {
        std::string list;
        for (size_t i = 0; i < duplicates.size() && i < 10; ++i) {
            if (i) list += ", ";
            list += duplicates[i];
        }
        if (duplicates.size() > 10)
            list += ", ... (" + std::to_string(duplicates.size()) + " total)";
        throw ValidationError(path + ": duplicate clip_id: " + list);
    }
    if (!uniform_dataset) m.dataset.clear();
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::string out = csv::join(kManifestHeader) + "\n";
    for (const auto& r : manifest.rows) {
        std::vector<std::string> fields(7);
        fields[0] = r.clip_id;
        fields[1] = r.dataset;
        fields[2] = r.audio_path;
        if (r.rated()) {
            fields[3] = csv::format_double(r.mos);
            fields[4] = csv::format_double(r.ci95);
            fields[5] = std::to_string(r.n_ratings);
        }
        fields[6] = r.condition;
        out += csv::join(fields) + "\n";
    }
    csv::write_file_atomic(path, out);
}

std::vector<RatingRecord> load_ratings(const std::string& path) {
    auto rows = csv::read_file(path);
    if (rows.empty()) throw ValidationError(path + ": empty ratings file");
    check_header(rows[0], {"clip_id", "rater_id", "rating"}, path);

    std::vector<RatingRecord> records;
    records.reserve(rows.size() - 1);
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.fields.size() != 3)
            throw ValidationError(path + ":" + std::to_string(r.line) +
                                  ": expected 3 columns, got " + std::to_string(r.fields.size()));
        RatingRecord rec;
        rec.clip_id = r.fields[0];
        rec.rater_id = r.fields[1];
        rec.rating = parse_double(r.fields[2], path, r.line, "rating");
        if (rec.clip_id.empty()) cell_error(path, r.line, "clip_id", "must not be empty");
        if (!(rec.rating >= 1.0 && rec.rating <= 5.0))
            cell_error(path, r.line, "rating",
                       "value " + r.fields[2] + " outside the ACR range [1,5]");
        records.push_back(std::move(rec));
    }
    return records;
}

void save_ratings(const std::vector<RatingRecord>& records, const std::string& path) {
    std::string out = "clip_id,rater_id,rating\n";
    for (const auto& r : records)
        out += csv::join({r.clip_id, r.rater_id, csv::format_double(r.rating)}) + "\n";
    csv::write_file_atomic(path, out);
}

PredictionSet load_predictions(const std::string& path, const std::string& model_id) {
    auto rows = csv::read_file(path);
    if (rows.empty()) throw ValidationError(path + ": empty predictions file");
    check_header(rows[0], {"clip_id", "score"}, path);

    PredictionSet preds;
    preds.model_id =
        model_id.empty() ? std::filesystem::path(path).stem().string() : model_id;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.fields.size() != 2)
            throw ValidationError(path + ":" + std::to_string(r.line) +
                                  ": expected 2 columns, got " + std::to_string(r.fields.size()));
        if (r.fields[0].empty()) cell_error(path, r.line, "clip_id", "must not be empty");
        double score = parse_double(r.fields[1], path, r.line, "score");
        if (!std::isfinite(score))
            cell_error(path, r.line, "score", "must be finite");
        if (!preds.entries.emplace(r.fields[0], score).second)
            throw ValidationError(path + ":" + std::to_string(r.line) +
                                  ": duplicate prediction row for clip_id '" + r.fields[0] + "'");
    }
    return preds;
}

void save_predictions(const PredictionSet& preds, const std::string& path) {
    std::string out = "clip_id,score\n";
    for (const auto& [clip_id, score] : preds.entries)
        out += csv::join({clip_id, csv::format_double(score)}) + "\n";
    csv::write_file_atomic(path, out);
}

} // namespace moskit
