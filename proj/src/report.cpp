#include "moskit/report.hpp"

#include "moskit/csv.hpp"
#include "moskit/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace moskit {

namespace {

namespace fs = std::filesystem;

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string sanitize(const std::string& name) {
    std::string out = name.empty() ? "dataset" : name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

std::string svg_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

void svg_text(std::string& svg, double x, double y, const std::string& text, int size,
              const char* anchor, const char* fill = "#333") {
    svg += "<text x=\"" + fixed(x, 1) + "\" y=\"" + fixed(y, 1) + "\" font-size=\"" +
           std::to_string(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
           "\" fill=\"" + fill + "\">" + svg_escape(text) + "</text>\n";
}

void svg_rect(std::string& svg, double x, double y, double w, double h, const char* fill) {
    svg += "<rect x=\"" + fixed(x, 2) + "\" y=\"" + fixed(y, 2) + "\" width=\"" + fixed(w, 2) +
           "\" height=\"" + fixed(h, 2) + "\" fill=\"" + std::string(fill) + "\"/>\n";
}

void svg_line(std::string& svg, double x1, double y1, double x2, double y2) {
    svg += "<line x1=\"" + fixed(x1, 1) + "\" y1=\"" + fixed(y1, 1) + "\" x2=\"" + fixed(x2, 1) +
           "\" y2=\"" + fixed(y2, 1) + "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
}

nlohmann::ordered_json report_to_json(const MetricReport& r) {
    return {
        {"dataset", r.dataset},
        {"model_id", r.model_id},
        {"pcc", r.pcc},
        {"rmse", r.rmse},
        {"rmse_map", r.rmse_map},
        {"outlier_ratio", r.outlier_ratio},
        {"n", r.n},
        {"mapping",
         {{"a", r.mapping.a},
          {"b", r.mapping.b},
          {"c", r.mapping.c},
          {"d", r.mapping.d},
          {"range_lo", r.mapping.range_lo},
          {"range_hi", r.mapping.range_hi}}},
    };
}

MetricReport report_from_json(const nlohmann::json& j) {
    MetricReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    r.pcc = j.at("pcc").get<double>();
    r.rmse = j.at("rmse").get<double>();
    r.rmse_map = j.at("rmse_map").get<double>();
    r.outlier_ratio = j.at("outlier_ratio").get<double>();
    r.n = j.at("n").get<int>();
    const auto& m = j.at("mapping");
    r.mapping.a = m.at("a").get<double>();
    r.mapping.b = m.at("b").get<double>();
    r.mapping.c = m.at("c").get<double>();
    r.mapping.d = m.at("d").get<double>();
    r.mapping.range_lo = m.at("range_lo").get<double>();
    r.mapping.range_hi = m.at("range_hi").get<double>();
    return r;
}

} // namespace

void save_leaderboard_csv(const std::string& path, const Leaderboard& board) {
    std::string text = "rank,model_id,mean_rmse_map,mean_rmse,mean_pcc,mean_or\n";
    for (const auto& row : board.rows) {
        text += csv::join({std::to_string(row.rank), row.model_id,
                           csv::format_double(row.mean_rmse_map), csv::format_double(row.mean_rmse),
                           csv::format_double(row.mean_pcc), csv::format_double(row.mean_or)});
        text += '\n';
    }
    csv::write_file_atomic(path, text);
}

void save_leaderboard_json(const std::string& path, const Leaderboard& board) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["datasets"] = board.datasets;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : board.rows) {
        nlohmann::ordered_json r;
        r["rank"] = row.rank;
        r["model_id"] = row.model_id;
        r["mean_rmse_map"] = row.mean_rmse_map;
        r["mean_rmse"] = row.mean_rmse;
        r["mean_pcc"] = row.mean_pcc;
        r["mean_or"] = row.mean_or;
        nlohmann::ordered_json reports = nlohmann::ordered_json::array();
        for (const auto& rep : row.reports) reports.push_back(report_to_json(rep));
        r["reports"] = std::move(reports);
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write leaderboard JSON '" + path + "'");
    out << doc.dump(2) << '\n';
    if (!out.good()) throw IoError("failed writing leaderboard JSON '" + path + "'");
}

Leaderboard load_leaderboard_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read leaderboard JSON '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("leaderboard JSON '" + path + "': " + e.what());
    }
    try {
        Leaderboard board;
        board.datasets = doc.at("datasets").get<std::vector<std::string>>();
        for (const auto& r : doc.at("rows")) {
            LeaderboardRow row;
            row.rank = r.at("rank").get<int>();
            row.model_id = r.at("model_id").get<std::string>();
            row.mean_rmse_map = r.at("mean_rmse_map").get<double>();
            row.mean_rmse = r.at("mean_rmse").get<double>();
            row.mean_pcc = r.at("mean_pcc").get<double>();
            row.mean_or = r.at("mean_or").get<double>();
            for (const auto& rep : r.at("reports")) row.reports.push_back(report_from_json(rep));
            board.rows.push_back(std::move(row));
        }
        return board;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("leaderboard JSON '" + path + "': " + e.what());
    }
}

void save_stats_csv(const std::string& path, const std::vector<DescriptiveStats>& stats) {
    std::string text = "dataset,avg_ratings_per_clip,avg_ci95,mos_min,mos_max\n";
    for (const auto& s : stats) {
        text += csv::join({s.dataset, fixed(s.avg_ratings_per_clip, 0),
                           fixed(s.avg_ci95, 2), fixed(s.mos_min, 2), fixed(s.mos_max, 2)});
        text += '\n';
    }
    csv::write_file_atomic(path, text);
}

std::string render_mos_histogram_svg(const std::string& dataset, const std::vector<double>& mos) {
    constexpr int kBins = 16;
    constexpr double kLo = 1.0, kHi = 5.0;
    constexpr double kWidth = (kHi - kLo) / kBins; // 0.25

    std::vector<std::size_t> counts(kBins, 0);
    for (double v : mos) {
        int bin = static_cast<int>(std::floor((v - kLo) / kWidth));
        bin = std::clamp(bin, 0, kBins - 1); // 5.0 falls into the last bin
        ++counts[static_cast<std::size_t>(bin)];
    }
    const std::size_t max_count = std::max<std::size_t>(
        1, *std::max_element(counts.begin(), counts.end()));

    const double width = 640, height = 400;
    const double left = 50, right = 20, top = 40, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) +
                      "\" height=\"" + fixed(height, 0) + "\" viewBox=\"0 0 " + fixed(width, 0) +
                      " " + fixed(height, 0) + "\">\n";
    svg_rect(svg, 0, 0, width, height, "#ffffff");
    svg_text(svg, width / 2, 24, "MOS distribution: " + dataset, 16, "middle");

    svg_line(svg, left, top + plot_h, left + plot_w, top + plot_h);
    svg_line(svg, left, top, left, top + plot_h);
    for (int tick = 0; tick <= 4; ++tick) {
        const double x = left + plot_w * tick / 4.0;
        svg_line(svg, x, top + plot_h, x, top + plot_h + 4);
        svg_text(svg, x, top + plot_h + 18, fixed(1.0 + tick, 0), 11, "middle");
    }
    for (int tick = 0; tick <= 4; ++tick) {
        const double frac = tick / 4.0;
        const double y = top + plot_h * (1.0 - frac);
        svg_line(svg, left - 4, y, left, y);
        svg_text(svg, left - 8, y + 4,
                 std::to_string(static_cast<std::size_t>(
                     std::llround(frac * static_cast<double>(max_count)))),
                 11, "end");
    }

    for (int b = 0; b < kBins; ++b) {
        const double frac =
            static_cast<double>(counts[static_cast<std::size_t>(b)]) / static_cast<double>(max_count);
        const double bar_h = plot_h * frac;
        const double x = left + plot_w * b / kBins;
        svg_rect(svg, x + 1, top + plot_h - bar_h, plot_w / kBins - 2, bar_h, "#4878b0");
    }
    svg_text(svg, left + plot_w / 2, height - 12, "MOS", 12, "middle");
    svg += "</svg>\n";
    return svg;
}

std::string render_metrics_chart_svg(const Leaderboard& board, const std::string& dataset) {
    struct Entry {
        std::string model_id;
        double values[4];
    };
    static constexpr const char* kNames[4] = {"PCC", "RMSE", "RMSE_MAP", "OR"};
    static constexpr const char* kColors[4] = {"#4878b0", "#e1812c", "#3a923a", "#c03d3e"};

    std::vector<Entry> entries;
    for (const auto& row : board.rows) {
        for (const auto& rep : row.reports) {
            if (rep.dataset != dataset) continue;
            entries.push_back({row.model_id, {rep.pcc, rep.rmse, rep.rmse_map, rep.outlier_ratio}});
        }
    }
    if (entries.empty())
        throw ValidationError("render_metrics_chart_svg: no reports for dataset '" + dataset + "'");

    double max_v = 1.0;
    for (const auto& e : entries)
        for (double v : e.values) max_v = std::max(max_v, v);

    const double width = std::max(640.0, 120.0 + 110.0 * static_cast<double>(entries.size()));
    const double height = 420;
    const double left = 50, right = 20, top = 40, bottom = 90;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) +
                      "\" height=\"" + fixed(height, 0) + "\" viewBox=\"0 0 " + fixed(width, 0) +
                      " " + fixed(height, 0) + "\">\n";
    svg_rect(svg, 0, 0, width, height, "#ffffff");
    svg_text(svg, width / 2, 24, "Metrics by model: " + dataset, 16, "middle");
    svg_line(svg, left, top + plot_h, left + plot_w, top + plot_h);
    svg_line(svg, left, top, left, top + plot_h);
    for (int tick = 0; tick <= 4; ++tick) {
        const double frac = tick / 4.0;
        const double y = top + plot_h * (1.0 - frac);
        svg_line(svg, left - 4, y, left, y);
        svg_text(svg, left - 8, y + 4, fixed(frac * max_v, 2), 11, "end");
    }

    const double group_w = plot_w / static_cast<double>(entries.size());
    const double bar_w = std::min(22.0, group_w / 5.0);
    for (std::size_t g = 0; g < entries.size(); ++g) {
        const double gx = left + group_w * static_cast<double>(g) + group_w / 2.0;
        for (int m = 0; m < 4; ++m) {
            const double v = entries[g].values[m];
            const double bar_h = plot_h * std::clamp(v / max_v, 0.0, 1.0);
            const double x = gx + bar_w * (static_cast<double>(m) - 2.0);
            svg_rect(svg, x + 1, top + plot_h - bar_h, bar_w - 2, bar_h, kColors[m]);
        }
        svg_text(svg, gx, top + plot_h + 16, entries[g].model_id, 11, "middle");
    }

    double lx = left;
    const double ly = height - 30;
    for (int m = 0; m < 4; ++m) {
        svg_rect(svg, lx, ly - 10, 12, 12, kColors[m]);
        svg_text(svg, lx + 16, ly, kNames[m], 12, "start");
        lx += 110;
    }
    svg += "</svg>\n";
    return svg;
}

void render_report(const Leaderboard& board, const std::vector<DatasetManifest>& label_manifests,
                   const std::string& output_dir) {
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    const fs::path dir(output_dir);

    save_leaderboard_csv((dir / "leaderboard.csv").string(), board);
    save_leaderboard_json((dir / "leaderboard.json").string(), board);

    if (!label_manifests.empty()) {
        save_stats_csv((dir / "stats.csv").string(), descriptive_stats(label_manifests));
        for (const auto& manifest : label_manifests) {
            std::vector<double> mos;
            for (const auto& row : manifest.rows)
                if (row.rated()) mos.push_back(row.mos);
            const std::string svg = render_mos_histogram_svg(manifest.dataset, mos);
            csv::write_file_atomic(
                (dir / ("mos_hist_" + sanitize(manifest.dataset) + ".svg")).string(), svg);
        }
    }
    for (const auto& dataset : board.datasets) {
        const std::string svg = render_metrics_chart_svg(board, dataset);
        csv::write_file_atomic((dir / ("metrics_" + sanitize(dataset) + ".svg")).string(), svg);
    }
}

} // namespace moskit
