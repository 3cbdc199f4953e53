#include "moskit/cli.hpp"

#include "moskit/audio_io.hpp"
#include "moskit/config.hpp"
#include "moskit/csv.hpp"
#include "moskit/dsp.hpp"
#include "moskit/engine.hpp"
#include "moskit/errors.hpp"
#include "moskit/harness.hpp"
#include "moskit/manifest.hpp"
#include "moskit/mapping.hpp"
#include "moskit/plan.hpp"
#include "moskit/ratings.hpp"
#include "moskit/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

namespace moskit {

namespace {

namespace fs = std::filesystem;

struct GlobalOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;

    Config load() const {
        Config cfg = config_path.empty() ? Config{} : load_config(config_path);
        if (seed) cfg.seed = *seed;
        return cfg;
    }
};

std::vector<DatasetManifest> load_label_sets(const std::vector<std::string>& paths) {
    std::vector<DatasetManifest> sets;
    std::set<std::string> names;
    for (const auto& path : paths) {
        DatasetManifest m = load_manifest(path);
        if (m.dataset.empty()) m.dataset = fs::path(path).stem().string();
        if (!names.insert(m.dataset).second)
            throw ValidationError("duplicate dataset name '" + m.dataset + "' across label files");
        sets.push_back(std::move(m));
    }
    return sets;
}

std::vector<std::string> wav_files_in(const std::string& dir) {
    std::vector<std::string> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".wav")
            files.push_back(entry.path().string());
    }
    if (ec) throw IoError("cannot list directory '" + dir + "': " + ec.message());
    std::sort(files.begin(), files.end());
    return files;
}

PlanParams plan_params_from(const Config& cfg) {
    PlanParams p;
    p.white_snr_lo = cfg.white_snr_lo_db;
    p.white_snr_hi = cfg.white_snr_hi_db;
    p.background_snr_lo = cfg.background_snr_lo_db;
    p.background_snr_hi = cfg.background_snr_hi_db;
    p.lowpass_cutoff_hz = cfg.lowpass_cutoff_hz;
    p.highpass_cutoff_hz = cfg.highpass_cutoff_hz;
    p.clip_threshold_lo = cfg.clip_threshold_lo;
    p.clip_threshold_hi = cfg.clip_threshold_hi;
    p.codec_bitrate = cfg.codec_bitrate;
    return p;
}

void add_aggregate(CLI::App& app, const GlobalOpts& global, int& exit_code) {
    auto* cmd = app.add_subcommand("aggregate", "Aggregate raw votes into per-clip MOS labels");
    auto ratings_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto excluded_path = std::make_shared<std::string>();
    auto dataset = std::make_shared<std::string>();
    auto min_votes = std::make_shared<int>(-1);
    cmd->add_option("--ratings", *ratings_path, "Votes CSV: clip_id,rater_id,rating")->required();
    cmd->add_option("--out", *out_path, "Output labels manifest CSV")->required();
    cmd->add_option("--excluded", *excluded_path, "Optional exclusion report CSV");
    cmd->add_option("--dataset", *dataset, "Dataset tag for the output rows");
    cmd->add_option("--min-votes", *min_votes, "Minimum votes per clip (default from config)");
    cmd->callback([=, &global, &exit_code]() {
        const Config cfg = global.load();
        const int threshold = *min_votes > 0 ? *min_votes : cfg.min_votes;
        const AggregationResult result = aggregate_ratings(load_ratings(*ratings_path), threshold);

        DatasetManifest manifest;
        manifest.dataset = *dataset;
        for (const auto& label : result.labels) {
            ManifestRow row;
            row.clip_id = label.clip_id;
            row.dataset = *dataset;
            row.mos = label.mos;
            row.ci95 = label.ci95;
            row.n_ratings = label.n_ratings;
            manifest.rows.push_back(std::move(row));
        }
        save_manifest(manifest, *out_path);
        if (!excluded_path->empty()) save_exclusion_report(*excluded_path, result.excluded);
        std::cout << "labeled " << result.labels.size() << " clips (" << result.excluded.size()
                  << " excluded, " << result.duplicates_removed << " duplicate votes removed) -> "
                  << *out_path << "\n";
        exit_code = 0;
    });
}

void add_stats(CLI::App& app, const GlobalOpts&, int& exit_code) {
    auto* cmd = app.add_subcommand("stats", "Descriptive statistics per dataset");
    auto labels = std::make_shared<std::vector<std::string>>();
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--labels", *labels, "Labels manifest CSV (repeatable)")->required();
    cmd->add_option("--out", *out_path, "Output stats CSV")->required();
    cmd->callback([=, &exit_code]() {
        const auto stats = descriptive_stats(load_label_sets(*labels));
        save_stats_csv(*out_path, stats);
        for (const auto& s : stats) {
            std::printf("%s: %zu clips, %.0f ratings/clip, ci95 %.2f, mos [%.2f, %.2f]\n",
                        s.dataset.c_str(), s.clip_count, s.avg_ratings_per_clip, s.avg_ci95,
                        s.mos_min, s.mos_max);
        }
        exit_code = 0;
    });
}

void add_split(CLI::App& app, const GlobalOpts& global, int& exit_code) {
    auto* cmd = app.add_subcommand("split", "Stratified train/eval split of a labeled manifest");
    auto labels = std::make_shared<std::string>();
    auto train_out = std::make_shared<std::string>();
    auto eval_out = std::make_shared<std::string>();
    auto fraction = std::make_shared<double>(0.8);
    auto bins = std::make_shared<int>(-1);
    cmd->add_option("--labels", *labels, "Labeled manifest CSV")->required();
    cmd->add_option("--train-out", *train_out, "Train manifest CSV")->required();
    cmd->add_option("--eval-out", *eval_out, "Eval manifest CSV")->required();
    cmd->add_option("--fraction", *fraction, "Train fraction (default 0.8)");
    cmd->add_option("--mos-bins", *bins, "MOS bins for stratification (default from config)");
    cmd->callback([=, &global, &exit_code]() {
        const Config cfg = global.load();
        const int mos_bins = *bins > 0 ? *bins : cfg.mos_bins;
        const auto [train, eval] =
            stratified_split(load_manifest(*labels), *fraction, mos_bins, cfg.seed);
        save_manifest(train, *train_out);
        save_manifest(eval, *eval_out);
        std::cout << "split " << (train.rows.size() + eval.rows.size()) << " clips -> "
                  << train.rows.size() << " train / " << eval.rows.size() << " eval\n";
        exit_code = 0;
    });
}

void add_plan(CLI::App& app, const GlobalOpts& global, int& exit_code) {
    auto* cmd = app.add_subcommand("plan", "Draw a degradation plan for a corpus");
    auto clips = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--clips", *clips, "Source manifest CSV")->required();
    cmd->add_option("--out", *out_path, "Output plan JSON")->required();
    cmd->callback([=, &global, &exit_code]() {
        const Config cfg = global.load();
        const DatasetManifest manifest = load_manifest(*clips);
        std::vector<std::string> ids;
        for (const auto& row : manifest.rows) ids.push_back(row.clip_id);
        const WeightTable stage1 =
            cfg.stage1_weights.empty() ? default_stage1_weights() : cfg.stage1_weights;
        const WeightTable stage2 =
            cfg.stage2_weights.empty() ? default_stage2_weights() : cfg.stage2_weights;
        const ConditionPlan plan =
            sample_plan(ids, stage1, stage2, cfg.seed, plan_params_from(cfg));
        save_plan(*out_path, plan);
        std::cout << "planned " << plan.assignments.size() << " clips -> " << *out_path << "\n";
        exit_code = 0;
    });
}

void add_degrade(CLI::App& app, const GlobalOpts& global, int& exit_code) {
    auto* cmd = app.add_subcommand("degrade", "Execute a degradation plan");
    auto plan_path = std::make_shared<std::string>();
    auto sources_path = std::make_shared<std::string>();
    auto outdir = std::make_shared<std::string>();
    auto manifest_out = std::make_shared<std::string>();
    auto workers = std::make_shared<int>(-1);
    cmd->add_option("--plan", *plan_path, "Plan JSON from `plan`")->required();
    cmd->add_option("--sources", *sources_path, "Source manifest CSV")->required();
    cmd->add_option("--outdir", *outdir, "Directory for degraded WAVs")->required();
    cmd->add_option("--manifest-out", *manifest_out, "Output manifest CSV")->required();
    cmd->add_option("--workers", *workers, "Worker threads (default from config)");
    cmd->callback([=, &global, &exit_code]() {
        const Config cfg = global.load();
        EngineConfig engine;
        engine.adapters = cfg.adapters;
        engine.adapter_timeout_seconds = cfg.adapter_timeout_seconds;
        engine.workers = *workers > 0 ? *workers : cfg.workers;
        if (!cfg.noise_dir.empty()) engine.noise_files = wav_files_in(cfg.noise_dir);

        const ExecutionResult result =
            execute_plan(load_plan(*plan_path), load_manifest(*sources_path), *outdir, engine);
        save_manifest(result.manifest, *manifest_out);
        std::cout << "wrote " << result.manifest.rows.size() << " clips to " << *outdir << "\n";
        for (const auto& s : result.skipped)
            std::cerr << "skipped " << s.clip_id << " (" << s.condition << "): " << s.reason
                      << "\n";
        exit_code = result.skipped.empty() ? 0 : 2;
    });
}

void add_segment(CLI::App& app, const GlobalOpts&, int& exit_code) {
    auto* cmd = app.add_subcommand("segment", "Cut long recordings into speech-active segments");
    auto inputs = std::make_shared<std::vector<std::string>>();
    auto outdir = std::make_shared<std::string>();
    auto manifest_out = std::make_shared<std::string>();
    auto dataset = std::make_shared<std::string>();
    auto seconds = std::make_shared<double>(10.0);
    auto min_activity = std::make_shared<double>(0.5);
    cmd->add_option("--audio", *inputs, "Input WAV (repeatable)")->required();
    cmd->add_option("--outdir", *outdir, "Directory for segment WAVs")->required();
    cmd->add_option("--manifest-out", *manifest_out, "Optional manifest CSV for kept segments");
    cmd->add_option("--dataset", *dataset, "Dataset tag for the manifest rows");
    cmd->add_option("--seconds", *seconds, "Segment length in seconds (default 10)");
    cmd->add_option("--min-activity", *min_activity, "Minimum speech activity (default 0.5)");
    cmd->callback([=, &exit_code]() {
        std::error_code ec;
        fs::create_directories(*outdir, ec);
        DatasetManifest manifest;
        manifest.dataset = *dataset;
        std::size_t kept = 0;
        for (const auto& path : *inputs) {
            const Clip audio = load_audio(path);
            for (const Clip& piece : segment_speech(audio, *seconds, *min_activity)) {
                const fs::path out_path = fs::path(*outdir) / (piece.clip_id + ".wav");
                save_audio(piece, out_path.string());
                ManifestRow row;
                row.clip_id = piece.clip_id;
                row.dataset = *dataset;
                row.audio_path = out_path.string();
                manifest.rows.push_back(std::move(row));
                ++kept;
            }
        }
        if (!manifest_out->empty()) save_manifest(manifest, *manifest_out);
        std::cout << "kept " << kept << " segments from " << inputs->size() << " recordings\n";
        exit_code = 0;
    });
}

void add_evaluate(CLI::App& app, const GlobalOpts& global, int& exit_code) {
    auto* cmd = app.add_subcommand("evaluate", "Score one model against labeled datasets");
    auto labels = std::make_shared<std::vector<std::string>>();
    auto preds_path = std::make_shared<std::string>();
    auto model_id = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--labels", *labels, "Labels manifest CSV (repeatable)")->required();
    cmd->add_option("--preds", *preds_path, "Predictions CSV: clip_id,score")->required();
    cmd->add_option("--model-id", *model_id, "Model name (default: file stem)");
    cmd->add_option("--out", *out_path, "Optional JSON report path");
    cmd->callback([=, &global, &exit_code]() {
        const Config cfg = global.load();
        EvaluateOptions options;
        options.rmse_denominator = cfg.rmse_denominator;
        const PredictionSet preds = load_predictions(*preds_path, *model_id);
        const auto reports = evaluate_model(preds, load_label_sets(*labels), options);
        for (const auto& r : reports) {
            std::printf("%s dataset=%s n=%d pcc=%.3f rmse=%.3f rmse_map=%.3f or=%.3f\n",
                        r.model_id.c_str(), r.dataset.c_str(), r.n, r.pcc, r.rmse, r.rmse_map,
                        r.outlier_ratio);
        }
        if (!out_path->empty()) {
            Leaderboard board = rank_models({reports}, cfg.dataset_mean_weighting);
            save_leaderboard_json(*out_path, board);
        }
        exit_code = 0;
    });
}

void add_rank(CLI::App& app, const GlobalOpts& global, int& exit_code) {
    auto* cmd = app.add_subcommand("rank", "Rank several models on the same datasets");
    auto labels = std::make_shared<std::vector<std::string>>();
    auto preds = std::make_shared<std::vector<std::string>>();
    auto out_path = std::make_shared<std::string>();
    auto csv_path = std::make_shared<std::string>();
    cmd->add_option("--labels", *labels, "Labels manifest CSV (repeatable)")->required();
    cmd->add_option("--preds", *preds, "Predictions CSV, one per model (repeatable)")->required();
    cmd->add_option("--out", *out_path, "Leaderboard JSON path")->required();
    cmd->add_option("--csv-out", *csv_path, "Optional leaderboard CSV path");
    cmd->callback([=, &global, &exit_code]() {
        const Config cfg = global.load();
        EvaluateOptions options;
        options.rmse_denominator = cfg.rmse_denominator;
        const auto label_sets = load_label_sets(*labels);
        std::vector<std::vector<MetricReport>> reports;
        for (const auto& path : *preds)
            reports.push_back(evaluate_model(load_predictions(path), label_sets, options));
        const Leaderboard board = rank_models(reports, cfg.dataset_mean_weighting);
        save_leaderboard_json(*out_path, board);
        if (!csv_path->empty()) save_leaderboard_csv(*csv_path, board);
        for (const auto& row : board.rows) {
            std::printf("%d %s mean_rmse_map=%.3f mean_rmse=%.3f mean_pcc=%.3f mean_or=%.3f\n",
                        row.rank, row.model_id.c_str(), row.mean_rmse_map, row.mean_rmse,
                        row.mean_pcc, row.mean_or);
        }
        exit_code = 0;
    });
}

void add_report(CLI::App& app, const GlobalOpts&, int& exit_code) {
    auto* cmd = app.add_subcommand("report", "Render leaderboard, stats, and charts");
    auto board_path = std::make_shared<std::string>();
    auto labels = std::make_shared<std::vector<std::string>>();
    auto outdir = std::make_shared<std::string>();
    cmd->add_option("--leaderboard", *board_path, "Leaderboard JSON from `rank`")->required();
    cmd->add_option("--labels", *labels, "Labels manifest CSV (repeatable)");
    cmd->add_option("--outdir", *outdir, "Output directory")->required();
    cmd->callback([=, &exit_code]() {
        const Leaderboard board = load_leaderboard_json(*board_path);
        render_report(board, labels->empty() ? std::vector<DatasetManifest>{} : load_label_sets(*labels),
                      *outdir);
        std::cout << "report written to " << *outdir << "\n";
        exit_code = 0;
    });
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Speech quality benchmark toolkit: corpus synthesis, MOS labels, and model ranking",
                 "moskit"};
    app.require_subcommand(1);

    GlobalOpts global;
    int exit_code = 0;
    app.add_option("--config", global.config_path, "Config JSON path")->expected(1);
    app.add_option("--seed", global.seed, "Master seed (overrides config)")->expected(1);

    add_aggregate(app, global, exit_code);
    add_stats(app, global, exit_code);
    add_split(app, global, exit_code);
    add_plan(app, global, exit_code);
    add_degrade(app, global, exit_code);
    add_segment(app, global, exit_code);
    add_evaluate(app, global, exit_code);
    add_rank(app, global, exit_code);
    add_report(app, global, exit_code);

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const AdapterError& e) {
        std::cerr << "adapter error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}

} // namespace moskit
