#pragma once

#include "moskit/types.hpp"

#include <string>
#include <vector>

namespace moskit {

// Manifest CSV, header required:
//   clip_id,dataset,audio_path,mos,ci95,n_ratings,condition
// audio_path and condition may be empty. mos/ci95/n_ratings may all be
// empty together (an unrated row). Errors name line and column.
DatasetManifest load_manifest(const std::string& path);

void save_manifest(const DatasetManifest& manifest, const std::string& path);

// Ratings CSV: clip_id,rater_id,rating (header required).
std::vector<RatingRecord> load_ratings(const std::string& path);

void save_ratings(const std::vector<RatingRecord>& records, const std::string& path);

// Predictions CSV: clip_id,score (header required). One file per model per
// dataset; model_id defaults to the file stem. Duplicate clip_id rows are an
// error.
PredictionSet load_predictions(const std::string& path, const std::string& model_id = "");

void save_predictions(const PredictionSet& preds, const std::string& path);

} // namespace moskit
