#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "moskit/audio_io.hpp"
#include "moskit/dsp.hpp"
#include "moskit/harness.hpp"
#include "moskit/mapping.hpp"
#include "moskit/metrics.hpp"
#include "moskit/ratings.hpp"

namespace py = pybind11;
using namespace moskit;

PYBIND11_MODULE(_moskit, m) {
    m.doc() = "Speech quality benchmark toolkit core";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<Clip>(m, "Clip")
        .def(py::init<>())
        .def_readwrite("clip_id", &Clip::clip_id)
        .def_readwrite("dataset", &Clip::dataset)
        .def_readwrite("sample_rate", &Clip::sample_rate)
        .def_readwrite("samples", &Clip::samples)
        .def_readwrite("provenance", &Clip::provenance)
        .def("duration_seconds", &Clip::duration_seconds);

    py::class_<MOSLabel>(m, "MOSLabel")
        .def(py::init<>())
        .def_readwrite("clip_id", &MOSLabel::clip_id)
        .def_readwrite("mos", &MOSLabel::mos)
        .def_readwrite("ci95", &MOSLabel::ci95)
        .def_readwrite("n_ratings", &MOSLabel::n_ratings);

    py::class_<MappingCoefficients>(m, "MappingCoefficients")
        .def(py::init<>())
        .def_readwrite("a", &MappingCoefficients::a)
        .def_readwrite("b", &MappingCoefficients::b)
        .def_readwrite("c", &MappingCoefficients::c)
        .def_readwrite("d", &MappingCoefficients::d)
        .def_readwrite("range_lo", &MappingCoefficients::range_lo)
        .def_readwrite("range_hi", &MappingCoefficients::range_hi)
        .def("evaluate", &MappingCoefficients::evaluate)
        .def("derivative", &MappingCoefficients::derivative)
        .def("monotone_on_grid", &MappingCoefficients::monotone_on_grid,
             py::arg("grid_points") = 1001, py::arg("eps") = 1e-9);

    m.def("load_audio", &load_audio, py::arg("path"));
    m.def("save_audio", &save_audio, py::arg("clip"), py::arg("path"));

    m.def("perror", &moskit::perror, py::arg("labels"), py::arg("preds"));
    m.def(
        "rmse",
        [](const std::vector<double>& labels, const std::vector<double>& preds) {
            return rmse(labels, preds);
        },
        py::arg("labels"), py::arg("preds"));
    m.def("pcc", &pcc, py::arg("labels"), py::arg("preds"));
    m.def(
        "outlier_ratio",
        [](const std::vector<double>& mos, const std::vector<double>& ci95,
           const std::vector<double>& preds) { return outlier_ratio(mos, ci95, preds); },
        py::arg("mos"), py::arg("ci95"), py::arg("preds"));

    m.def("fit_monotone_cubic", &fit_monotone_cubic, py::arg("subjective"), py::arg("predicted"),
          py::arg("grid_points") = 1001);
    m.def("apply_mapping", &apply_mapping, py::arg("coeffs"), py::arg("predicted"));
    m.def(
        "rmse_map",
        [](const std::vector<double>& subjective, const std::vector<double>& predicted,
           int grid_points) { return rmse_map(subjective, predicted, grid_points); },
        py::arg("subjective"), py::arg("predicted"), py::arg("grid_points") = 1001);

    m.def(
        "aggregate_ratings",
        [](const std::vector<std::tuple<std::string, std::string, double>>& votes,
           int min_votes) {
            std::vector<RatingRecord> records;
            for (const auto& [clip, rater, rating] : votes)
                records.push_back({clip, rater, rating});
            const AggregationResult result = aggregate_ratings(records, min_votes);
            py::list excluded;
            for (const auto& e : result.excluded)
                excluded.append(py::make_tuple(e.clip_id, e.reason, e.n_ratings));
            return py::make_tuple(result.labels, excluded, result.duplicates_removed);
        },
        py::arg("votes"), py::arg("min_votes") = 1,
        "votes: list of (clip_id, rater_id, rating); returns (labels, excluded, duplicates)");
    m.def("t_interval_half_width", &t_interval_half_width, py::arg("stddev"), py::arg("n"));

    m.def("add_white_noise", &add_white_noise, py::arg("clip"), py::arg("snr_db"), py::arg("seed"));
    m.def("mix_background_noise", &mix_background_noise, py::arg("clip"), py::arg("noise"),
          py::arg("snr_db"), py::arg("seed"));
    m.def(
        "apply_filter",
        [](const Clip& clip, const std::string& kind, double cutoff_hz) {
            if (kind != "lowpass" && kind != "highpass")
                throw ValidationError("filter kind must be 'lowpass' or 'highpass'");
            return apply_filter(clip, kind == "lowpass" ? FilterKind::lowpass : FilterKind::highpass,
                                cutoff_hz);
        },
        py::arg("clip"), py::arg("kind"), py::arg("cutoff_hz"));
    m.def("clip_amplitude", &clip_amplitude, py::arg("clip"), py::arg("threshold_frac"));
    m.def("convolve_rir", &convolve_rir, py::arg("clip"), py::arg("rir"));
    m.def("segment_speech", &segment_speech, py::arg("audio"), py::arg("segment_seconds"),
          py::arg("min_activity"));
    m.def("make_exponential_rir", &make_exponential_rir, py::arg("sample_rate"),
          py::arg("rt60_seconds"), py::arg("duration_seconds"), py::arg("seed"));
    m.def("signal_power", &signal_power, py::arg("samples"));
}
