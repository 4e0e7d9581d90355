#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "viewagg/aggregate.hpp"
#include "viewagg/asl.hpp"
#include "viewagg/ingest.hpp"
#include "viewagg/metrics.hpp"
#include "viewagg/synth.hpp"
#include "viewagg/types.hpp"

namespace py = pybind11;
using namespace viewagg;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-view prediction aggregation, ensembling and macro-mAP evaluation";

    py::register_exception<Error>(m, "ViewaggError");

    py::enum_<ViewKind>(m, "ViewKind")
        .value("Frontal", ViewKind::Frontal)
        .value("Lateral", ViewKind::Lateral);

    py::enum_<MissingViewPolicy>(m, "MissingViewPolicy")
        .value("UsePresentView", MissingViewPolicy::UsePresentView)
        .value("Error", MissingViewPolicy::Error);

    py::class_<PredictionRecord>(m, "PredictionRecord")
        .def(py::init([](std::string image_id, std::string study_id, ViewKind view,
                         std::vector<double> scores) {
                 return PredictionRecord{std::move(image_id), std::move(study_id), view,
                                         std::move(scores)};
             }),
             py::arg("image_id"), py::arg("study_id"), py::arg("view"), py::arg("scores"))
        .def_readwrite("image_id", &PredictionRecord::image_id)
        .def_readwrite("study_id", &PredictionRecord::study_id)
        .def_readwrite("view", &PredictionRecord::view)
        .def_readwrite("scores", &PredictionRecord::scores);

    py::class_<StudyGroup>(m, "StudyGroup")
        .def_readonly("study_id", &StudyGroup::study_id)
        .def_readonly("frontal", &StudyGroup::frontal)
        .def_readonly("lateral", &StudyGroup::lateral);

    py::class_<StudyPrediction>(m, "StudyPrediction")
        .def(py::init([](std::string study_id, std::vector<double> p_final) {
                 return StudyPrediction{std::move(study_id), std::move(p_final)};
             }),
             py::arg("study_id"), py::arg("p_final"))
        .def_readonly("study_id", &StudyPrediction::study_id)
        .def_readonly("p_final", &StudyPrediction::p_final);

    py::class_<LabelTable>(m, "LabelTable")
        .def(py::init([](std::vector<std::string> class_names,
                         std::map<std::string, std::vector<std::uint8_t>> rows) {
                 return LabelTable{std::move(class_names), std::move(rows)};
             }),
             py::arg("class_names"), py::arg("rows"))
        .def_readonly("class_names", &LabelTable::class_names)
        .def_readonly("rows", &LabelTable::rows);

    py::class_<AggregationConfig>(m, "AggregationConfig")
        .def(py::init([](double w_f, double w_l, MissingViewPolicy policy) {
                 return AggregationConfig{w_f, w_l, policy};
             }),
             py::arg("w_f") = 1.0, py::arg("w_l") = 1.0,
             py::arg("missing_view") = MissingViewPolicy::UsePresentView)
        .def_readwrite("w_f", &AggregationConfig::w_f)
        .def_readwrite("w_l", &AggregationConfig::w_l)
        .def_readwrite("missing_view", &AggregationConfig::missing_view);

    py::class_<ClassEval>(m, "ClassEval")
        .def_readonly("class_name", &ClassEval::class_name)
        .def_readonly("ap", &ClassEval::ap)
        .def_readonly("excluded", &ClassEval::excluded)
        .def_readonly("n_pos", &ClassEval::n_pos)
        .def_readonly("n_neg", &ClassEval::n_neg);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("per_class", &EvalReport::per_class)
        .def_readonly("macro_map", &EvalReport::macro_map)
        .def_readonly("n_included_classes", &EvalReport::n_included_classes);

    py::class_<AslParams>(m, "AslParams")
        .def(py::init([](double gamma_pos, double gamma_neg, double margin, double clip_eps) {
                 return AslParams{gamma_pos, gamma_neg, margin, clip_eps};
             }),
             py::arg("gamma_pos") = 0.0, py::arg("gamma_neg") = 4.0, py::arg("margin") = 0.05,
             py::arg("clip_eps") = 1e-8)
        .def_readwrite("gamma_pos", &AslParams::gamma_pos)
        .def_readwrite("gamma_neg", &AslParams::gamma_neg)
        .def_readwrite("margin", &AslParams::margin)
        .def_readwrite("clip_eps", &AslParams::clip_eps);

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init([](std::size_t n_studies, std::size_t k_classes,
                         std::vector<double> prevalence, double frontal_noise,
                         double lateral_noise, double p_has_lateral, double signal_scale,
                         std::uint64_t seed) {
                 return SynthConfig{n_studies,     k_classes,     std::move(prevalence),
                                    frontal_noise, lateral_noise, p_has_lateral,
                                    signal_scale,  seed};
             }),
             py::arg("n_studies") = 1000, py::arg("k_classes") = 20,
             py::arg("prevalence") = std::vector<double>{}, py::arg("frontal_noise") = 1.0,
             py::arg("lateral_noise") = 2.0, py::arg("p_has_lateral") = 0.7,
             py::arg("signal_scale") = 2.0, py::arg("seed") = 0);

    m.def("validate_prediction_set",
          [](std::vector<PredictionRecord> records, std::size_t expected_k) {
              validate_prediction_set(records, expected_k);
              return records;
          },
          py::arg("records"), py::arg("expected_k"));
    m.def("group_by_study", &group_by_study, py::arg("records"));
    m.def("view_mean", &view_mean, py::arg("records"));
    m.def("aggregate_study", &aggregate_study, py::arg("group"), py::arg("config"));
    m.def("aggregate_all", &aggregate_all, py::arg("groups"), py::arg("config"));
    m.def("aggregate_all_unweighted", &aggregate_all_unweighted, py::arg("groups"));
    m.def("ensemble",
          [](const std::vector<std::vector<PredictionRecord>>& sets,
             std::vector<double> weights) {
              return ensemble(sets, EnsembleConfig{std::move(weights)});
          },
          py::arg("sets"), py::arg("weights"));

    m.def("average_precision",
          [](const std::vector<double>& scores, const std::vector<std::uint8_t>& labels)
              -> py::object {
              ApResult r = average_precision(scores, labels);
              if (r.excluded) return py::none();
              return py::float_(r.ap);
          },
          py::arg("scores"), py::arg("labels"),
          "Non-interpolated AP; None when the class has no positives.");
    m.def("evaluate", &evaluate, py::arg("predictions"), py::arg("prediction_classes"),
          py::arg("labels"), py::arg("class_subset") = std::nullopt);

    m.def("asl_forward",
          [](const std::vector<double>& p, const std::vector<std::uint8_t>& y,
             const AslParams& params, const std::vector<double>& class_weights) {
              return asl_forward(p, y, params, class_weights);
          },
          py::arg("p"), py::arg("y"), py::arg("params") = AslParams{},
          py::arg("class_weights") = std::vector<double>{});
    m.def("asl_gradient",
          [](const std::vector<double>& p, const std::vector<std::uint8_t>& y,
             const AslParams& params, const std::vector<double>& class_weights) {
              return asl_gradient(p, y, params, class_weights);
          },
          py::arg("p"), py::arg("y"), py::arg("params") = AslParams{},
          py::arg("class_weights") = std::vector<double>{});

    m.def("generate", &generate, py::arg("config"));

    m.def("read_predictions", &read_predictions, py::arg("path"));
    m.def("read_labels", &read_labels, py::arg("path"));
    m.def("read_study_predictions", &read_study_predictions, py::arg("path"));
    m.def("write_study_predictions", &write_study_predictions, py::arg("path"),
          py::arg("class_names"), py::arg("rows"));
    m.def("write_predictions", &write_predictions, py::arg("path"), py::arg("class_names"),
          py::arg("records"));
}
