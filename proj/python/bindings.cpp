#include "abxeval/abx.hpp"
#include "abxeval/corpus.hpp"
#include "abxeval/metrics.hpp"
#include "abxeval/predict.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace abxeval;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "ABX phone discrimination scoring and human-response prediction for "
      "speech representation models";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::enum_<Language>(m, "Language")
      .value("en", Language::en)
      .value("fr", Language::fr);
  py::enum_<Side>(m, "Side").value("A", Side::A).value("B", Side::B);
  py::enum_<MetricKind>(m, "MetricKind")
      .value("angular", MetricKind::angular)
      .value("symmetric_kl", MetricKind::symmetric_kl);
  py::enum_<Scope>(m, "Scope")
      .value("global_", Scope::global)
      .value("by_contrast", Scope::by_contrast);

  py::class_<FrameMetric>(m, "FrameMetric")
      .def(py::init<>())
      .def(py::init([](MetricKind kind, double epsilon) {
             return FrameMetric{kind, epsilon};
           }),
           py::arg("kind"), py::arg("epsilon") = 1e-10)
      .def_readwrite("kind", &FrameMetric::kind)
      .def_readwrite("epsilon", &FrameMetric::epsilon);

  py::class_<FeatureMatrix>(m, "FeatureMatrix")
      .def(py::init<>())
      .def_readwrite("utterance_id", &FeatureMatrix::utterance_id)
      .def_readwrite("times", &FeatureMatrix::times)
      .def_readwrite("frames", &FeatureMatrix::frames)
      .def_property_readonly("n_frames", &FeatureMatrix::n_frames)
      .def_property_readonly("dim", &FeatureMatrix::dim);

  py::class_<SegmentRef>(m, "SegmentRef")
      .def(py::init<>())
      .def(py::init([](std::string utterance_id, double onset, double offset) {
             return SegmentRef{std::move(utterance_id), onset, offset};
           }),
           py::arg("utterance_id"), py::arg("onset"), py::arg("offset"))
      .def_readwrite("utterance_id", &SegmentRef::utterance_id)
      .def_readwrite("onset", &SegmentRef::onset)
      .def_readwrite("offset", &SegmentRef::offset);

  py::class_<TripletItem>(m, "TripletItem")
      .def(py::init<>())
      .def_readwrite("triplet_id", &TripletItem::triplet_id)
      .def_readwrite("language", &TripletItem::language)
      .def_readwrite("a", &TripletItem::a)
      .def_readwrite("b", &TripletItem::b)
      .def_readwrite("x", &TripletItem::x)
      .def_readwrite("phone_a", &TripletItem::phone_a)
      .def_readwrite("phone_b", &TripletItem::phone_b)
      .def_readwrite("prev_phone", &TripletItem::prev_phone)
      .def_readwrite("next_phone", &TripletItem::next_phone)
      .def_readwrite("speaker_a", &TripletItem::speaker_a)
      .def_readwrite("speaker_b", &TripletItem::speaker_b)
      .def_readwrite("speaker_x", &TripletItem::speaker_x)
      .def_readwrite("x_matches", &TripletItem::x_matches);

  py::class_<HumanResponse>(m, "HumanResponse")
      .def(py::init<>())
      .def_readwrite("triplet_id", &HumanResponse::triplet_id)
      .def_readwrite("participant_id", &HumanResponse::participant_id)
      .def_readwrite("language", &HumanResponse::language)
      .def_readwrite("correct", &HumanResponse::correct)
      .def_readwrite("certainty", &HumanResponse::certainty)
      .def_readwrite("correct_first", &HumanResponse::correct_first)
      .def_readwrite("trial_position", &HumanResponse::trial_position)
      .def("gradient", &HumanResponse::gradient);

  py::class_<ItemAccuracy>(m, "ItemAccuracy")
      .def(py::init<>())
      .def_readwrite("triplet_id", &ItemAccuracy::triplet_id)
      .def_readwrite("n_correct", &ItemAccuracy::n_correct)
      .def_readwrite("n_responses", &ItemAccuracy::n_responses)
      .def("value", &ItemAccuracy::value);

  py::class_<DtwResult>(m, "DtwResult")
      .def_readonly("distance", &DtwResult::distance)
      .def_readonly("path_length", &DtwResult::path_length);

  py::class_<DeltaRecord>(m, "DeltaRecord")
      .def(py::init<>())
      .def_readwrite("model_id", &DeltaRecord::model_id)
      .def_readwrite("language", &DeltaRecord::language)
      .def_readwrite("triplet_id", &DeltaRecord::triplet_id)
      .def_readwrite("delta", &DeltaRecord::delta)
      .def_readwrite("d_ax", &DeltaRecord::d_ax)
      .def_readwrite("d_bx", &DeltaRecord::d_bx);

  py::class_<AccuracyRow>(m, "AccuracyRow")
      .def_readonly("language", &AccuracyRow::language)
      .def_readonly("key", &AccuracyRow::key)
      .def_readonly("n_correct", &AccuracyRow::n_correct)
      .def_readonly("n_items", &AccuracyRow::n_items)
      .def("accuracy", &AccuracyRow::accuracy);

  py::class_<AccuracyReport>(m, "AccuracyReport")
      .def_readonly("scope", &AccuracyReport::scope)
      .def_readonly("rows", &AccuracyReport::rows);

  py::class_<ReweightedAccuracy>(m, "ReweightedAccuracy")
      .def_readonly("value", &ReweightedAccuracy::value)
      .def_readonly("exact", &ReweightedAccuracy::exact)
      .def_readonly("n_items", &ReweightedAccuracy::n_items);

  py::class_<DesignRow>(m, "DesignRow")
      .def_readonly("y", &DesignRow::y)
      .def_readonly("i_fr", &DesignRow::i_fr)
      .def_readonly("i_en", &DesignRow::i_en)
      .def_readonly("delta_fr", &DesignRow::delta_fr)
      .def_readonly("delta_en", &DesignRow::delta_en)
      .def_readonly("correct_first", &DesignRow::correct_first)
      .def_readonly("position", &DesignRow::position)
      .def_readonly("participant", &DesignRow::participant)
      .def_readonly("language", &DesignRow::language);

  py::class_<Design>(m, "Design")
      .def_readonly("rows", &Design::rows)
      .def_readonly("delta_std_fr", &Design::delta_std_fr)
      .def_readonly("delta_std_en", &Design::delta_std_en)
      .def_readonly("max_position", &Design::max_position)
      .def_readonly("participants", &Design::participants);

  py::class_<DesignMatrix>(m, "DesignMatrix")
      .def(py::init([](Eigen::MatrixXd x, Eigen::VectorXd y,
                       std::vector<std::string> names) {
             return DesignMatrix{std::move(x), std::move(y), std::move(names)};
           }),
           py::arg("x"), py::arg("y"), py::arg("names"))
      .def_readwrite("x", &DesignMatrix::x)
      .def_readwrite("y", &DesignMatrix::y)
      .def_readwrite("names", &DesignMatrix::names);

  py::class_<ProbitOptions>(m, "ProbitOptions")
      .def(py::init<>())
      .def_readwrite("grad_tol", &ProbitOptions::grad_tol)
      .def_readwrite("ll_rel_tol", &ProbitOptions::ll_rel_tol)
      .def_readwrite("max_iterations", &ProbitOptions::max_iterations)
      .def_readwrite("eta_clamp", &ProbitOptions::eta_clamp);

  py::class_<RegressionFit>(m, "RegressionFit")
      .def_readonly("names", &RegressionFit::names)
      .def_readonly("coefficients", &RegressionFit::coefficients)
      .def_readonly("std_errors", &RegressionFit::std_errors)
      .def_readonly("log_likelihood", &RegressionFit::log_likelihood)
      .def_readonly("n_obs", &RegressionFit::n_obs)
      .def_readonly("converged", &RegressionFit::converged)
      .def_readonly("iterations", &RegressionFit::iterations)
      .def_readonly("separation_warning", &RegressionFit::separation_warning);

  py::class_<ResampleResult>(m, "ResampleResult")
      .def_readonly("responses", &ResampleResult::responses)
      .def_readonly("n_eligible_items", &ResampleResult::n_eligible_items)
      .def_readonly("n_excluded_items", &ResampleResult::n_excluded_items);

  py::class_<ModelDeltas>(m, "ModelDeltas")
      .def(py::init<>())
      .def(py::init([](std::string model_id, DeltaMap fr, DeltaMap en) {
             return ModelDeltas{std::move(model_id), std::move(fr), std::move(en)};
           }),
           py::arg("model_id"), py::arg("fr"), py::arg("en"))
      .def_readwrite("model_id", &ModelDeltas::model_id)
      .def_readwrite("fr", &ModelDeltas::fr)
      .def_readwrite("en", &ModelDeltas::en);

  py::class_<PairwiseCi>(m, "PairwiseCi")
      .def_readonly("model_a", &PairwiseCi::model_a)
      .def_readonly("model_b", &PairwiseCi::model_b)
      .def_readonly("mean_diff", &PairwiseCi::mean_diff)
      .def_readonly("lo", &PairwiseCi::lo)
      .def_readonly("hi", &PairwiseCi::hi);

  py::class_<BootstrapResult>(m, "BootstrapResult")
      .def_readonly("model_ids", &BootstrapResult::model_ids)
      .def_readonly("ll_samples", &BootstrapResult::ll_samples)
      .def_readonly("ci_level", &BootstrapResult::ci_level)
      .def_readonly("mean_ll", &BootstrapResult::mean_ll)
      .def_readonly("ci", &BootstrapResult::ci)
      .def_readonly("pairwise", &BootstrapResult::pairwise)
      .def_readonly("resample_size", &BootstrapResult::resample_size)
      .def_readonly("n_eligible_items", &BootstrapResult::n_eligible_items)
      .def_readonly("n_excluded_items", &BootstrapResult::n_excluded_items);

  py::class_<F1Row>(m, "F1Row")
      .def_readonly("model_id", &F1Row::model_id)
      .def_readonly("mean_accuracy", &F1Row::mean_accuracy)
      .def_readonly("mean_loglik", &F1Row::mean_loglik);

  py::class_<F2Row>(m, "F2Row")
      .def_readonly("language", &F2Row::language)
      .def_readonly("phone_1", &F2Row::phone_1)
      .def_readonly("phone_2", &F2Row::phone_2)
      .def_readonly("human_score_norm", &F2Row::human_score_norm)
      .def_readonly("delta_norm", &F2Row::delta_norm);

  py::class_<FigureTables>(m, "FigureTables")
      .def_readonly("f1", &FigureTables::f1)
      .def_readonly("f2", &FigureTables::f2);

  py::class_<LanguageStats>(m, "LanguageStats")
      .def_readonly("triplets", &LanguageStats::triplets)
      .def_readonly("contrasts", &LanguageStats::contrasts)
      .def_readonly("contexts", &LanguageStats::contexts)
      .def_readonly("responses", &LanguageStats::responses);

  py::class_<ExpectedCounts>(m, "ExpectedCounts")
      .def(py::init<>())
      .def_readwrite("triplets_total", &ExpectedCounts::triplets_total)
      .def_readwrite("triplets_en", &ExpectedCounts::triplets_en)
      .def_readwrite("triplets_fr", &ExpectedCounts::triplets_fr)
      .def_readwrite("contrasts_en", &ExpectedCounts::contrasts_en)
      .def_readwrite("contrasts_fr", &ExpectedCounts::contrasts_fr)
      .def_readwrite("contexts_en", &ExpectedCounts::contexts_en)
      .def_readwrite("contexts_fr", &ExpectedCounts::contexts_fr);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("triplets_total", &ValidationReport::triplets_total)
      .def_readonly("per_language", &ValidationReport::per_language)
      .def_readonly("responses_total", &ValidationReport::responses_total)
      .def_readonly("items_with_responses", &ValidationReport::items_with_responses)
      .def_readonly("failures", &ValidationReport::failures)
      .def("passed", &ValidationReport::passed)
      .def("text", &ValidationReport::text);

  // corpus
  m.def("load_feature_archive", &load_feature_archive, py::arg("path"));
  m.def("extract_segment", &extract_segment, py::arg("features"), py::arg("segment"));
  m.def(
      "load_triplets",
      [](const std::filesystem::path& path) { return load_triplets(path, nullptr); },
      py::arg("path"));
  m.def("write_triplets", &write_triplets, py::arg("path"), py::arg("items"));
  m.def("load_responses", &load_responses, py::arg("path"), py::arg("triplets"));
  m.def("item_human_accuracy", &item_human_accuracy, py::arg("responses"));
  m.def("validate_dataset", &validate_dataset, py::arg("triplets"), py::arg("responses"),
        py::arg("expected") = ExpectedCounts{});

  // metrics
  m.def("gamma_angular", &gamma_angular, py::arg("u"), py::arg("v"));
  m.def("gamma_symmetric_kl", &gamma_symmetric_kl, py::arg("p"), py::arg("q"),
        py::arg("epsilon") = 1e-10);
  m.def(
      "dtw_distance",
      [](const Mat& c, const Mat& d, const FrameMetric& metric) {
        return dtw_distance(c, d, metric);
      },
      py::arg("c"), py::arg("d"), py::arg("metric") = FrameMetric{});

  // abx
  m.def("delta_from_distances", &delta_from_distances, py::arg("d_ax"), py::arg("d_bx"),
        py::arg("x_matches"));
  m.def("compute_delta", &compute_delta, py::arg("item"), py::arg("features"),
        py::arg("metric"), py::arg("model_id"));
  m.def("evaluate_deltas", &evaluate_deltas, py::arg("triplets"), py::arg("features"),
        py::arg("metric"), py::arg("model_id"), py::arg("workers") = 0);
  m.def("decide", &decide, py::arg("delta"));
  m.def("accuracy", &accuracy, py::arg("deltas"), py::arg("scope"), py::arg("manifest"));
  m.def("reweighted_accuracy", &reweighted_accuracy, py::arg("deltas"), py::arg("hum"));
  m.def("write_delta_csv", &write_delta_csv, py::arg("path"), py::arg("deltas"));
  m.def("read_delta_csv", &read_delta_csv, py::arg("path"));

  // predict
  m.def("build_design", &build_design, py::arg("responses"), py::arg("deltas_fr"),
        py::arg("deltas_en"), py::arg("manifest"));
  m.def("materialize", &materialize, py::arg("design"));
  m.def("log_norm_cdf", &log_norm_cdf, py::arg("x"));
  m.def("norm_cdf", &norm_cdf, py::arg("x"));
  m.def("log_likelihood", &log_likelihood, py::arg("design_matrix"),
        py::arg("coefficients"), py::arg("eta_clamp") = 30.0);
  m.def(
      "fit_probit",
      [](const DesignMatrix& dm, const ProbitOptions& options) {
        return fit_probit(dm, options);
      },
      py::arg("design_matrix"), py::arg("options") = ProbitOptions{});
  m.def(
      "fit_probit",
      [](const Design& design, const ProbitOptions& options) {
        return fit_probit(design, options);
      },
      py::arg("design"), py::arg("options") = ProbitOptions{});
  m.def("resample_responses", &resample_responses, py::arg("responses"),
        py::arg("triplets"), py::arg("seed"));
  m.def("bootstrap_compare", &bootstrap_compare, py::arg("models"), py::arg("responses"),
        py::arg("triplets"), py::arg("n_resamples"), py::arg("seed"),
        py::arg("ci_level") = 0.95, py::arg("workers") = 0);
  m.def("figure_data", &figure_data, py::arg("models"), py::arg("responses"),
        py::arg("triplets"), py::arg("bootstrap"));
  m.def("quantile", &quantile, py::arg("values"), py::arg("q"));
}
