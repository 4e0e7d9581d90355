#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "viewagg/aggregate.hpp"
#include "viewagg/asl.hpp"
#include "viewagg/ingest.hpp"
#include "viewagg/metrics.hpp"
#include "viewagg/synth.hpp"
#include "viewagg/types.hpp"

namespace {

using nlohmann::json;
using namespace viewagg;

// Frontal:lateral weight pair in "A:B" form, e.g. 7:3 or 8:2.
struct PpRatio {
    double w_f = 1.0;
    double w_l = 1.0;
    std::string text = "1:1";
};

PpRatio parse_pp_ratio(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw Error(ErrorKind::InvalidConfig, "pp-ratio must be of the form A:B, got '" + text + "'");
    }
    PpRatio ratio;
    ratio.text = text;
    try {
        std::size_t consumed = 0;
        ratio.w_f = std::stod(text.substr(0, colon), &consumed);
        if (consumed != colon) throw std::invalid_argument(text);
        std::string rest = text.substr(colon + 1);
        ratio.w_l = std::stod(rest, &consumed);
        if (consumed != rest.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidConfig, "unparsable pp-ratio '" + text + "'");
    }
    if (!(ratio.w_f >= 0.0) || !(ratio.w_l >= 0.0) || ratio.w_f + ratio.w_l <= 0.0) {
        throw Error(ErrorKind::InvalidConfig,
                    "pp-ratio weights must be non-negative with a positive sum, got '" + text + "'");
    }
    return ratio;
}

std::vector<PpRatio> parse_ratio_list(const std::string& text) {
    std::vector<PpRatio> ratios;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        const std::string item =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        ratios.push_back(parse_pp_ratio(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (ratios.empty()) {
        throw Error(ErrorKind::InvalidConfig, "empty ratio list");
    }
    return ratios;
}

MissingViewPolicy parse_policy(const std::string& text) {
    if (text == "use-present") return MissingViewPolicy::UsePresentView;
    if (text == "error") return MissingViewPolicy::Error;
    throw Error(ErrorKind::InvalidConfig,
                "missing-view must be use-present or error, got '" + text + "'");
}

std::vector<std::string> read_class_subset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoFailure, "cannot open subset file '" + path + "'");
    }
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) names.push_back(line);
    }
    return names;
}

json report_to_json(const EvalReport& report) {
    json classes = json::array();
    for (const auto& ce : report.per_class) {
        classes.push_back({{"name", ce.class_name},
                           {"ap", ce.excluded ? json(nullptr) : json(ce.ap)},
                           {"n_pos", ce.n_pos},
                           {"n_neg", ce.n_neg}});
    }
    return {{"classes", classes},
            {"macro_map", report.macro_map},
            {"n_included", report.n_included_classes}};
}

void print_report_table(const EvalReport& report) {
    std::printf("%-32s %12s %8s %8s\n", "class", "AP", "n_pos", "n_neg");
    for (const auto& ce : report.per_class) {
        if (ce.excluded) {
            std::printf("%-32s %12s %8zu %8zu\n", ce.class_name.c_str(), "excluded",
                        ce.n_pos, ce.n_neg);
        } else {
            std::printf("%-32s %12.6f %8zu %8zu\n", ce.class_name.c_str(), ce.ap,
                        ce.n_pos, ce.n_neg);
        }
    }
    std::printf("macro mAP: %.6f over %zu classes\n", report.macro_map,
                report.n_included_classes);
}

int cmd_synth(const std::string& out_predictions, const std::string& out_labels,
              const SynthConfig& config) {
    auto [records, labels] = generate(config);
    write_predictions(out_predictions, labels.class_names, records);

    std::ofstream out(out_labels);
    if (!out) {
        throw Error(ErrorKind::IoFailure, "cannot open '" + out_labels + "' for writing");
    }
    out << "study_id";
    for (const auto& name : labels.class_names) out << ',' << name;
    out << '\n';
    for (const auto& [study_id, row] : labels.rows) {
        out << study_id;
        for (std::uint8_t v : row) out << ',' << int(v);
        out << '\n';
    }
    std::fprintf(stderr, "wrote %zu records over %zu studies, %zu classes\n", records.size(),
                 labels.rows.size(), labels.class_names.size());
    return 0;
}

int cmd_aggregate(const std::string& predictions_path, const std::string& ratio_text,
                  bool no_view_weighting, const std::string& policy_text,
                  const std::string& out_path) {
    auto [class_names, records] = read_predictions(predictions_path);
    validate_prediction_set(records, class_names.size());
    auto groups = group_by_study(records);

    std::vector<StudyPrediction> result;
    if (no_view_weighting) {
        result = aggregate_all_unweighted(groups);
    } else {
        PpRatio ratio = parse_pp_ratio(ratio_text);
        AggregationConfig config{ratio.w_f, ratio.w_l, parse_policy(policy_text)};
        result = aggregate_all(groups, config);
    }
    write_study_predictions(out_path, class_names, result);
    return 0;
}

int cmd_ensemble(const std::vector<std::string>& prediction_paths,
                 std::vector<double> weights, const std::string& out_path) {
    if (prediction_paths.size() < 2) {
        throw Error(ErrorKind::InvalidConfig, "ensemble needs at least two prediction files");
    }
    if (weights.empty()) {
        weights.assign(prediction_paths.size(), 1.0);
    } else if (weights.size() != prediction_paths.size()) {
        throw Error(ErrorKind::InvalidConfig,
                    "got " + std::to_string(weights.size()) + " weights for " +
                        std::to_string(prediction_paths.size()) + " files");
    }

    std::vector<std::vector<PredictionRecord>> sets;
    std::vector<std::string> class_names;
    for (const auto& path : prediction_paths) {
        auto [names, records] = read_predictions(path);
        validate_prediction_set(records, names.size());
        if (sets.empty()) {
            class_names = names;
        } else if (names != class_names) {
            throw Error(ErrorKind::ClassCountMismatch,
                        "class header of '" + path + "' differs from the first file");
        }
        sets.push_back(std::move(records));
    }
    auto combined = ensemble(sets, EnsembleConfig{std::move(weights)});
    write_predictions(out_path, class_names, combined);
    return 0;
}

int cmd_evaluate(const std::string& predictions_path, const std::string& labels_path,
                 const std::string& subset_path, const std::string& report_format) {
    auto [class_names, predictions] = read_study_predictions(predictions_path);
    LabelTable labels = read_labels(labels_path);
    std::optional<std::vector<std::string>> subset;
    if (!subset_path.empty()) subset = read_class_subset(subset_path);

    EvalReport report = evaluate(predictions, class_names, labels, subset);
    if (report_format == "json") {
        std::cout << report_to_json(report).dump(2) << '\n';
    } else {
        print_report_table(report);
    }
    return 0;
}

int cmd_sweep(const std::string& predictions_path, const std::string& labels_path,
              const std::string& ratios_text, const std::string& policy_text,
              const std::string& report_format) {
    auto ratios = parse_ratio_list(ratios_text);
    auto [class_names, records] = read_predictions(predictions_path);
    validate_prediction_set(records, class_names.size());
    auto groups = group_by_study(records);
    LabelTable labels = read_labels(labels_path);
    const MissingViewPolicy policy = parse_policy(policy_text);

    json rows = json::array();
    if (report_format == "table") {
        std::printf("%-10s %12s %10s\n", "pp_ratio", "macro_mAP", "n_classes");
    }
    for (const auto& ratio : ratios) {
        AggregationConfig config{ratio.w_f, ratio.w_l, policy};
        auto predictions = aggregate_all(groups, config);
        EvalReport report = evaluate(predictions, class_names, labels);
        rows.push_back({{"pp_ratio", ratio.text},
                        {"macro_map", report.macro_map},
                        {"n_included", report.n_included_classes}});
        if (report_format == "table") {
            std::printf("%-10s %12.6f %10zu\n", ratio.text.c_str(), report.macro_map,
                        report.n_included_classes);
        }
    }
    if (report_format == "json") {
        std::cout << json{{"sweep", rows}}.dump(2) << '\n';
    }
    return 0;
}

int cmd_loss_check(double gamma_pos, double gamma_neg, double margin, double clip_eps,
                   std::size_t n, std::uint64_t seed) {
    AslParams params{gamma_pos, gamma_neg, margin, clip_eps};
    params.validate();

    // BCE spot checks at the configured parameters.
    std::vector<double> sample_p = {0.1, 0.5, 0.9};
    for (double p : sample_p) {
        std::vector<double> pv = {p};
        std::vector<std::uint8_t> pos = {1}, neg = {0};
        std::printf("p=%.2f  loss(y=1)=%.12f  loss(y=0)=%.12f\n", p,
                    asl_forward(pv, pos, params), asl_forward(pv, neg, params));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> p_dist(0.05, 0.95);
    std::uniform_int_distribution<int> y_dist(0, 1);
    const double h = 1e-6;
    double max_rel_err = 0.0;

    for (std::size_t trial = 0; trial < n; ++trial) {
        std::vector<double> p(8);
        std::vector<std::uint8_t> y(8);
        for (std::size_t j = 0; j < p.size(); ++j) {
            do {
                p[j] = p_dist(rng);
            } while (std::abs(p[j] - margin) < 0.02);
            y[j] = static_cast<std::uint8_t>(y_dist(rng));
        }
        auto grad = asl_gradient(p, y, params);
        for (std::size_t j = 0; j < p.size(); ++j) {
            std::vector<double> plus = p, minus = p;
            plus[j] += h;
            minus[j] -= h;
            const double fd = (asl_forward(plus, y, params) - asl_forward(minus, y, params)) /
                              (2.0 * h);
            // absolute floor keeps finite-difference cancellation noise from
            // dominating where the true gradient is near zero
            const double denom = std::max({std::abs(fd), std::abs(grad[j]), 1e-3});
            max_rel_err = std::max(max_rel_err, std::abs(grad[j] - fd) / denom);
        }
    }
    std::printf("max relative gradient error over %zu draws: %.3e\n", n, max_rel_err);
    return max_rel_err <= 1e-6 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-view prediction aggregation, ensembling and macro-mAP evaluation"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic prediction/label pair");
    std::string synth_pred = "predictions.csv";
    std::string synth_labels = "labels.csv";
    SynthConfig synth_config;
    synth->add_option("--out-predictions", synth_pred, "Output predictions CSV");
    synth->add_option("--out-labels", synth_labels, "Output labels CSV");
    synth->add_option("--studies", synth_config.n_studies, "Number of studies")
        ->check(CLI::PositiveNumber);
    synth->add_option("--classes", synth_config.k_classes, "Number of classes")
        ->check(CLI::PositiveNumber);
    synth->add_option("--frontal-noise", synth_config.frontal_noise, "Frontal logit noise sigma");
    synth->add_option("--lateral-noise", synth_config.lateral_noise, "Lateral logit noise sigma");
    synth->add_option("--p-lateral", synth_config.p_has_lateral,
                      "Probability a study has a lateral image");
    synth->add_option("--signal-scale", synth_config.signal_scale, "Label signal magnitude");
    synth->add_option("--seed", synth_config.seed, "RNG seed");

    // aggregate
    auto* aggregate = app.add_subcommand("aggregate", "Per-view mean then weighted cross-view combination");
    std::string agg_pred, agg_out;
    std::string agg_ratio = "1:1";
    std::string agg_policy = "use-present";
    bool no_view_weighting = false;
    aggregate->add_option("--predictions", agg_pred, "Image-level predictions CSV")->required();
    auto* ratio_opt = aggregate->add_option("--pp-ratio", agg_ratio, "Frontal:lateral weights, e.g. 7:3");
    aggregate->add_flag("--no-view-weighting", no_view_weighting,
                        "Plain mean over all images, ignoring views")
        ->excludes(ratio_opt);
    aggregate->add_option("--missing-view", agg_policy, "use-present or error");
    aggregate->add_option("--out", agg_out, "Output study-level CSV")->required();

    // ensemble
    auto* ens = app.add_subcommand("ensemble", "Image-level weighted mean of model prediction sets");
    std::vector<std::string> ens_paths;
    std::vector<double> ens_weights;
    std::string ens_out;
    ens->add_option("--predictions", ens_paths, "Two or more prediction CSVs")->required();
    ens->add_option("--weights", ens_weights, "Per-file weights (default equal)");
    ens->add_option("--out", ens_out, "Output predictions CSV")->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Per-class AP and macro mAP");
    std::string eval_pred, eval_labels, eval_subset;
    std::string eval_format = "table";
    eval->add_option("--predictions", eval_pred, "Study-level predictions CSV")->required();
    eval->add_option("--labels", eval_labels, "Labels CSV")->required();
    eval->add_option("--classes", eval_subset, "File listing a class subset, one per line");
    eval->add_option("--report", eval_format, "table or json")
        ->check(CLI::IsMember({"table", "json"}));

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Evaluate one aggregation per pp-ratio");
    std::string sweep_pred, sweep_labels;
    std::string sweep_ratios = "5:5,7:3,8:2";
    std::string sweep_policy = "use-present";
    std::string sweep_format = "table";
    sweep->add_option("--predictions", sweep_pred, "Image-level predictions CSV")->required();
    sweep->add_option("--labels", sweep_labels, "Labels CSV")->required();
    sweep->add_option("--ratios", sweep_ratios, "Comma-separated ratios, e.g. 5:5,7:3,8:2");
    sweep->add_option("--missing-view", sweep_policy, "use-present or error");
    sweep->add_option("--report", sweep_format, "table or json")
        ->check(CLI::IsMember({"table", "json"}));

    // loss-check
    auto* loss = app.add_subcommand("loss-check", "Verify the asymmetric loss gradient numerically");
    double gamma_pos = 0.0, gamma_neg = 4.0, margin = 0.05, clip_eps = 1e-8;
    std::size_t loss_n = 1000;
    std::uint64_t loss_seed = 0;
    loss->add_option("--gamma-pos", gamma_pos, "Positive focusing exponent");
    loss->add_option("--gamma-neg", gamma_neg, "Negative focusing exponent");
    loss->add_option("--margin", margin, "Negative probability margin");
    loss->add_option("--clip-eps", clip_eps, "Log-argument floor");
    loss->add_option("--n", loss_n, "Number of random draws")->check(CLI::PositiveNumber);
    loss->add_option("--seed", loss_seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_pred, synth_labels, synth_config);
        if (aggregate->parsed()) {
            return cmd_aggregate(agg_pred, agg_ratio, no_view_weighting, agg_policy, agg_out);
        }
        if (ens->parsed()) return cmd_ensemble(ens_paths, ens_weights, ens_out);
        if (eval->parsed()) return cmd_evaluate(eval_pred, eval_labels, eval_subset, eval_format);
        if (sweep->parsed()) {
            return cmd_sweep(sweep_pred, sweep_labels, sweep_ratios, sweep_policy, sweep_format);
        }
        if (loss->parsed()) {
            return cmd_loss_check(gamma_pos, gamma_neg, margin, clip_eps, loss_n, loss_seed);
        }
    } catch (const Error& e) {
        std::cerr << "error [" << error_kind_name(e.kind()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
