#include "viewagg/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace viewagg {

ApResult average_precision(std::span<const double> scores,
                           std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "scores length " + std::to_string(scores.size()) +
                        " != labels length " + std::to_string(labels.size()));
    }
    std::size_t n_pos = 0;
    for (std::uint8_t y : labels) n_pos += y;
    if (n_pos == 0) return {0.0, true};

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // One pass over descending scores; PR points emitted only at
    // distinct-score boundaries so ties cannot affect the result.
    // Accumulate precision * delta_TP and divide by n_pos once, so a class
    // whose precision is 1 at every threshold scores exactly 1.0.
    double weighted_tp = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tp_prev = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            (labels[order[i]] ? tp : fp) += 1;
            ++i;
        }
        if (tp > tp_prev) {
            const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
            weighted_tp += precision * static_cast<double>(tp - tp_prev);
            tp_prev = tp;
        }
    }
    return {weighted_tp / static_cast<double>(n_pos), false};
}

std::pair<double, std::size_t> macro_map(const std::vector<ApResult>& per_class) {
    double sum = 0.0;
    std::size_t n_included = 0;
    for (const auto& r : per_class) {
        if (!r.excluded) {
            sum += r.ap;
            ++n_included;
        }
    }
    if (n_included == 0) {
        throw Error(ErrorKind::AllClassesExcluded, "every class has zero positive labels");
    }
    return {sum / static_cast<double>(n_included), n_included};
}

namespace {

std::size_t thread_budget(std::size_t n_tasks) {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("VIEWAGG_THREADS")) {
        char* end = nullptr;
        long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed >= 1) n = static_cast<std::size_t>(parsed);
    }
    return std::min(n, n_tasks);
}

}  // namespace

EvalReport evaluate(const std::vector<StudyPrediction>& predictions,
                    const std::vector<std::string>& prediction_classes,
                    const LabelTable& labels,
                    const std::optional<std::vector<std::string>>& class_subset) {
    std::unordered_map<std::string, std::size_t> pred_col;
    pred_col.reserve(prediction_classes.size());
    for (std::size_t c = 0; c < prediction_classes.size(); ++c) {
        pred_col.emplace(prediction_classes[c], c);
    }
    std::unordered_map<std::string, std::size_t> label_col;
    label_col.reserve(labels.class_names.size());
    for (std::size_t c = 0; c < labels.class_names.size(); ++c) {
        label_col.emplace(labels.class_names[c], c);
    }

    // Class-name sets must match exactly, order-insensitively.
    if (prediction_classes.size() != labels.class_names.size()) {
        throw Error(ErrorKind::ClassCountMismatch,
                    "predictions declare " + std::to_string(prediction_classes.size()) +
                        " classes, labels declare " + std::to_string(labels.class_names.size()));
    }
    for (const auto& name : labels.class_names) {
        if (!pred_col.count(name)) {
            throw Error(ErrorKind::ClassCountMismatch,
                        "label class '" + name + "' missing from predictions");
        }
    }

    // Evaluated classes follow the label table's order unless a subset is given.
    std::vector<std::string> eval_classes;
    if (class_subset) {
        for (const auto& name : *class_subset) {
            if (!label_col.count(name)) {
                throw Error(ErrorKind::UnknownClassInSubset,
                            "subset class '" + name + "' not in label table");
            }
            eval_classes.push_back(name);
        }
    } else {
        eval_classes = labels.class_names;
    }

    std::unordered_map<std::string, const std::vector<std::uint8_t>*> label_row;
    label_row.reserve(labels.rows.size());
    for (const auto& [study_id, row] : labels.rows) label_row.emplace(study_id, &row);

    std::vector<const std::vector<std::uint8_t>*> matched_rows;
    matched_rows.reserve(predictions.size());
    std::unordered_map<std::string, bool> covered;
    covered.reserve(labels.rows.size());
    for (const auto& pred : predictions) {
        if (pred.p_final.size() != prediction_classes.size()) {
            throw Error(ErrorKind::ClassCountMismatch,
                        "study '" + pred.study_id + "' score length differs from class header");
        }
        auto it = label_row.find(pred.study_id);
        if (it == label_row.end()) {
            throw Error(ErrorKind::MissingPrediction,
                        "predicted study '" + pred.study_id + "' not present in labels");
        }
        matched_rows.push_back(it->second);
        covered[pred.study_id] = true;
    }
    if (covered.size() != labels.rows.size()) {
        std::string missing;
        for (const auto& [study_id, _] : labels.rows) {
            if (!covered.count(study_id)) {
                if (!missing.empty()) missing += ", ";
                missing += study_id;
            }
        }
        throw Error(ErrorKind::MissingPrediction,
                    "labeled studies without predictions: " + missing);
    }

    const std::size_t n = predictions.size();
    EvalReport report;
    report.per_class.resize(eval_classes.size());

    auto eval_class = [&](std::size_t idx) {
        const std::string& name = eval_classes[idx];
        const std::size_t pc = pred_col.at(name);
        const std::size_t lc = label_col.at(name);
        std::vector<double> scores(n);
        std::vector<std::uint8_t> ys(n);
        for (std::size_t j = 0; j < n; ++j) {
            scores[j] = predictions[j].p_final[pc];
            ys[j] = (*matched_rows[j])[lc];
        }
        ApResult r = average_precision(scores, ys);
        std::size_t n_pos = 0;
        for (std::uint8_t y : ys) n_pos += y;
        report.per_class[idx] = {name, r.ap, r.excluded, n_pos, n - n_pos};
    };

    const std::size_t n_threads = thread_budget(eval_classes.size());
    if (n_threads <= 1) {
        for (std::size_t idx = 0; idx < eval_classes.size(); ++idx) eval_class(idx);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t idx = t; idx < eval_classes.size(); idx += n_threads) {
                    eval_class(idx);
                }
            });
        }
        for (auto& w : workers) w.join();
    }

    std::vector<ApResult> aps;
    aps.reserve(report.per_class.size());
    for (const auto& ce : report.per_class) aps.push_back({ce.ap, ce.excluded});
    auto [macro, n_included] = macro_map(aps);
    report.macro_map = macro;
    report.n_included_classes = n_included;
    return report;
}

}  // namespace viewagg
