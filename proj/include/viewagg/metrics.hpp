#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viewagg/types.hpp"

namespace viewagg {

struct ApResult {
    double ap = 0.0;
    bool excluded = false;  // set iff the class has no positive labels
};

/// Non-interpolated AP over distinct score thresholds (tie-group semantics).
/// Classes with zero positives are excluded rather than scored.
ApResult average_precision(std::span<const double> scores,
                           std::span<const std::uint8_t> labels);

/// Arithmetic mean over non-excluded APs. Throws when every class is excluded.
std::pair<double, std::size_t> macro_map(const std::vector<ApResult>& per_class);

/// Full per-class evaluation of study-level predictions against a label
/// table, optionally restricted to a class subset. Prediction class order
/// may differ from the label table's; columns are matched by name.
EvalReport evaluate(const std::vector<StudyPrediction>& predictions,
                    const std::vector<std::string>& prediction_classes,
                    const LabelTable& labels,
                    const std::optional<std::vector<std::string>>& class_subset = std::nullopt);

}  // namespace viewagg
