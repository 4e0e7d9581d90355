#pragma once

#include <string>
#include <utility>
#include <vector>

#include "viewagg/types.hpp"

namespace viewagg {

/// Parses a predictions CSV: image_id,study_id,view,<class_1>,...,<class_K>.
/// Row order is preserved. Throws on malformed headers, wrong arity,
/// unparsable scores and unknown views.
std::pair<std::vector<std::string>, std::vector<PredictionRecord>>
read_predictions(const std::string& path);

/// Parses a labels CSV: study_id,<class_1>,...,<class_K> with values 0 or 1.
LabelTable read_labels(const std::string& path);

/// Partitions validated records by study_id. Within-group order matches the
/// input; groups are sorted by study_id ascending (byte order).
std::vector<StudyGroup> group_by_study(const std::vector<PredictionRecord>& records);

/// Writes a study-level CSV: study_id,<class_1>,...,<class_K>. Scores are
/// printed in shortest round-trip form, so read-back is bit-identical.
void write_study_predictions(const std::string& path,
                             const std::vector<std::string>& class_names,
                             const std::vector<StudyPrediction>& rows);

/// Writes an image-level predictions CSV in the read_predictions format.
void write_predictions(const std::string& path,
                       const std::vector<std::string>& class_names,
                       const std::vector<PredictionRecord>& records);

/// Reads a study-level CSV produced by write_study_predictions.
std::pair<std::vector<std::string>, std::vector<StudyPrediction>>
read_study_predictions(const std::string& path);

/// Shortest decimal form that parses back to the same 64-bit value.
std::string format_score(double value);

}  // namespace viewagg
