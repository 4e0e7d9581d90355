#include "viewagg/types.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace viewagg {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ScoreOutOfRange: return "ScoreOutOfRange";
        case ErrorKind::DuplicateImageId: return "DuplicateImageId";
        case ErrorKind::ClassCountMismatch: return "ClassCountMismatch";
        case ErrorKind::MalformedHeader: return "MalformedHeader";
        case ErrorKind::RowArity: return "RowArity";
        case ErrorKind::UnparsableScore: return "UnparsableScore";
        case ErrorKind::UnknownView: return "UnknownView";
        case ErrorKind::NonBinaryLabel: return "NonBinaryLabel";
        case ErrorKind::DuplicateStudyId: return "DuplicateStudyId";
        case ErrorKind::IoFailure: return "IoFailure";
        case ErrorKind::EmptyView: return "EmptyView";
        case ErrorKind::MissingView: return "MissingView";
        case ErrorKind::BothAbsent: return "BothAbsent";
        case ErrorKind::ImageSetMismatch: return "ImageSetMismatch";
        case ErrorKind::MetadataConflict: return "MetadataConflict";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::AllClassesExcluded: return "AllClassesExcluded";
        case ErrorKind::MissingPrediction: return "MissingPrediction";
        case ErrorKind::UnknownClassInSubset: return "UnknownClassInSubset";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

ViewKind parse_view(const std::string& text) {
    std::string lower(text.size(), '\0');
    std::transform(text.begin(), text.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "frontal") return ViewKind::Frontal;
    if (lower == "lateral") return ViewKind::Lateral;
    throw Error(ErrorKind::UnknownView, "unknown view '" + text + "' (expected frontal or lateral)");
}

const char* view_name(ViewKind view) {
    return view == ViewKind::Frontal ? "frontal" : "lateral";
}

const std::vector<PredictionRecord>& validate_prediction_set(
    const std::vector<PredictionRecord>& records, std::size_t expected_k) {
    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.scores.size() != expected_k) {
            throw Error(ErrorKind::ClassCountMismatch,
                        "record '" + rec.image_id + "' has " +
                            std::to_string(rec.scores.size()) + " scores, expected " +
                            std::to_string(expected_k));
        }
        for (double s : rec.scores) {
            if (!(s >= 0.0 && s <= 1.0)) {
                throw Error(ErrorKind::ScoreOutOfRange,
                            "record '" + rec.image_id + "' has score " +
                                std::to_string(s) + " outside [0,1]");
            }
        }
        if (!seen_ids.insert(rec.image_id).second) {
            throw Error(ErrorKind::DuplicateImageId,
                        "duplicate image_id '" + rec.image_id + "'");
        }
    }
    return records;
}

}  // namespace viewagg
