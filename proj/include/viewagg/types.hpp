#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace viewagg {

enum class ErrorKind {
    ScoreOutOfRange,
    DuplicateImageId,
    ClassCountMismatch,
    MalformedHeader,
    RowArity,
    UnparsableScore,
    UnknownView,
    NonBinaryLabel,
    DuplicateStudyId,
    IoFailure,
    EmptyView,
    MissingView,
    BothAbsent,
    ImageSetMismatch,
    MetadataConflict,
    LengthMismatch,
    AllClassesExcluded,
    MissingPrediction,
    UnknownClassInSubset,
    InvalidConfig,
};

/// Domain error carrying a machine-checkable kind plus a human message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

const char* error_kind_name(ErrorKind kind);

enum class ViewKind { Frontal, Lateral };

/// Case-insensitive parse over {"frontal","lateral"}; throws UnknownView otherwise.
ViewKind parse_view(const std::string& text);

const char* view_name(ViewKind view);

/// One image's probability vector plus its study and view identity.
struct PredictionRecord {
    std::string image_id;
    std::string study_id;
    ViewKind view = ViewKind::Frontal;
    std::vector<double> scores;
};

/// All records of one study, partitioned by view. N_f + N_l >= 1 after grouping.
struct StudyGroup {
    std::string study_id;
    std::vector<PredictionRecord> frontal;
    std::vector<PredictionRecord> lateral;
};

/// Ground-truth binary matrix keyed by study_id.
struct LabelTable {
    std::vector<std::string> class_names;
    std::map<std::string, std::vector<std::uint8_t>> rows;
};

enum class MissingViewPolicy { UsePresentView, Error };

struct AggregationConfig {
    double w_f = 1.0;
    double w_l = 1.0;
    MissingViewPolicy missing_view = MissingViewPolicy::UsePresentView;
};

struct StudyPrediction {
    std::string study_id;
    std::vector<double> p_final;
};

struct EnsembleConfig {
    std::vector<double> member_weights;  // one per prediction set, all > 0
};

struct ClassEval {
    std::string class_name;
    double ap = 0.0;       // valid only when !excluded
    bool excluded = false; // set iff n_pos == 0
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

struct EvalReport {
    std::vector<ClassEval> per_class;
    double macro_map = 0.0;
    std::size_t n_included_classes = 0;
};

/// Checks every data-model invariant; throws the first violation found.
/// Returns the records unchanged so callers can chain.
const std::vector<PredictionRecord>& validate_prediction_set(
    const std::vector<PredictionRecord>& records, std::size_t expected_k);

}  // namespace viewagg
