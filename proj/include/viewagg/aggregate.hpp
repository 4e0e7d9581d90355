#pragma once

#include <optional>
#include <vector>

#include "viewagg/types.hpp"

namespace viewagg {

/// Component-wise arithmetic mean over one view's records.
std::vector<double> view_mean(const std::vector<PredictionRecord>& records);

/// Weighted cross-view combination: (w_f*P_f + w_l*P_l) / (w_f + w_l).
/// With one view absent the behavior follows config.missing_view.
std::vector<double> combine_views(const std::optional<std::vector<double>>& p_f,
                                  const std::optional<std::vector<double>>& p_l,
                                  const AggregationConfig& config);

/// Per-view mean then weighted combination for one study.
StudyPrediction aggregate_study(const StudyGroup& group, const AggregationConfig& config);

/// Plain mean over all of a study's images regardless of view
/// (the no-view-weighting baseline).
StudyPrediction aggregate_study_unweighted(const StudyGroup& group);

std::vector<StudyPrediction> aggregate_all(const std::vector<StudyGroup>& groups,
                                           const AggregationConfig& config);

std::vector<StudyPrediction> aggregate_all_unweighted(const std::vector<StudyGroup>& groups);

/// Image-level weighted mean across model prediction sets. All sets must
/// cover the same image_ids with identical study/view metadata.
std::vector<PredictionRecord> ensemble(
    const std::vector<std::vector<PredictionRecord>>& sets, const EnsembleConfig& config);

}  // namespace viewagg
