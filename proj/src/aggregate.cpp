#include "viewagg/aggregate.hpp"

#include <unordered_map>

namespace viewagg {

std::vector<double> view_mean(const std::vector<PredictionRecord>& records) {
    if (records.empty()) {
        throw Error(ErrorKind::EmptyView, "view_mean called on empty record list");
    }
    const std::size_t k = records.front().scores.size();
    std::vector<double> mean(k, 0.0);
    for (const auto& rec : records) {
        if (rec.scores.size() != k) {
            throw Error(ErrorKind::ClassCountMismatch,
                        "record '" + rec.image_id + "' class count differs within view");
        }
        for (std::size_t c = 0; c < k; ++c) mean[c] += rec.scores[c];
    }
    const double inv = 1.0 / static_cast<double>(records.size());
    for (double& m : mean) m *= inv;
    return mean;
}

std::vector<double> combine_views(const std::optional<std::vector<double>>& p_f,
                                  const std::optional<std::vector<double>>& p_l,
                                  const AggregationConfig& config) {
    if (!(config.w_f >= 0.0) || !(config.w_l >= 0.0) || config.w_f + config.w_l <= 0.0) {
        throw Error(ErrorKind::InvalidConfig, "view weights must be non-negative with w_f + w_l > 0");
    }
    if (!p_f && !p_l) {
        throw Error(ErrorKind::BothAbsent, "both views absent");
    }
    if (!p_f || !p_l) {
        if (config.missing_view == MissingViewPolicy::Error) {
            throw Error(ErrorKind::MissingView,
                        std::string("missing ") + (!p_f ? "frontal" : "lateral") + " view");
        }
        return p_f ? *p_f : *p_l;
    }
    if (p_f->size() != p_l->size()) {
        throw Error(ErrorKind::ClassCountMismatch, "view mean lengths differ");
    }
    // Degenerate weights reduce to the other view exactly, no rounding.
    if (config.w_l == 0.0) return *p_f;
    if (config.w_f == 0.0) return *p_l;
    const double total = config.w_f + config.w_l;
    std::vector<double> out(p_f->size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c] = (config.w_f * (*p_f)[c] + config.w_l * (*p_l)[c]) / total;
    }
    return out;
}

StudyPrediction aggregate_study(const StudyGroup& group, const AggregationConfig& config) {
    std::optional<std::vector<double>> p_f;
    std::optional<std::vector<double>> p_l;
    if (!group.frontal.empty()) p_f = view_mean(group.frontal);
    if (!group.lateral.empty()) p_l = view_mean(group.lateral);
    return {group.study_id, combine_views(p_f, p_l, config)};
}

StudyPrediction aggregate_study_unweighted(const StudyGroup& group) {
    std::vector<PredictionRecord> all = group.frontal;
    all.insert(all.end(), group.lateral.begin(), group.lateral.end());
    return {group.study_id, view_mean(all)};
}

std::vector<StudyPrediction> aggregate_all(const std::vector<StudyGroup>& groups,
                                           const AggregationConfig& config) {
    std::vector<StudyPrediction> out;
    out.reserve(groups.size());
    for (const auto& group : groups) {
        try {
            out.push_back(aggregate_study(group, config));
        } catch (const Error& e) {
            throw Error(e.kind(), "study '" + group.study_id + "': " + e.what());
        }
    }
    return out;
}

std::vector<StudyPrediction> aggregate_all_unweighted(const std::vector<StudyGroup>& groups) {
    std::vector<StudyPrediction> out;
    out.reserve(groups.size());
    for (const auto& group : groups) {
        out.push_back(aggregate_study_unweighted(group));
    }
    return out;
}

std::vector<PredictionRecord> ensemble(
    const std::vector<std::vector<PredictionRecord>>& sets, const EnsembleConfig& config) {
    if (sets.empty() || config.member_weights.size() != sets.size()) {
        throw Error(ErrorKind::InvalidConfig,
                    "ensemble needs one positive weight per prediction set");
    }
    double weight_sum = 0.0;
    for (double w : config.member_weights) {
        if (!(w > 0.0)) {
            throw Error(ErrorKind::InvalidConfig, "ensemble weights must be positive");
        }
        weight_sum += w;
    }

    const auto& base = sets.front();
    for (std::size_t m = 1; m < sets.size(); ++m) {
        if (sets[m].size() != base.size()) {
            throw Error(ErrorKind::ImageSetMismatch,
                        "set " + std::to_string(m) + " has " + std::to_string(sets[m].size()) +
                            " records, expected " + std::to_string(base.size()));
        }
    }

    // Index every non-first set by image_id; order may differ between sets.
    std::vector<std::unordered_map<std::string, const PredictionRecord*>> index(sets.size());
    for (std::size_t m = 1; m < sets.size(); ++m) {
        index[m].reserve(sets[m].size());
        for (const auto& rec : sets[m]) index[m].emplace(rec.image_id, &rec);
    }

    std::vector<PredictionRecord> out;
    out.reserve(base.size());
    for (const auto& rec : base) {
        PredictionRecord combined = rec;
        for (double& s : combined.scores) s *= config.member_weights[0];
        for (std::size_t m = 1; m < sets.size(); ++m) {
            auto it = index[m].find(rec.image_id);
            if (it == index[m].end()) {
                throw Error(ErrorKind::ImageSetMismatch,
                            "image_id '" + rec.image_id + "' missing from set " + std::to_string(m));
            }
            const PredictionRecord& other = *it->second;
            if (other.study_id != rec.study_id || other.view != rec.view) {
                throw Error(ErrorKind::MetadataConflict,
                            "image_id '" + rec.image_id + "' has conflicting metadata in set " +
                                std::to_string(m));
            }
            if (other.scores.size() != combined.scores.size()) {
                throw Error(ErrorKind::ClassCountMismatch,
                            "image_id '" + rec.image_id + "' class count differs in set " +
                                std::to_string(m));
            }
            for (std::size_t c = 0; c < combined.scores.size(); ++c) {
                combined.scores[c] += config.member_weights[m] * other.scores[c];
            }
        }
        for (double& s : combined.scores) s /= weight_sum;
        out.push_back(std::move(combined));
    }
    return out;
}

}  // namespace viewagg
