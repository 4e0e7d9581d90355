#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "viewagg/types.hpp"

namespace viewagg {

/// Seeded generator of long-tailed multi-view prediction/label sets.
/// Scores follow sigmoid(signal_scale * (2y - 1) + N(0, sigma_view)), so a
/// larger lateral sigma makes frontal-heavy weighting pay off in expectation.
struct SynthConfig {
    std::size_t n_studies = 1000;
    std::size_t k_classes = 20;
    std::vector<double> prevalence;  // empty = geometric default 0.3 * 0.7^k
    double frontal_noise = 1.0;
    double lateral_noise = 2.0;
    double p_has_lateral = 0.7;
    double signal_scale = 2.0;
    std::uint64_t seed = 0;

    void validate() const;
    std::vector<double> effective_prevalence() const;
};

std::pair<std::vector<PredictionRecord>, LabelTable> generate(const SynthConfig& config);

}  // namespace viewagg
