#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "viewagg/types.hpp"

namespace viewagg::testing {

// Brute-force AP oracle: enumerates the PR point at every distinct score
// threshold by direct counting. Deliberately O(n * thresholds); independent
// of the single-pass implementation it checks.
inline double ap_oracle(const std::vector<double>& scores,
                        const std::vector<std::uint8_t>& labels) {
    std::size_t n_pos = 0;
    for (std::uint8_t y : labels) n_pos += y;
    std::vector<double> thresholds = scores;
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    double ap = 0.0;
    double prev_recall = 0.0;
    for (double t : thresholds) {
        std::size_t tp = 0;
        std::size_t fp = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= t) (labels[i] ? tp : fp) += 1;
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        if (recall > prev_recall) {
            const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
            ap += precision * (recall - prev_recall);
            prev_recall = recall;
        }
    }
    return ap;
}

inline PredictionRecord make_record(std::string image_id, std::string study_id, ViewKind view,
                                    std::vector<double> scores) {
    return PredictionRecord{std::move(image_id), std::move(study_id), view, std::move(scores)};
}

// Random instance with ties: scores drawn from a coarse grid.
inline void random_tied_instance(std::mt19937_64& rng, std::size_t max_n,
                                 std::vector<double>& scores,
                                 std::vector<std::uint8_t>& labels) {
    std::uniform_int_distribution<std::size_t> n_dist(1, max_n);
    std::uniform_int_distribution<int> grid(0, 9);
    std::uniform_int_distribution<int> coin(0, 1);
    const std::size_t n = n_dist(rng);
    scores.resize(n);
    labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = grid(rng) / 9.0;
        labels[i] = static_cast<std::uint8_t>(coin(rng));
    }
}

}  // namespace viewagg::testing
