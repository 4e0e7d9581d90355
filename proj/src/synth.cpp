#include "viewagg/synth.hpp"

#include <cmath>
#include <random>

namespace viewagg {

void SynthConfig::validate() const {
    if (n_studies == 0 || k_classes == 0) {
        throw Error(ErrorKind::InvalidConfig, "n_studies and k_classes must be positive");
    }
    if (!prevalence.empty()) {
        if (prevalence.size() != k_classes) {
            throw Error(ErrorKind::InvalidConfig, "prevalence length must equal k_classes");
        }
        for (double q : prevalence) {
            if (!(q > 0.0 && q <= 1.0)) {
                throw Error(ErrorKind::InvalidConfig, "prevalence values must lie in (0,1]");
            }
        }
    }
    if (!(frontal_noise >= 0.0) || !(lateral_noise >= 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "noise sigmas must be non-negative");
    }
    if (!(p_has_lateral >= 0.0 && p_has_lateral <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "p_has_lateral must lie in [0,1]");
    }
    if (!(signal_scale > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "signal_scale must be positive");
    }
}

std::vector<double> SynthConfig::effective_prevalence() const {
    if (!prevalence.empty()) return prevalence;
    std::vector<double> prev(k_classes);
    double q = 0.3;
    for (std::size_t c = 0; c < k_classes; ++c) {
        prev[c] = q;
        q *= 0.7;
    }
    return prev;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string zero_padded(std::size_t value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

}  // namespace

std::pair<std::vector<PredictionRecord>, LabelTable> generate(const SynthConfig& config) {
    config.validate();
    const auto prevalence = config.effective_prevalence();

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    LabelTable labels;
    labels.class_names.reserve(config.k_classes);
    for (std::size_t c = 0; c < config.k_classes; ++c) {
        labels.class_names.push_back("class_" + zero_padded(c, 2));
    }

    std::vector<PredictionRecord> records;
    records.reserve(config.n_studies * 2);

    for (std::size_t s = 0; s < config.n_studies; ++s) {
        const std::string study_id = "s" + zero_padded(s, 6);
        std::vector<std::uint8_t> y(config.k_classes);
        for (std::size_t c = 0; c < config.k_classes; ++c) {
            y[c] = unit(rng) < prevalence[c] ? 1 : 0;
        }

        const std::size_t n_frontal = 1 + (unit(rng) < 0.5 ? 1 : 0);
        const bool has_lateral = unit(rng) < config.p_has_lateral;

        auto make_record = [&](ViewKind view, std::size_t image_index, double sigma) {
            PredictionRecord rec;
            rec.study_id = study_id;
            rec.image_id = study_id + "_" + (view == ViewKind::Frontal ? "f" : "l") +
                           std::to_string(image_index);
            rec.view = view;
            rec.scores.reserve(config.k_classes);
            for (std::size_t c = 0; c < config.k_classes; ++c) {
                const double base = config.signal_scale * (2.0 * y[c] - 1.0);
                rec.scores.push_back(sigmoid(base + sigma * gauss(rng)));
            }
            records.push_back(std::move(rec));
        };

        for (std::size_t i = 0; i < n_frontal; ++i) {
            make_record(ViewKind::Frontal, i, config.frontal_noise);
        }
        if (has_lateral) {
            make_record(ViewKind::Lateral, 0, config.lateral_noise);
        }

        labels.rows.emplace(study_id, std::move(y));
    }
    return {std::move(records), std::move(labels)};
}

}  // namespace viewagg
