#pragma once

#include <span>
#include <vector>

#include "viewagg/types.hpp"

namespace viewagg {

/// Asymmetric multi-label loss over probabilities.
/// Positive term:  (1 - p)^gamma_pos * -log(max(p, clip_eps))
/// Negative term:  p_m^gamma_neg * -log(max(1 - p_m, clip_eps)),  p_m = max(p - margin, 0)
struct AslParams {
    double gamma_pos = 0.0;
    double gamma_neg = 4.0;
    double margin = 0.05;
    double clip_eps = 1e-8;

    void validate() const;
};

/// Mean per-element loss in nats. class_weights, when non-empty, multiplies
/// per-element losses before the mean (length must match p).
double asl_forward(std::span<const double> p, std::span<const std::uint8_t> y,
                   const AslParams& params,
                   std::span<const double> class_weights = {});

/// Analytic gradient of asl_forward with respect to each p_j. Clamp regions
/// are handled piecewise: zero below the negative margin, left limits at
/// clip boundaries.
std::vector<double> asl_gradient(std::span<const double> p, std::span<const std::uint8_t> y,
                                 const AslParams& params,
                                 std::span<const double> class_weights = {});

}  // namespace viewagg
