#include "viewagg/asl.hpp"

#include <cmath>

namespace viewagg {

void AslParams::validate() const {
    if (!(gamma_pos >= 0.0) || !(gamma_neg >= 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "focusing exponents must be non-negative");
    }
    if (!(margin >= 0.0 && margin < 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "margin must lie in [0,1)");
    }
    if (!(clip_eps > 0.0 && clip_eps <= 1e-2)) {
        throw Error(ErrorKind::InvalidConfig, "clip_eps must lie in (0, 1e-2]");
    }
}

namespace {

void check_lengths(std::span<const double> p, std::span<const std::uint8_t> y,
                   std::span<const double> class_weights) {
    if (p.size() != y.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "p length " + std::to_string(p.size()) + " != y length " +
                        std::to_string(y.size()));
    }
    if (!class_weights.empty() && class_weights.size() != p.size()) {
        throw Error(ErrorKind::LengthMismatch, "class_weights length != p length");
    }
    if (p.empty()) {
        throw Error(ErrorKind::LengthMismatch, "empty input");
    }
}

double element_loss(double p, std::uint8_t y, const AslParams& prm) {
    if (y) {
        const double focus = prm.gamma_pos == 0.0 ? 1.0 : std::pow(1.0 - p, prm.gamma_pos);
        return focus * -std::log(std::max(p, prm.clip_eps));
    }
    const double pm = std::max(p - prm.margin, 0.0);
    if (pm == 0.0) return 0.0;
    const double focus = prm.gamma_neg == 0.0 ? 1.0 : std::pow(pm, prm.gamma_neg);
    return focus * -std::log(std::max(1.0 - pm, prm.clip_eps));
}

double element_grad(double p, std::uint8_t y, const AslParams& prm) {
    if (y) {
        const double log_term = std::log(std::max(p, prm.clip_eps));
        double grad = 0.0;
        if (prm.gamma_pos > 0.0) {
            grad += prm.gamma_pos * std::pow(1.0 - p, prm.gamma_pos - 1.0) * log_term;
        }
        if (p > prm.clip_eps) {
            const double focus = prm.gamma_pos == 0.0 ? 1.0 : std::pow(1.0 - p, prm.gamma_pos);
            grad -= focus / p;
        }
        return grad;
    }
    const double pm = p - prm.margin;
    if (pm <= 0.0) return 0.0;
    const double log_term = -std::log(std::max(1.0 - pm, prm.clip_eps));
    double grad = 0.0;
    if (prm.gamma_neg > 0.0) {
        grad += prm.gamma_neg * std::pow(pm, prm.gamma_neg - 1.0) * log_term;
    }
    if (1.0 - pm > prm.clip_eps) {
        const double focus = prm.gamma_neg == 0.0 ? 1.0 : std::pow(pm, prm.gamma_neg);
        grad += focus / (1.0 - pm);
    }
    return grad;
}

}  // namespace

double asl_forward(std::span<const double> p, std::span<const std::uint8_t> y,
                   const AslParams& params, std::span<const double> class_weights) {
    params.validate();
    check_lengths(p, y, class_weights);
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double w = class_weights.empty() ? 1.0 : class_weights[j];
        sum += w * element_loss(p[j], y[j], params);
    }
    return sum / static_cast<double>(p.size());
}

std::vector<double> asl_gradient(std::span<const double> p, std::span<const std::uint8_t> y,
                                 const AslParams& params,
                                 std::span<const double> class_weights) {
    params.validate();
    check_lengths(p, y, class_weights);
    std::vector<double> grad(p.size());
    const double inv_n = 1.0 / static_cast<double>(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double w = class_weights.empty() ? 1.0 : class_weights[j];
        grad[j] = w * element_grad(p[j], y[j], params) * inv_n;
    }
    return grad;
}

}  // namespace viewagg
