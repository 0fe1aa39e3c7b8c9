#include "motpipe/detpre.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace motpipe {

std::vector<Detection> filter_confidence(const std::vector<Detection>& dets, double threshold) {
    std::vector<Detection> kept;
    kept.reserve(dets.size());
    for (const auto& d : dets) {
        if (d.confidence >= threshold) {
            kept.push_back(d);
        }
    }
    return kept;
}

std::vector<Detection> soft_nms(const std::vector<Detection>& dets, double sigma, double min_score) {
    if (sigma <= 0.0) {
        throw std::invalid_argument("soft_nms: sigma must be positive");
    }

    std::vector<double> score(dets.size());
    for (size_t i = 0; i < dets.size(); ++i) {
        score[i] = dets[i].confidence;
    }
    std::vector<size_t> remaining(dets.size());
    std::iota(remaining.begin(), remaining.end(), size_t{0});

    std::vector<Detection> out;
    out.reserve(dets.size());
    while (!remaining.empty()) {
        // Highest remaining score; ties go to the lower original index.
        size_t best_pos = 0;
        for (size_t p = 1; p < remaining.size(); ++p) {
            if (score[remaining[p]] > score[remaining[best_pos]]) {
                best_pos = p;
            }
        }
        const size_t best = remaining[best_pos];
        if (score[best] < min_score) {
            break;  // everything left decayed below the cutoff
        }
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
        Detection d = dets[best];
        d.confidence = score[best];
        out.push_back(std::move(d));

        for (size_t idx : remaining) {
            const double overlap = iou(dets[best].bbox, dets[idx].bbox);
            score[idx] *= std::exp(-(overlap * overlap) / sigma);
        }
    }
    return out;
}

double adaptive_threshold(double ema_mean_conf, const DetPreConfig& cfg) {
    if (!cfg.adaptive_enabled) {
        return cfg.base_threshold;
    }
    constexpr double kReferenceConf = 0.8;
    const double scaled = cfg.base_threshold * ema_mean_conf / kReferenceConf;
    return std::clamp(scaled, cfg.adaptive_floor, cfg.adaptive_ceiling);
}

}  // namespace motpipe
