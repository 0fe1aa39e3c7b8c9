#pragma once

#include <Eigen/Dense>

#include "motpipe/geometry.hpp"

namespace motpipe {

// Chi-square 95% quantiles used for Mahalanobis gating.
inline constexpr double kChi2Gate4Dof = 9.4877;
inline constexpr double kChi2Gate2Dof = 5.9915;

struct KalmanConfig {
    double std_weight_position = 1.0 / 20.0;
    double std_weight_velocity = 1.0 / 160.0;
    // Gate on (cx, cy) only instead of the full (cx, cy, a, h) observation.
    bool gate_position_only = false;

    double gate_threshold() const { return gate_position_only ? kChi2Gate2Dof : kChi2Gate4Dof; }
};

// Constant-velocity filter state over (cx, cy, a, h) and per-frame velocities.
struct KalmanState {
    Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
    Eigen::Matrix<double, 8, 8> covariance = Eigen::Matrix<double, 8, 8>::Identity();

    BBox to_bbox() const { return BBox::from_xyah(mean(0), mean(1), mean(2), mean(3)); }
};

// Per-track constant-velocity Kalman filter over box state, dt = 1 frame.
// All operations are pure state transitions.
class KalmanFilter {
public:
    explicit KalmanFilter(const KalmanConfig& cfg = {}) : cfg_(cfg) {}

    // Zero-velocity state centered on the measurement, diagonal covariance
    // scaled by box height. Throws std::invalid_argument on a degenerate box.
    KalmanState initiate(const BBox& measurement) const;

    // Advance one frame: position += velocity, covariance += process noise.
    KalmanState predict(const KalmanState& state) const;

    // Standard correction with an observation of (cx, cy, a, h). Height and
    // aspect are clamped to >= 1e-2 afterwards. Throws std::runtime_error if
    // the innovation covariance is numerically non-PD.
    KalmanState update(const KalmanState& state, const BBox& measurement) const;

    // Squared Mahalanobis distance of the measurement under the predicted
    // observation distribution (2 dof when gate_position_only).
    double gating_distance(const KalmanState& state, const BBox& measurement) const;

    const KalmanConfig& config() const { return cfg_; }

private:
    KalmanConfig cfg_;
};

}  // namespace motpipe
