#include "motpipe/kalman.hpp"

#include <algorithm>
#include <stdexcept>

namespace motpipe {

namespace {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat4x8 = Eigen::Matrix<double, 4, 8>;

Mat8 transition() {
    Mat8 f = Mat8::Identity();
    for (int i = 0; i < 4; ++i) {
        f(i, i + 4) = 1.0;
    }
    return f;
}

Mat4x8 observation() {
    Mat4x8 h = Mat4x8::Zero();
    for (int i = 0; i < 4; ++i) {
        h(i, i) = 1.0;
    }
    return h;
}

Vec4 to_measurement(const BBox& box) {
    const auto xyah = box.to_xyah();
    return Vec4(xyah[0], xyah[1], xyah[2], xyah[3]);
}

void symmetrize(Mat8& p) {
    p = ((p + p.transpose()) / 2.0).eval();
}

// Predicted observation distribution: (z_mean, S = H P H^T + R).
struct Projection {
    Vec4 mean;
    Mat4 cov;
};

Projection project(const KalmanConfig& cfg, const KalmanState& state) {
    const double h = state.mean(3);
    Vec4 std_obs;
    std_obs << cfg.std_weight_position * h, cfg.std_weight_position * h, 1e-1,
        cfg.std_weight_position * h;
    const Mat4 r = std_obs.array().square().matrix().asDiagonal();
    const Mat4x8 obs = observation();
    return {obs * state.mean, obs * state.covariance * obs.transpose() + r};
}

}  // namespace

KalmanState KalmanFilter::initiate(const BBox& measurement) const {
    if (!measurement.valid()) {
        throw std::invalid_argument("KalmanFilter::initiate: degenerate box");
    }
    KalmanState state;
    state.mean.head<4>() = to_measurement(measurement);
    state.mean.tail<4>().setZero();

    const double h = measurement.height;
    Vec8 std_init;
    std_init << 2.0 * cfg_.std_weight_position * h, 2.0 * cfg_.std_weight_position * h, 1e-2,
        2.0 * cfg_.std_weight_position * h, 10.0 * cfg_.std_weight_velocity * h,
        10.0 * cfg_.std_weight_velocity * h, 1e-5, 10.0 * cfg_.std_weight_velocity * h;
    state.covariance = std_init.array().square().matrix().asDiagonal();
    return state;
}

KalmanState KalmanFilter::predict(const KalmanState& state) const {
    const double h = state.mean(3);
    Vec8 std_proc;
    std_proc << cfg_.std_weight_position * h, cfg_.std_weight_position * h, 1e-2,
        cfg_.std_weight_position * h, cfg_.std_weight_velocity * h, cfg_.std_weight_velocity * h,
        1e-5, cfg_.std_weight_velocity * h;
    const Mat8 q = std_proc.array().square().matrix().asDiagonal();

    const Mat8 f = transition();
    KalmanState next;
    next.mean = f * state.mean;
    next.covariance = f * state.covariance * f.transpose() + q;
    symmetrize(next.covariance);
    return next;
}

KalmanState KalmanFilter::update(const KalmanState& state, const BBox& measurement) const {
    if (!measurement.valid()) {
        throw std::invalid_argument("KalmanFilter::update: degenerate box");
    }
    const Projection proj = project(cfg_, state);
    const Eigen::LLT<Mat4> chol(proj.cov);
    if (chol.info() != Eigen::Success) {
        throw std::runtime_error("KalmanFilter::update: innovation covariance not positive definite");
    }

    const Mat4x8 obs = observation();
    // K = P H^T S^-1, via the Cholesky factor of S.
    const Eigen::Matrix<double, 8, 4> gain =
        chol.solve(obs * state.covariance.transpose()).transpose();
    const Vec4 innovation = to_measurement(measurement) - proj.mean;

    KalmanState next;
    next.mean = state.mean + gain * innovation;
    next.covariance = state.covariance - gain * proj.cov * gain.transpose();
    symmetrize(next.covariance);

    next.mean(2) = std::max(next.mean(2), 1e-2);
    next.mean(3) = std::max(next.mean(3), 1e-2);
    return next;
}

double KalmanFilter::gating_distance(const KalmanState& state, const BBox& measurement) const {
    if (!measurement.valid()) {
        throw std::invalid_argument("KalmanFilter::gating_distance: degenerate box");
    }
    const Projection proj = project(cfg_, state);
    const Vec4 innovation = to_measurement(measurement) - proj.mean;

    if (cfg_.gate_position_only) {
        const Eigen::Matrix2d s = proj.cov.topLeftCorner<2, 2>();
        const Eigen::LLT<Eigen::Matrix2d> chol(s);
        if (chol.info() != Eigen::Success) {
            throw std::runtime_error("KalmanFilter::gating_distance: singular innovation covariance");
        }
        const Eigen::Vector2d d = innovation.head<2>();
        return d.dot(chol.solve(d));
    }

    const Eigen::LLT<Mat4> chol(proj.cov);
    if (chol.info() != Eigen::Success) {
        throw std::runtime_error("KalmanFilter::gating_distance: singular innovation covariance");
    }
    return innovation.dot(chol.solve(innovation));
}

}  // namespace motpipe
