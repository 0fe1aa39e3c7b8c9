#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <stdexcept>

#include "motpipe/kalman.hpp"

using motpipe::BBox;
using motpipe::KalmanFilter;
using motpipe::KalmanState;

TEST_CASE("initiate centers on the measurement with canonical spread") {
    const KalmanFilter kf;
    const auto st = kf.initiate(BBox{100, 50, 50, 100});
    CHECK(st.mean(0) == doctest::Approx(125.0));
    CHECK(st.mean(1) == doctest::Approx(100.0));
    CHECK(st.mean(2) == doctest::Approx(0.5));
    CHECK(st.mean(3) == doctest::Approx(100.0));
    for (int i = 4; i < 8; ++i) CHECK(st.mean(i) == doctest::Approx(0.0));

    const double expected_diag[8] = {100.0, 100.0, 1e-4, 100.0, 39.0625, 39.0625, 1e-10, 39.0625};
    for (int i = 0; i < 8; ++i) {
        CHECK(st.covariance(i, i) == doctest::Approx(expected_diag[i]).epsilon(1e-12));
        for (int j = 0; j < 8; ++j) {
            if (i != j) CHECK(st.covariance(i, j) == doctest::Approx(0.0));
        }
    }
    CHECK_THROWS_AS(kf.initiate(BBox{0, 0, 0, 10}), std::invalid_argument);
}

TEST_CASE("predict applies constant velocity and inflates covariance") {
    const KalmanFilter kf;
    auto st = kf.initiate(BBox{100, 50, 50, 100});
    st.mean(4) = 3.0;
    st.mean(5) = -2.0;
    const auto pred = kf.predict(st);
    CHECK(pred.mean(0) == doctest::Approx(128.0));
    CHECK(pred.mean(1) == doctest::Approx(98.0));
    CHECK(pred.mean(2) == doctest::Approx(0.5));
    CHECK(pred.mean(3) == doctest::Approx(100.0));
    CHECK(pred.mean(4) == doctest::Approx(3.0));
    CHECK(pred.covariance.trace() > st.covariance.trace());
}

TEST_CASE("update pulls the state toward the measurement and contracts") {
    const KalmanFilter kf;
    auto st = kf.initiate(BBox{100, 50, 50, 100});
    st = kf.predict(st);
    const BBox meas{110, 60, 50, 100};
    const auto post = kf.update(st, meas);
    const auto z = meas.to_xyah();
    for (int i = 0; i < 2; ++i) {
        const double lo = std::min(st.mean(i), z[static_cast<size_t>(i)]);
        const double hi = std::max(st.mean(i), z[static_cast<size_t>(i)]);
        CHECK(post.mean(i) >= lo - 1e-9);
        CHECK(post.mean(i) <= hi + 1e-9);
    }
    CHECK(post.covariance.trace() < st.covariance.trace());
    // Repeated identical measurements converge onto the observation.
    auto s = post;
    for (int k = 0; k < 200; ++k) {
        s = kf.predict(s);
        s = kf.update(s, meas);
    }
    CHECK(s.mean(0) == doctest::Approx(z[0]).epsilon(1e-6));
    CHECK(s.mean(1) == doctest::Approx(z[1]).epsilon(1e-6));
    CHECK(s.mean(3) == doctest::Approx(z[3]).epsilon(1e-6));
}

TEST_CASE("posterior aspect and height never collapse below the clamp") {
    const KalmanFilter kf;
    auto st = kf.initiate(BBox{100, 50, 50, 100});
    for (int k = 0; k < 50; ++k) {
        st = kf.predict(st);
        st = kf.update(st, BBox{100, 50, 0.02, 0.02});
        CHECK(st.mean(2) >= 1e-2);
        CHECK(st.mean(3) >= 1e-2);
    }
}

TEST_CASE("gating distance grows with offset and respects dof mode") {
    motpipe::KalmanConfig cfg;
    const KalmanFilter kf(cfg);
    auto st = kf.initiate(BBox{100, 50, 50, 100});
    st = kf.predict(st);
    const BBox center = st.to_bbox();
    const double d0 = kf.gating_distance(st, center);
    CHECK(d0 == doctest::Approx(0.0).epsilon(1e-9));
    const double d5 = kf.gating_distance(st, center.translated(5, 0));
    const double d20 = kf.gating_distance(st, center.translated(20, 0));
    CHECK(d5 > d0);
    CHECK(d20 > d5);

    motpipe::KalmanConfig pos_cfg;
    pos_cfg.gate_position_only = true;
    const KalmanFilter kf2(pos_cfg);
    // Aspect/height deviation is invisible to the 2-dof gate.
    const BBox tall{center.left + 10, center.top, center.width - 20, center.height};  // same center x
    const double full = kf.gating_distance(st, tall);
    const double posonly = kf2.gating_distance(st, tall);
    CHECK(posonly < full);
    CHECK(posonly == doctest::Approx(0.0).epsilon(1e-9));

    CHECK(cfg.gate_threshold() == doctest::Approx(9.4877));
    CHECK(pos_cfg.gate_threshold() == doctest::Approx(5.9915));
}

TEST_CASE("long randomized cycling keeps covariance symmetric positive definite") {
    const KalmanFilter kf;
    std::mt19937_64 rng(97);
    std::normal_distribution<double> noise(0.0, 2.0);
    auto st = kf.initiate(BBox{500, 300, 60, 140});
    double worst_asym = 0.0;
    double worst_eig = 1e300;
    for (int k = 0; k < 2000; ++k) {
        st = kf.predict(st);
        const BBox meas{500 + noise(rng), 300 + noise(rng), 60 + noise(rng) * 0.1,
                        140 + noise(rng) * 0.1};
        st = kf.update(st, meas);
        const Eigen::Matrix<double, 8, 8> asym = st.covariance - st.covariance.transpose();
        worst_asym = std::max(worst_asym, asym.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> es(st.covariance);
        worst_eig = std::min(worst_eig, es.eigenvalues().minCoeff());
    }
    CHECK(worst_asym < 1e-9);
    CHECK(worst_eig > 0.0);
}
