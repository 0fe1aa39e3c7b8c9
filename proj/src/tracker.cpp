#include "motpipe/tracker.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>

namespace motpipe {

void TrackerConfig::validate() const {
    if (n_init < 1) throw std::invalid_argument("n_init must be >= 1");
    if (max_age < 1) throw std::invalid_argument("max_age must be >= 1");
    if (nn_budget < 1) throw std::invalid_argument("nn_budget must be >= 1");
    if (detpre.softnms_sigma <= 0.0) throw std::invalid_argument("softnms_sigma must be > 0");
    if (detpre.adaptive_floor > detpre.base_threshold ||
        detpre.base_threshold > detpre.adaptive_ceiling) {
        throw std::invalid_argument("adaptive_floor <= base_threshold <= adaptive_ceiling required");
    }
    if (detpre.adaptive_ema_alpha <= 0.0 || detpre.adaptive_ema_alpha > 1.0) {
        throw std::invalid_argument("adaptive_ema_alpha must be in (0, 1]");
    }
    if (assoc.max_iou_distance <= 0.0 || assoc.max_iou_distance > 1.0) {
        throw std::invalid_argument("max_iou_distance must be in (0, 1]");
    }
    if (assoc.depth_weight < 0.0) throw std::invalid_argument("depth_weight must be >= 0");
    if (depth_ema_alpha <= 0.0 || depth_ema_alpha > 1.0) {
        throw std::invalid_argument("depth_ema_alpha must be in (0, 1]");
    }
}

Tracker::Tracker(const TrackerConfig& cfg) : cfg_(cfg), filter_(cfg.kalman) {
    cfg_.validate();
}

std::vector<TrackRow> Tracker::step(int frame, const std::vector<Detection>& raw_dets) {
    if (frame <= last_frame_) {
        throw std::invalid_argument("frame indices must strictly increase (got " +
                                    std::to_string(frame) + " after " +
                                    std::to_string(last_frame_) + ")");
    }
    last_frame_ = frame;

    for (auto& t : tracks_) {
        t.state = filter_.predict(t.state);
        ++t.time_since_update;
    }

    // Detection post-processing on raw confidences: adaptive threshold,
    // confidence filter, then Soft-NMS.
    if (cfg_.detpre.adaptive_enabled && !raw_dets.empty()) {
        double mean = 0.0;
        for (const auto& d : raw_dets) mean += d.confidence;
        mean /= static_cast<double>(raw_dets.size());
        ema_mean_conf_ = ema_mean_conf_.has_value()
                             ? cfg_.detpre.adaptive_ema_alpha * mean +
                                   (1.0 - cfg_.detpre.adaptive_ema_alpha) * *ema_mean_conf_
                             : mean;
    }
    const double threshold = ema_mean_conf_.has_value()
                                 ? adaptive_threshold(*ema_mean_conf_, cfg_.detpre)
                                 : cfg_.detpre.base_threshold;
    const auto detections = soft_nms(filter_confidence(raw_dets, threshold),
                                     cfg_.detpre.softnms_sigma, cfg_.detpre.softnms_min_score);

    const auto cascade = matching_cascade(tracks_, detections, cfg_.assoc, filter_, cfg_.max_age);

    std::vector<int> matched_det(tracks_.size(), -1);
    for (const auto& [t, d] : cascade.matches) {
        Track& trk = tracks_[static_cast<size_t>(t)];
        const Detection& det = detections[static_cast<size_t>(d)];
        trk.state = filter_.update(trk.state, det.bbox);
        ++trk.hits;
        trk.time_since_update = 0;
        trk.last_visibility = pose_visibility(det.keypoints, cfg_.assoc.keypoint_conf_min);
        if (det.has_embedding() && trk.last_visibility >= cfg_.assoc.pose_visibility_min) {
            trk.push_embedding(det.embedding, cfg_.nn_budget);
        }
        if (det.rel_depth.has_value()) {
            trk.depth_ema = trk.depth_ema.has_value()
                                ? cfg_.depth_ema_alpha * *det.rel_depth +
                                      (1.0 - cfg_.depth_ema_alpha) * *trk.depth_ema
                                : *det.rel_depth;
        }
        if (trk.status == TrackStatus::Tentative && trk.hits >= cfg_.n_init) {
            trk.status = TrackStatus::Confirmed;
            trk.id = next_id_++;
        }
        matched_det[static_cast<size_t>(t)] = d;
    }

    for (int t : cascade.unmatched_tracks) {
        Track& trk = tracks_[static_cast<size_t>(t)];
        if (trk.status == TrackStatus::Tentative || trk.time_since_update > cfg_.max_age) {
            trk.status = TrackStatus::Deleted;
        }
    }

    for (int d : cascade.unmatched_detections) {
        const Detection& det = detections[static_cast<size_t>(d)];
        Track trk;
        trk.state = filter_.initiate(det.bbox);
        trk.status = TrackStatus::Tentative;
        trk.hits = 1;
        trk.time_since_update = 0;
        trk.last_visibility = pose_visibility(det.keypoints, cfg_.assoc.keypoint_conf_min);
        if (det.has_embedding() && trk.last_visibility >= cfg_.assoc.pose_visibility_min) {
            trk.push_embedding(det.embedding, cfg_.nn_budget);
        }
        trk.depth_ema = det.rel_depth;
        if (trk.hits >= cfg_.n_init) {
            trk.status = TrackStatus::Confirmed;
            trk.id = next_id_++;
        }
        matched_det.push_back(d);
        tracks_.push_back(std::move(trk));
    }

    std::vector<TrackRow> rows;
    for (size_t t = 0; t < tracks_.size(); ++t) {
        const Track& trk = tracks_[t];
        if (trk.status != TrackStatus::Confirmed || trk.time_since_update != 0) {
            continue;
        }
        const Detection& det = detections[static_cast<size_t>(matched_det[t])];
        TrackRow row;
        row.frame = frame;
        row.id = trk.id;
        row.bbox = cfg_.output_smoothing ? trk.state.to_bbox() : det.bbox;
        row.confidence = det.confidence;
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(),
              [](const TrackRow& a, const TrackRow& b) { return a.id < b.id; });

    std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::Deleted; });
    return rows;
}

std::vector<TrackRow> run_sequence(const std::map<int, std::vector<Detection>>& dets_by_frame,
                                   const SequenceMeta& meta, const TrackerConfig& cfg) {
    std::vector<TrackRow> rows;
    const int last = dets_by_frame.empty() ? 0 : dets_by_frame.rbegin()->first;
    if (last != meta.seq_length) {
        std::cerr << "warning: sequence " << meta.name << " declares " << meta.seq_length
                  << " frames but detections span " << last << "\n";
    }
    Tracker tracker(cfg);
    static const std::vector<Detection> kEmpty;
    for (int frame = 1; frame <= last; ++frame) {
        const auto it = dets_by_frame.find(frame);
        auto out = tracker.step(frame, it == dets_by_frame.end() ? kEmpty : it->second);
        rows.insert(rows.end(), out.begin(), out.end());
    }
    return rows;
}

}  // namespace motpipe
