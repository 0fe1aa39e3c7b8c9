#include "motpipe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace motpipe {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent per-signal generators so enabling one signal never shifts the
// draws of another.
enum Stream : std::uint64_t {
    kPaths = 1,
    kDetNoise,
    kMiss,
    kClutter,
    kEmbed,
    kEmbedNoise,
    kPose,
};

std::mt19937_64 stream_rng(std::uint64_t seed, Stream stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) + static_cast<std::uint64_t>(stream)));
}

std::vector<double> normalized(std::vector<double> v) {
    double norm_sq = 0.0;
    for (const double x : v) norm_sq += x * x;
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-12) {
        throw std::runtime_error("degenerate embedding draw");
    }
    for (double& x : v) x /= norm;
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

void SynthConfig::validate() const {
    std::vector<std::string> violations;
    if (n_peds < 1) violations.push_back("n_peds must be >= 1");
    if (n_frames < 1) violations.push_back("n_frames must be >= 1");
    if (im_width < 200 || im_height < 200) {
        violations.push_back("image dimensions must be >= 200 px");
    }
    if (vel_std < 0.0) violations.push_back("vel_std must be >= 0");
    if (det_noise_std < 0.0) violations.push_back("det_noise_std must be >= 0");
    if (miss_rate < 0.0 || miss_rate > 1.0) violations.push_back("miss_rate must be in [0, 1]");
    if (clutter_rate < 0.0 || clutter_rate > 1.0) {
        violations.push_back("clutter_rate must be in [0, 1]");
    }
    if (embed_dim < 2) violations.push_back("embed_dim must be >= 2");
    if (embed_noise_std < 0.0) violations.push_back("embed_noise_std must be >= 0");
    for (const auto& occ : occlusions) {
        if (occ.ped < 1 || occ.ped > n_peds) {
            violations.push_back("occlusion references unknown ped " + std::to_string(occ.ped));
        }
        if (occ.start < 1) violations.push_back("occlusion start must be >= 1");
        if (occ.duration < 1) violations.push_back("occlusion duration must be >= 1");
    }
    if (!violations.empty()) {
        std::string msg;
        for (size_t i = 0; i < violations.size(); ++i) {
            if (i) msg += "; ";
            msg += violations[i];
        }
        throw std::invalid_argument(msg);
    }
}

SynthScene generate(const SynthConfig& cfg) {
    cfg.validate();

    SynthScene scene;
    scene.meta.name = "synth-" + std::to_string(cfg.seed);
    scene.meta.frame_rate = 30.0;
    scene.meta.seq_length = cfg.n_frames;
    scene.meta.im_width = cfg.im_width;
    scene.meta.im_height = cfg.im_height;

    auto paths = stream_rng(cfg.seed, kPaths);
    auto det_noise = stream_rng(cfg.seed, kDetNoise);
    auto miss = stream_rng(cfg.seed, kMiss);
    auto clutter = stream_rng(cfg.seed, kClutter);
    auto embed = stream_rng(cfg.seed, kEmbed);
    auto embed_noise = stream_rng(cfg.seed, kEmbedNoise);
    auto pose = stream_rng(cfg.seed, kPose);

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    // Identity embeddings, rejection-sampled to stay pairwise separable.
    std::vector<std::vector<double>> identities;
    identities.reserve(static_cast<size_t>(cfg.n_peds));
    for (int i = 0; i < cfg.n_peds; ++i) {
        for (int attempt = 0;; ++attempt) {
            if (attempt > 10000) {
                throw std::runtime_error("could not draw separable identity embeddings");
            }
            std::vector<double> v(static_cast<size_t>(cfg.embed_dim));
            for (double& x : v) x = gauss(embed);
            v = normalized(std::move(v));
            bool ok = true;
            for (const auto& other : identities) {
                if (std::abs(dot(v, other)) >= 0.35) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                identities.push_back(std::move(v));
                break;
            }
        }
    }

    // Pedestrian geometry: fixed box size, start in the central region.
    struct Ped {
        double w, h, x, y, vx, vy;  // x,y = top-left corner
    };
    std::vector<Ped> peds(static_cast<size_t>(cfg.n_peds));
    const double W = cfg.im_width, H = cfg.im_height;
    for (auto& p : peds) {
        p.w = 40.0 + 30.0 * u01(paths);
        p.h = 100.0 + 60.0 * u01(paths);
        p.x = 0.2 * W + u01(paths) * (0.6 * W - p.w);
        p.y = 0.2 * H + u01(paths) * (0.6 * H - p.h);
        p.vx = -2.5 + 5.0 * u01(paths);
        p.vy = -2.5 + 5.0 * u01(paths);
    }

    auto occluded = [&cfg](int ped_id, int frame) {
        for (const auto& occ : cfg.occlusions) {
            if (occ.ped == ped_id && frame >= occ.start && frame < occ.start + occ.duration) {
                return true;
            }
        }
        return false;
    };
    auto pre_occlusion = [&cfg](int ped_id, int frame) {
        for (const auto& occ : cfg.occlusions) {
            if (occ.ped == ped_id && frame >= occ.start - 5 && frame < occ.start) {
                return true;
            }
        }
        return false;
    };

    auto emit_pose = [&](std::mt19937_64& rng, int frame, int det_idx, const BBox& box,
                         double conf) {
        PoseRow row;
        row.frame = frame;
        row.det_idx = det_idx;
        for (auto& kp : row.keypoints) {
            kp.x = box.left + u01(rng) * box.width;
            kp.y = box.top + u01(rng) * box.height;
            kp.conf = conf;
        }
        scene.pose.push_back(row);
    };

    std::poisson_distribution<int> clutter_count(cfg.clutter_rate > 0.0 ? cfg.clutter_rate : 1.0);

    for (int frame = 1; frame <= cfg.n_frames; ++frame) {
        if (frame > 1) {
            for (auto& p : peds) {
                if (cfg.vel_std > 0.0) {
                    p.vx += cfg.vel_std * gauss(paths);
                    p.vy += cfg.vel_std * gauss(paths);
                }
                p.x += p.vx;
                p.y += p.vy;
                // Reflect so the box stays fully inside the image.
                while (p.x < 0.0 || p.x > W - p.w) {
                    if (p.x < 0.0) {
                        p.x = -p.x;
                        p.vx = -p.vx;
                    } else {
                        p.x = 2.0 * (W - p.w) - p.x;
                        p.vx = -p.vx;
                    }
                }
                while (p.y < 0.0 || p.y > H - p.h) {
                    if (p.y < 0.0) {
                        p.y = -p.y;
                        p.vy = -p.vy;
                    } else {
                        p.y = 2.0 * (H - p.h) - p.y;
                        p.vy = -p.vy;
                    }
                }
            }
        }

        int det_idx = 0;
        for (int i = 0; i < cfg.n_peds; ++i) {
            const int ped_id = i + 1;
            const Ped& p = peds[static_cast<size_t>(i)];
            const BBox gt_box{p.x, p.y, p.w, p.h};
            const bool occ = occluded(ped_id, frame);

            GtRow gt;
            gt.frame = frame;
            gt.id = ped_id;
            gt.bbox = gt_box;
            gt.visibility = occ ? 0.0 : 1.0;
            scene.gt.push_back(gt);

            if (occ) continue;
            if (cfg.miss_rate > 0.0 && u01(miss) < cfg.miss_rate) continue;

            BBox box = gt_box;
            if (cfg.det_noise_std > 0.0) {
                box.left += cfg.det_noise_std * gauss(det_noise);
                box.top += cfg.det_noise_std * gauss(det_noise);
                box.width = std::max(1.0, box.width + cfg.det_noise_std * gauss(det_noise));
                box.height = std::max(1.0, box.height + cfg.det_noise_std * gauss(det_noise));
            }
            const double conf = 0.85 + 0.14 * u01(det_noise);
            scene.det.push_back(DetRow{frame, box, conf});

            EmbedRow erow;
            erow.frame = frame;
            erow.det_idx = det_idx;
            erow.values = identities[static_cast<size_t>(i)];
            if (cfg.embed_noise_std > 0.0) {
                for (double& v : erow.values) v += cfg.embed_noise_std * gauss(embed_noise);
                erow.values = normalized(std::move(erow.values));
            }
            scene.embed.push_back(std::move(erow));

            if (cfg.depth_lanes) {
                const double lane = (static_cast<double>(i) + 0.5) / cfg.n_peds;
                scene.depth.push_back(DepthRow{frame, det_idx, lane});
            }
            emit_pose(pose, frame, det_idx, box, pre_occlusion(ped_id, frame) ? 0.1 : 0.9);
            ++det_idx;
        }

        if (cfg.clutter_rate > 0.0) {
            const int k = clutter_count(clutter);
            for (int c = 0; c < k; ++c) {
                const double w = 30.0 + 50.0 * u01(clutter);
                const double h = 80.0 + 90.0 * u01(clutter);
                const double x = u01(clutter) * (W - w);
                const double y = u01(clutter) * (H - h);
                const BBox box{x, y, w, h};
                const double conf = 0.65 + 0.30 * u01(clutter);
                scene.det.push_back(DetRow{frame, box, conf});

                EmbedRow erow;
                erow.frame = frame;
                erow.det_idx = det_idx;
                erow.values.resize(static_cast<size_t>(cfg.embed_dim));
                for (double& v : erow.values) v = gauss(clutter);
                erow.values = normalized(std::move(erow.values));
                scene.embed.push_back(std::move(erow));

                if (cfg.depth_lanes) {
                    scene.depth.push_back(DepthRow{frame, det_idx, u01(clutter)});
                }
                emit_pose(clutter, frame, det_idx, box, 0.9);
                ++det_idx;
            }
        }
    }
    return scene;
}

void write_scene(const SynthScene& scene, const std::filesystem::path& dir) {
    write_file(dir / "seqinfo.ini", write_seqinfo(scene.meta));
    write_file(dir / "gt" / "gt.txt", write_gt(scene.gt));
    write_file(dir / "det" / "det.txt", write_det(scene.det));
    write_file(dir / "embed.csv", write_embed(scene.embed));
    if (!scene.depth.empty()) {
        write_file(dir / "depth.csv", write_depth(scene.depth));
    }
    write_file(dir / "pose.csv", write_pose(scene.pose));
}

std::map<int, std::vector<Detection>> scene_detections(const SynthScene& scene) {
    std::map<int, std::vector<Detection>> out;
    for (const auto& row : scene.det) {
        Detection det;
        det.frame = row.frame;
        det.bbox = row.bbox;
        det.confidence = row.confidence;
        out[row.frame].push_back(std::move(det));
    }
    auto at = [&out](int frame, int det_idx) -> Detection& {
        return out.at(frame).at(static_cast<size_t>(det_idx));
    };
    for (const auto& row : scene.embed) {
        at(row.frame, row.det_idx).embedding = row.values;
    }
    for (const auto& row : scene.depth) {
        at(row.frame, row.det_idx).rel_depth = row.rel_depth;
    }
    for (const auto& row : scene.pose) {
        at(row.frame, row.det_idx).keypoints =
            std::vector<Keypoint>(row.keypoints.begin(), row.keypoints.end());
    }
    return out;
}

FrameBoxes scene_gt(const SynthScene& scene, double min_visibility) {
    FrameBoxes out;
    for (const auto& row : scene.gt) {
        if (row.active != 1 || row.category != 1 || row.visibility < min_visibility) {
            continue;
        }
        out[row.frame].push_back(IdBox{row.id, row.bbox});
    }
    return out;
}

}  // namespace motpipe
