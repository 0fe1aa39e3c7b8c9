#include "motpipe/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace motpipe {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

int parse_int_field(std::string_view field, int line_no, const char* what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(std::string("expected integer for ") + what + ", got '" +
                             std::string(field) + "'",
                         line_no);
    }
    return value;
}

double parse_double_field(std::string_view field, int line_no, const char* what) {
    double value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(std::string("expected number for ") + what + ", got '" +
                             std::string(field) + "'",
                         line_no);
    }
    return value;
}

// Calls fn(line_no, trimmed_line) for every non-empty line, 1-based numbering.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
    int line_no = 0;
    size_t start = 0;
    while (start <= text.size()) {
        const size_t nl = text.find('\n', start);
        const size_t end = nl == std::string::npos ? text.size() : nl;
        ++line_no;
        const std::string_view line = trim(std::string_view(text).substr(start, end - start));
        if (!line.empty()) {
            fn(line_no, line);
        }
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
}

int parse_frame_field(std::string_view field, int line_no) {
    const int frame = parse_int_field(field, line_no, "frame");
    if (frame < 1) {
        throw ParseError("frame index must be >= 1, got " + std::to_string(frame), line_no);
    }
    return frame;
}

}  // namespace

SequenceMeta parse_seqinfo(const std::string& text) {
    SequenceMeta meta;
    bool in_sequence = false, saw_sequence = false;
    std::set<std::string> seen;
    for_each_line(text, [&](int line_no, std::string_view line) {
        if (line.front() == ';' || line.front() == '#') return;
        if (line.front() == '[') {
            in_sequence = line == "[Sequence]";
            saw_sequence = saw_sequence || in_sequence;
            return;
        }
        if (!in_sequence) return;
        const size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected key=value, got '" + std::string(line) + "'", line_no);
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key == "name") {
            meta.name = std::string(value);
        } else if (key == "frameRate") {
            meta.frame_rate = parse_double_field(value, line_no, "frameRate");
        } else if (key == "seqLength") {
            meta.seq_length = parse_int_field(value, line_no, "seqLength");
        } else if (key == "imWidth") {
            meta.im_width = parse_int_field(value, line_no, "imWidth");
        } else if (key == "imHeight") {
            meta.im_height = parse_int_field(value, line_no, "imHeight");
        } else {
            return;  // unknown keys tolerated
        }
        seen.insert(key);
    });
    if (!saw_sequence) {
        throw ParseError("missing [Sequence] section");
    }
    for (const char* key : {"name", "frameRate", "seqLength", "imWidth", "imHeight"}) {
        if (!seen.count(key)) {
            throw ParseError(std::string("missing required key: ") + key);
        }
    }
    return meta;
}

DetParse parse_det(const std::string& text) {
    DetParse out;
    for_each_line(text, [&](int line_no, std::string_view line) {
        const auto f = split_fields(line);
        if (f.size() != 10) {
            throw ParseError("expected 10 comma-separated fields, got " +
                                 std::to_string(f.size()),
                             line_no);
        }
        const int frame = parse_frame_field(f[0], line_no);
        parse_double_field(f[1], line_no, "id");
        const double l = parse_double_field(f[2], line_no, "bb_left");
        const double t = parse_double_field(f[3], line_no, "bb_top");
        const double w = parse_double_field(f[4], line_no, "bb_width");
        const double h = parse_double_field(f[5], line_no, "bb_height");
        const double conf = parse_double_field(f[6], line_no, "conf");
        for (int i = 7; i < 10; ++i) parse_double_field(f[i], line_no, "tail");
        if (w <= 0.0 || h <= 0.0) {
            ++out.dropped;
            return;
        }
        Detection det;
        det.frame = frame;
        det.bbox = BBox{l, t, w, h};
        det.confidence = conf;
        out.by_frame[frame].push_back(std::move(det));
    });
    return out;
}

FrameBoxes parse_gt(const std::string& text, const EvalConfig& cfg) {
    FrameBoxes out;
    std::set<std::pair<int, int>> seen;
    for_each_line(text, [&](int line_no, std::string_view line) {
        const auto f = split_fields(line);
        if (f.size() != 9) {
            throw ParseError("expected 9 comma-separated fields, got " + std::to_string(f.size()),
                             line_no);
        }
        const int frame = parse_frame_field(f[0], line_no);
        const int id = parse_int_field(f[1], line_no, "id");
        const double l = parse_double_field(f[2], line_no, "bb_left");
        const double t = parse_double_field(f[3], line_no, "bb_top");
        const double w = parse_double_field(f[4], line_no, "bb_width");
        const double h = parse_double_field(f[5], line_no, "bb_height");
        const int active = parse_int_field(f[6], line_no, "active");
        const int category = parse_int_field(f[7], line_no, "category");
        const double visibility = parse_double_field(f[8], line_no, "visibility");
        if (!seen.emplace(frame, id).second) {
            throw ParseError("duplicate (frame, id) pair (" + std::to_string(frame) + ", " +
                                 std::to_string(id) + ")",
                             line_no);
        }
        if (active != 1 || !cfg.consider_categories.count(category) ||
            visibility < cfg.min_visibility || w <= 0.0 || h <= 0.0) {
            return;
        }
        out[frame].push_back(IdBox{id, BBox{l, t, w, h}});
    });
    return out;
}

TrackParse parse_tracks(const std::string& text) {
    TrackParse out;
    for_each_line(text, [&](int line_no, std::string_view line) {
        const auto f = split_fields(line);
        if (f.size() != 9 && f.size() != 10) {
            throw ParseError("expected 9 or 10 comma-separated fields, got " +
                                 std::to_string(f.size()),
                             line_no);
        }
        TrackRow row;
        row.frame = parse_frame_field(f[0], line_no);
        row.id = parse_int_field(f[1], line_no, "id");
        const double l = parse_double_field(f[2], line_no, "bb_left");
        const double t = parse_double_field(f[3], line_no, "bb_top");
        const double w = parse_double_field(f[4], line_no, "bb_width");
        const double h = parse_double_field(f[5], line_no, "bb_height");
        row.confidence = parse_double_field(f[6], line_no, "conf");
        for (size_t i = 7; i < f.size(); ++i) parse_double_field(f[i], line_no, "tail");
        if (w <= 0.0 || h <= 0.0) {
            ++out.dropped;
            return;
        }
        row.bbox = BBox{l, t, w, h};
        out.rows.push_back(row);
    });
    return out;
}

SidecarStats attach_sidecars(std::map<int, std::vector<Detection>>& dets,
                             const std::optional<std::string>& embed_text,
                             const std::optional<std::string>& depth_text,
                             const std::optional<std::string>& pose_text) {
    SidecarStats stats;
    auto lookup = [&dets, &stats](int frame, int det_idx) -> Detection* {
        const auto it = dets.find(frame);
        if (it == dets.end() || det_idx < 0 ||
            det_idx >= static_cast<int>(it->second.size())) {
            ++stats.unmatched;
            return nullptr;
        }
        return &it->second[static_cast<size_t>(det_idx)];
    };

    if (embed_text.has_value()) {
        int dim = -1;
        for_each_line(*embed_text, [&](int line_no, std::string_view line) {
            const auto f = split_fields(line);
            if (f.size() < 3) {
                throw ParseError("embedding row needs frame, det_idx and components", line_no);
            }
            if (dim == -1) {
                dim = static_cast<int>(f.size()) - 2;
            } else if (static_cast<int>(f.size()) - 2 != dim) {
                throw ParseError("embedding dimension changed from " + std::to_string(dim) +
                                     " to " + std::to_string(f.size() - 2),
                                 line_no);
            }
            const int frame = parse_frame_field(f[0], line_no);
            const int det_idx = parse_int_field(f[1], line_no, "det_idx");
            std::vector<double> values(static_cast<size_t>(dim));
            double norm_sq = 0.0;
            for (int i = 0; i < dim; ++i) {
                values[static_cast<size_t>(i)] =
                    parse_double_field(f[static_cast<size_t>(i) + 2], line_no, "component");
                norm_sq += values[static_cast<size_t>(i)] * values[static_cast<size_t>(i)];
            }
            const double norm = std::sqrt(norm_sq);
            if (norm < 1e-12) {
                throw ParseError("zero-norm embedding cannot be normalized", line_no);
            }
            for (auto& v : values) v /= norm;
            if (Detection* det = lookup(frame, det_idx)) {
                det->embedding = std::move(values);
            }
        });
    }

    if (depth_text.has_value()) {
        for_each_line(*depth_text, [&](int line_no, std::string_view line) {
            const auto f = split_fields(line);
            if (f.size() != 3) {
                throw ParseError("expected 3 comma-separated fields, got " +
                                     std::to_string(f.size()),
                                 line_no);
            }
            const int frame = parse_frame_field(f[0], line_no);
            const int det_idx = parse_int_field(f[1], line_no, "det_idx");
            double depth = parse_double_field(f[2], line_no, "rel_depth");
            if (depth < 0.0 || depth > 1.0) {
                depth = std::clamp(depth, 0.0, 1.0);
                ++stats.clamped;
            }
            if (Detection* det = lookup(frame, det_idx)) {
                det->rel_depth = depth;
            }
        });
    }

    if (pose_text.has_value()) {
        for_each_line(*pose_text, [&](int line_no, std::string_view line) {
            const auto f = split_fields(line);
            if (f.size() != 2 + 3 * static_cast<size_t>(kNumKeypoints)) {
                throw ParseError("expected 53 comma-separated fields, got " +
                                     std::to_string(f.size()),
                                 line_no);
            }
            const int frame = parse_frame_field(f[0], line_no);
            const int det_idx = parse_int_field(f[1], line_no, "det_idx");
            std::vector<Keypoint> kps(static_cast<size_t>(kNumKeypoints));
            for (int k = 0; k < kNumKeypoints; ++k) {
                const size_t base = 2 + 3 * static_cast<size_t>(k);
                kps[static_cast<size_t>(k)].x = parse_double_field(f[base], line_no, "x");
                kps[static_cast<size_t>(k)].y = parse_double_field(f[base + 1], line_no, "y");
                kps[static_cast<size_t>(k)].conf = parse_double_field(f[base + 2], line_no, "conf");
            }
            if (Detection* det = lookup(frame, det_idx)) {
                det->keypoints = std::move(kps);
            }
        });
    }
    return stats;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
    if (ec != std::errc()) {
        throw std::runtime_error("number formatting failed");
    }
    return std::string(buf, ptr);
}

std::string write_seqinfo(const SequenceMeta& meta) {
    std::string out = "[Sequence]\n";
    out += "name=" + meta.name + '\n';
    const double rate_rounded = std::round(meta.frame_rate);
    out += "frameRate=" + (meta.frame_rate == rate_rounded
                               ? std::to_string(static_cast<long long>(rate_rounded))
                               : format_fixed(meta.frame_rate, 2)) +
           '\n';
    out += "seqLength=" + std::to_string(meta.seq_length) + '\n';
    out += "imWidth=" + std::to_string(meta.im_width) + '\n';
    out += "imHeight=" + std::to_string(meta.im_height) + '\n';
    return out;
}

std::string write_tracks(std::vector<TrackRow> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const TrackRow& a, const TrackRow& b) {
        return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
    });
    std::string out;
    for (const auto& r : rows) {
        out += std::to_string(r.frame) + ',' + std::to_string(r.id);
        out += ',' + format_fixed(r.bbox.left, 2) + ',' + format_fixed(r.bbox.top, 2);
        out += ',' + format_fixed(r.bbox.width, 2) + ',' + format_fixed(r.bbox.height, 2);
        out += ',' + format_fixed(r.confidence, 4) + ",-1,-1,-1\n";
    }
    return out;
}

std::string write_gt(const std::vector<GtRow>& rows) {
    std::string out;
    for (const auto& r : rows) {
        out += std::to_string(r.frame) + ',' + std::to_string(r.id);
        out += ',' + format_fixed(r.bbox.left, 2) + ',' + format_fixed(r.bbox.top, 2);
        out += ',' + format_fixed(r.bbox.width, 2) + ',' + format_fixed(r.bbox.height, 2);
        out += ',' + std::to_string(r.active) + ',' + std::to_string(r.category);
        out += ',' + format_fixed(r.visibility, 2) + '\n';
    }
    return out;
}

std::string write_det(const std::vector<DetRow>& rows) {
    std::string out;
    for (const auto& r : rows) {
        out += std::to_string(r.frame) + ",-1";
        out += ',' + format_fixed(r.bbox.left, 2) + ',' + format_fixed(r.bbox.top, 2);
        out += ',' + format_fixed(r.bbox.width, 2) + ',' + format_fixed(r.bbox.height, 2);
        out += ',' + format_fixed(r.confidence, 4) + ",-1,-1,-1\n";
    }
    return out;
}

std::string write_embed(const std::vector<EmbedRow>& rows) {
    std::string out;
    for (const auto& r : rows) {
        out += std::to_string(r.frame) + ',' + std::to_string(r.det_idx);
        for (const double v : r.values) {
            out += ',' + format_fixed(v, 6);
        }
        out += '\n';
    }
    return out;
}

std::string write_depth(const std::vector<DepthRow>& rows) {
    std::string out;
    for (const auto& r : rows) {
        out += std::to_string(r.frame) + ',' + std::to_string(r.det_idx);
        out += ',' + format_fixed(r.rel_depth, 4) + '\n';
    }
    return out;
}

std::string write_pose(const std::vector<PoseRow>& rows) {
    std::string out;
    for (const auto& r : rows) {
        out += std::to_string(r.frame) + ',' + std::to_string(r.det_idx);
        for (const auto& kp : r.keypoints) {
            out += ',' + format_fixed(kp.x, 2) + ',' + format_fixed(kp.y, 2) + ',' +
                   format_fixed(kp.conf, 2);
        }
        out += '\n';
    }
    return out;
}

FrameBoxes track_rows_to_frames(const std::vector<TrackRow>& rows) {
    FrameBoxes out;
    for (const auto& r : rows) {
        out[r.frame].push_back(IdBox{r.id, r.bbox});
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path.string());
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

}  // namespace motpipe
