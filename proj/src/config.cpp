#include "motpipe/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <stdexcept>

#include "motpipe/dataio.hpp"

namespace motpipe {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, bool& out) {
    if (value == "true" || value == "1" || value == "on") {
        out = true;
        return true;
    }
    if (value == "false" || value == "0" || value == "off") {
        out = false;
        return true;
    }
    return false;
}

bool parse_int(const std::string& value, int& out) {
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    return ec == std::errc() && ptr == value.data() + value.size();
}

bool parse_u64(const std::string& value, std::uint64_t& out) {
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    return ec == std::errc() && ptr == value.data() + value.size();
}

bool parse_double(const std::string& value, double& out) {
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    return ec == std::errc() && ptr == value.data() + value.size();
}

using Setter = std::function<bool(const std::string&)>;

void apply_entries(const std::map<std::string, Setter>& setters,
                   const std::vector<ConfigEntry>& entries) {
    std::vector<std::string> violations;
    for (const auto& e : entries) {
        const auto it = setters.find(e.key);
        if (it == setters.end()) {
            violations.push_back("line " + std::to_string(e.line) + ": unknown key '" + e.key +
                                 "'");
        } else if (!it->second(e.value)) {
            violations.push_back("line " + std::to_string(e.line) + ": invalid value '" + e.value +
                                 "' for key '" + e.key + "'");
        }
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

Setter double_setter(double& field) {
    return [&field](const std::string& v) { return parse_double(v, field); };
}
Setter int_setter(int& field) {
    return [&field](const std::string& v) { return parse_int(v, field); };
}
Setter bool_setter(bool& field) {
    return [&field](const std::string& v) { return parse_bool(v, field); };
}

}  // namespace

std::vector<ConfigEntry> parse_config_text(const std::string& text) {
    std::vector<ConfigEntry> out;
    int line_no = 0;
    size_t start = 0;
    while (start <= text.size()) {
        const size_t nl = text.find('\n', start);
        const size_t end = nl == std::string::npos ? text.size() : nl;
        ++line_no;
        std::string line = text.substr(start, end - start);
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (!line.empty()) {
            const size_t eq = line.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": expected key=value, got '" + line + "'");
            }
            out.push_back(ConfigEntry{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no});
        }
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return out;
}

void apply_tracker_config(TrackerConfig& cfg, const std::vector<ConfigEntry>& entries) {
    const std::map<std::string, Setter> setters = {
        {"base_threshold", double_setter(cfg.detpre.base_threshold)},
        {"softnms_sigma", double_setter(cfg.detpre.softnms_sigma)},
        {"softnms_min_score", double_setter(cfg.detpre.softnms_min_score)},
        {"adaptive_enabled", bool_setter(cfg.detpre.adaptive_enabled)},
        {"adaptive_floor", double_setter(cfg.detpre.adaptive_floor)},
        {"adaptive_ceiling", double_setter(cfg.detpre.adaptive_ceiling)},
        {"adaptive_ema_alpha", double_setter(cfg.detpre.adaptive_ema_alpha)},
        {"max_iou_distance", double_setter(cfg.assoc.max_iou_distance)},
        {"appearance_threshold", double_setter(cfg.assoc.appearance_threshold)},
        {"depth_weight", double_setter(cfg.assoc.depth_weight)},
        {"depth_gate", double_setter(cfg.assoc.depth_gate)},
        {"pose_visibility_min", double_setter(cfg.assoc.pose_visibility_min)},
        {"keypoint_conf_min", double_setter(cfg.assoc.keypoint_conf_min)},
        {"use_giou", bool_setter(cfg.assoc.use_giou)},
        {"std_weight_position", double_setter(cfg.kalman.std_weight_position)},
        {"std_weight_velocity", double_setter(cfg.kalman.std_weight_velocity)},
        {"gate_position_only", bool_setter(cfg.kalman.gate_position_only)},
        {"n_init", int_setter(cfg.n_init)},
        {"max_age", int_setter(cfg.max_age)},
        {"nn_budget", int_setter(cfg.nn_budget)},
        {"output_smoothing", bool_setter(cfg.output_smoothing)},
        {"depth_ema_alpha", double_setter(cfg.depth_ema_alpha)},
    };
    apply_entries(setters, entries);
}

void apply_synth_config(SynthConfig& cfg, const std::vector<ConfigEntry>& entries) {
    const std::map<std::string, Setter> setters = {
        {"seed", [&cfg](const std::string& v) { return parse_u64(v, cfg.seed); }},
        {"n_peds", int_setter(cfg.n_peds)},
        {"n_frames", int_setter(cfg.n_frames)},
        {"im_width", int_setter(cfg.im_width)},
        {"im_height", int_setter(cfg.im_height)},
        {"vel_std", double_setter(cfg.vel_std)},
        {"det_noise_std", double_setter(cfg.det_noise_std)},
        {"miss_rate", double_setter(cfg.miss_rate)},
        {"clutter_rate", double_setter(cfg.clutter_rate)},
        {"embed_dim", int_setter(cfg.embed_dim)},
        {"embed_noise_std", double_setter(cfg.embed_noise_std)},
        {"depth_lanes", bool_setter(cfg.depth_lanes)},
        {"occlusion",
         [&cfg](const std::string& v) {
             // ped,start,duration
             const size_t c1 = v.find(',');
             const size_t c2 = c1 == std::string::npos ? std::string::npos : v.find(',', c1 + 1);
             if (c2 == std::string::npos) return false;
             Occlusion occ;
             if (!parse_int(trim(v.substr(0, c1)), occ.ped) ||
                 !parse_int(trim(v.substr(c1 + 1, c2 - c1 - 1)), occ.start) ||
                 !parse_int(trim(v.substr(c2 + 1)), occ.duration)) {
                 return false;
             }
             cfg.occlusions.push_back(occ);
             return true;
         }},
    };
    apply_entries(setters, entries);
}

std::vector<std::pair<std::string, std::string>> tracker_config_items(const TrackerConfig& cfg) {
    auto num = [](double v) { return format_fixed(v, 6); };
    auto flag = [](bool v) { return std::string(v ? "true" : "false"); };
    return {
        {"base_threshold", num(cfg.detpre.base_threshold)},
        {"softnms_sigma", num(cfg.detpre.softnms_sigma)},
        {"softnms_min_score", num(cfg.detpre.softnms_min_score)},
        {"adaptive_enabled", flag(cfg.detpre.adaptive_enabled)},
        {"adaptive_floor", num(cfg.detpre.adaptive_floor)},
        {"adaptive_ceiling", num(cfg.detpre.adaptive_ceiling)},
        {"adaptive_ema_alpha", num(cfg.detpre.adaptive_ema_alpha)},
        {"max_iou_distance", num(cfg.assoc.max_iou_distance)},
        {"appearance_threshold", num(cfg.assoc.appearance_threshold)},
        {"depth_weight", num(cfg.assoc.depth_weight)},
        {"depth_gate", num(cfg.assoc.depth_gate)},
        {"pose_visibility_min", num(cfg.assoc.pose_visibility_min)},
        {"keypoint_conf_min", num(cfg.assoc.keypoint_conf_min)},
        {"use_giou", flag(cfg.assoc.use_giou)},
        {"std_weight_position", num(cfg.kalman.std_weight_position)},
        {"std_weight_velocity", num(cfg.kalman.std_weight_velocity)},
        {"gate_position_only", flag(cfg.kalman.gate_position_only)},
        {"n_init", std::to_string(cfg.n_init)},
        {"max_age", std::to_string(cfg.max_age)},
        {"nn_budget", std::to_string(cfg.nn_budget)},
        {"output_smoothing", flag(cfg.output_smoothing)},
        {"depth_ema_alpha", num(cfg.depth_ema_alpha)},
    };
}

}  // namespace motpipe
