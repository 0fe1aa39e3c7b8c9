#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "motpipe/config.hpp"
#include "motpipe/dataio.hpp"
#include "motpipe/metrics.hpp"
#include "motpipe/report.hpp"
#include "motpipe/synth.hpp"
#include "motpipe/tracker.hpp"
#include "motpipe/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;

struct TrackArgs {
    std::string seq;
    std::string out;
    std::string config;
    std::optional<double> depth_weight;
    bool no_smoothing = false;
    std::optional<long long> seed;  // reserved; the tracker is deterministic
};

struct EvalArgs {
    std::vector<std::string> gt;
    std::vector<std::string> hyp;
    std::string out;
    std::string svg;
};

struct SynthArgs {
    std::string config;
    std::string out;
};

std::optional<std::string> read_optional(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    return motpipe::read_file(path);
}

int eval_thread_cap() {
    const char* env = std::getenv("MOTPIPE_THREADS");
    if (env != nullptr) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring invalid MOTPIPE_THREADS value '" << env << "'\n";
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    motpipe::write_file(tmp, content);
    fs::rename(tmp, path);
}

int run_track(const TrackArgs& args) {
    const fs::path seq_dir = args.seq;
    const fs::path seqinfo_path = seq_dir / "seqinfo.ini";
    const fs::path det_path = seq_dir / "det" / "det.txt";

    const auto meta = motpipe::parse_seqinfo(motpipe::read_file(seqinfo_path));
    auto det = motpipe::parse_det(motpipe::read_file(det_path));
    if (det.dropped > 0) {
        std::cerr << "warning: dropped " << det.dropped << " detection rows with degenerate boxes\n";
    }

    const auto embed_text = read_optional(seq_dir / "embed.csv");
    const auto depth_text = read_optional(seq_dir / "depth.csv");
    const auto pose_text = read_optional(seq_dir / "pose.csv");
    const auto stats = motpipe::attach_sidecars(det.by_frame, embed_text, depth_text, pose_text);
    if (stats.unmatched > 0) {
        std::cerr << "warning: discarded " << stats.unmatched
                  << " sidecar rows with no matching detection\n";
    }
    if (stats.clamped > 0) {
        std::cerr << "warning: clamped " << stats.clamped << " depth values into [0,1]\n";
    }

    motpipe::TrackerConfig cfg;
    if (!args.config.empty()) {
        motpipe::apply_tracker_config(cfg,
                                      motpipe::parse_config_text(motpipe::read_file(args.config)));
    }
    if (args.depth_weight.has_value()) {
        cfg.assoc.depth_weight = *args.depth_weight;
    }
    if (args.no_smoothing) {
        cfg.output_smoothing = false;
    }
    cfg.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = motpipe::run_sequence(det.by_frame, meta, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();
    const int frames = det.by_frame.empty() ? 0 : det.by_frame.rbegin()->first;
    const double fps = seconds > 0.0 ? frames / seconds : 0.0;

    motpipe::write_file(args.out, motpipe::write_tracks(rows));

    json manifest;
    manifest["tool"] = "motpipe";
    manifest["version"] = std::string(motpipe::kVersion);
    manifest["command"] = "track";
    manifest["sequence"] = meta.name;
    json config;
    for (const auto& [key, value] : motpipe::tracker_config_items(cfg)) {
        config[key] = value;
    }
    manifest["config"] = config;
    manifest["inputs"] = {{"seq_dir", seq_dir.string()},
                          {"seqinfo", seqinfo_path.string()},
                          {"det", det_path.string()},
                          {"embed", embed_text.has_value()},
                          {"depth", depth_text.has_value()},
                          {"pose", pose_text.has_value()}};
    manifest["outputs"] = {{"tracks", args.out}};
    manifest["frames"] = frames;
    manifest["output_rows"] = rows.size();
    manifest["duration_seconds"] = seconds;
    manifest["throughput_fps"] = fps;
    write_file_atomic(args.out + ".manifest.json", manifest.dump(2) + "\n");

    std::cout << meta.name << ": " << rows.size() << " rows over " << frames << " frames ("
              << motpipe::format_fixed(fps, 1) << " fps)\n";
    return kExitOk;
}

std::string sequence_label(const fs::path& gt_path) {
    fs::path dir = fs::is_directory(gt_path) ? gt_path : gt_path.parent_path();
    if (dir.filename() == "gt") dir = dir.parent_path();
    std::string label = dir.filename().string();
    if (label.empty()) label = gt_path.stem().string();
    return label.empty() ? std::string("sequence") : label;
}

motpipe::FrameBoxes load_gt_side(const fs::path& given) {
    fs::path path = given;
    if (fs::is_directory(path)) {
        if (fs::exists(path / "gt" / "gt.txt")) {
            path = path / "gt" / "gt.txt";
        } else if (fs::exists(path / "gt.txt")) {
            path = path / "gt.txt";
        } else {
            throw std::runtime_error("no gt/gt.txt or gt.txt under: " + path.string());
        }
    }
    const std::string text = motpipe::read_file(path);

    // Accept either a 9-column gt file (with annotation filters) or a
    // 10-column track file used as reference.
    size_t line_end = text.find('\n');
    const std::string first = text.substr(0, line_end == std::string::npos ? text.size() : line_end);
    const long commas = std::count(first.begin(), first.end(), ',');
    if (commas == 9) {
        return motpipe::track_rows_to_frames(motpipe::parse_tracks(text).rows);
    }
    return motpipe::parse_gt(text, motpipe::EvalConfig{});
}

int run_eval(const EvalArgs& args) {
    if (args.gt.size() != args.hyp.size()) {
        std::cerr << "error: " << args.gt.size() << " --gt but " << args.hyp.size()
                  << " --hyp; each sequence needs one of each\n";
        return kExitParse;
    }

    const size_t n = args.gt.size();
    std::vector<motpipe::SequenceEval> evals(n);
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    const int threads = std::min<int>(eval_thread_cap(), static_cast<int>(n));
    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                const auto gt = load_gt_side(args.gt[i]);
                const auto hyp = motpipe::track_rows_to_frames(
                    motpipe::parse_tracks(motpipe::read_file(args.hyp[i])).rows);
                evals[i] = motpipe::evaluate_sequence(sequence_label(args.gt[i]), gt, hyp,
                                                      motpipe::EvalConfig{});
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    const std::string csv = motpipe::write_report_csv(evals);
    if (!args.out.empty()) {
        motpipe::write_file(args.out, csv);
    } else {
        std::cout << csv;
    }
    if (!args.svg.empty()) {
        motpipe::write_file(args.svg, motpipe::render_report_svg(evals));
    }

    for (const auto& e : evals) {
        std::cout << e.sequence << ": mota "
                  << (e.mota.has_value() ? motpipe::format_fixed(*e.mota, 4) : std::string("n/a"))
                  << " idf1 " << motpipe::format_fixed(e.idf1, 4) << " precision "
                  << motpipe::format_fixed(e.precision, 4) << " idsw " << e.counts.idsw << "\n";
    }
    return kExitOk;
}

int run_synth(const SynthArgs& args) {
    motpipe::SynthConfig cfg;
    if (!args.config.empty()) {
        motpipe::apply_synth_config(cfg,
                                    motpipe::parse_config_text(motpipe::read_file(args.config)));
    }
    const auto scene = motpipe::generate(cfg);
    motpipe::write_scene(scene, args.out);
    std::cout << "wrote " << scene.meta.name << " (" << cfg.n_peds << " peds, " << cfg.n_frames
              << " frames) to " << args.out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pedestrian tracking pipeline: track, evaluate, synthesize"};
    app.set_version_flag("--version", std::string(motpipe::kVersion));
    app.require_subcommand(1);

    TrackArgs track_args;
    auto* track = app.add_subcommand("track", "run the tracker over one sequence directory");
    track->add_option("--seq", track_args.seq, "sequence directory (seqinfo.ini, det/det.txt)")
        ->required();
    track->add_option("--out", track_args.out, "output track file")->required();
    track->add_option("--config", track_args.config, "key=value tracker config file");
    track->add_option("--depth-weight", track_args.depth_weight,
                      "weight of the depth cue in association cost");
    track->add_flag("--no-smoothing", track_args.no_smoothing,
                    "emit raw detection boxes instead of filtered boxes");
    track->add_option("--seed", track_args.seed, "reserved; tracking is deterministic");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "evaluate track files against ground truth");
    eval->add_option("--gt", eval_args.gt, "gt file or sequence directory (repeatable)")
        ->required();
    eval->add_option("--hyp", eval_args.hyp, "hypothesis track file (repeatable)")->required();
    eval->add_option("--out", eval_args.out, "report CSV path (stdout when omitted)");
    eval->add_option("--svg", eval_args.svg, "grouped bar chart SVG path");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic sequence directory");
    synth->add_option("--config", synth_args.config, "key=value scene config file");
    synth->add_option("--out", synth_args.out, "output sequence directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (track->parsed()) return run_track(track_args);
        if (eval->parsed()) return run_eval(eval_args);
        if (synth->parsed()) return run_synth(synth_args);
        std::cerr << "error: no subcommand\n";
        return kExitUsage;
    } catch (const motpipe::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
}
