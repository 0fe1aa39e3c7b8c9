#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "motpipe/dataio.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path log = fs::temp_directory_path() / ("motpipe_cli_" + std::to_string(counter++) +
                                                      ".log");
    const std::string cmd = std::string(MOTPIPE_BIN) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (fs::exists(log)) {
        r.output = motpipe::read_file(log);
        fs::remove(log);
    }
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_synth_config(const fs::path& path, const std::string& extra = "") {
    motpipe::write_file(path,
                        "seed=11\nn_peds=4\nn_frames=25\nembed_dim=8\ndepth_lanes=true\n" + extra);
}

}  // namespace

TEST_CASE("synth writes a sequence directory deterministically") {
    const fs::path dir = fresh_dir("motpipe_cli_synth");
    write_synth_config(dir / "scene.cfg");

    const auto a = run_cli("synth --config " + (dir / "scene.cfg").string() + " --out " +
                           (dir / "a").string());
    CHECK(a.exit_code == 0);
    const auto b = run_cli("synth --config " + (dir / "scene.cfg").string() + " --out " +
                           (dir / "b").string());
    CHECK(b.exit_code == 0);

    for (const char* rel : {"seqinfo.ini", "gt/gt.txt", "det/det.txt", "embed.csv", "depth.csv",
                            "pose.csv"}) {
        CAPTURE(rel);
        REQUIRE(fs::exists(dir / "a" / rel));
        CHECK(motpipe::read_file(dir / "a" / rel) == motpipe::read_file(dir / "b" / rel));
    }
    fs::remove_all(dir);
}

TEST_CASE("synth rejects an occlusion naming an unknown pedestrian") {
    const fs::path dir = fresh_dir("motpipe_cli_synth_bad");
    write_synth_config(dir / "scene.cfg", "occlusion=9,5,3\n");
    const auto r = run_cli("synth --config " + (dir / "scene.cfg").string() + " --out " +
                           (dir / "out").string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("unknown ped") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("track produces MOT rows and a faithful manifest") {
    const fs::path dir = fresh_dir("motpipe_cli_track");
    write_synth_config(dir / "scene.cfg");
    REQUIRE(run_cli("synth --config " + (dir / "scene.cfg").string() + " --out " +
                    (dir / "seq").string())
                .exit_code == 0);
    motpipe::write_file(dir / "tracker.cfg", "max_age=10\ndepth_weight=0.5\n");

    const fs::path out = dir / "out" / "tracks.txt";
    const auto r = run_cli("track --seq " + (dir / "seq").string() + " --out " + out.string() +
                           " --config " + (dir / "tracker.cfg").string());
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(out));

    const auto parsed = motpipe::parse_tracks(motpipe::read_file(out));
    CHECK(parsed.dropped == 0);
    REQUIRE(!parsed.rows.empty());
    CHECK(parsed.rows.front().frame >= 1);

    const fs::path manifest_path = fs::path(out.string() + ".manifest.json");
    REQUIRE(fs::exists(manifest_path));
    const auto manifest = nlohmann::json::parse(motpipe::read_file(manifest_path));
    CHECK(manifest.at("tool") == "motpipe");
    CHECK(manifest.at("command") == "track");
    CHECK(manifest.at("config").at("max_age") == "10");
    CHECK(manifest.at("config").at("depth_weight") == "0.500000");
    CHECK(manifest.at("inputs").at("depth") == true);
    CHECK(manifest.at("frames") == 25);
    CHECK(manifest.at("output_rows").get<int>() == static_cast<int>(parsed.rows.size()));
    CHECK(manifest.at("throughput_fps").get<double>() > 0.0);

    // Rerunning with the same inputs reproduces the rows byte-identically.
    const fs::path out2 = dir / "out" / "tracks2.txt";
    REQUIRE(run_cli("track --seq " + (dir / "seq").string() + " --out " + out2.string() +
                    " --config " + (dir / "tracker.cfg").string())
                .exit_code == 0);
    CHECK(motpipe::read_file(out) == motpipe::read_file(out2));
    fs::remove_all(dir);
}

TEST_CASE("usage and data errors map to distinct exit codes") {
    const auto unknown_flag = run_cli("track --bogus x");
    CHECK(unknown_flag.exit_code == 1);

    const fs::path dir = fresh_dir("motpipe_cli_errors");
    const auto missing_seq = run_cli("track --seq " + (dir / "nowhere").string() + " --out " +
                                     (dir / "o.txt").string());
    CHECK(missing_seq.exit_code == 2);
    CHECK(missing_seq.output.find("seqinfo.ini") != std::string::npos);

    write_synth_config(dir / "scene.cfg");
    REQUIRE(run_cli("synth --config " + (dir / "scene.cfg").string() + " --out " +
                    (dir / "seq").string())
                .exit_code == 0);
    motpipe::write_file(dir / "bad.cfg", "max_age=10\nnot_a_key=3\n");
    const auto bad_key = run_cli("track --seq " + (dir / "seq").string() + " --out " +
                                 (dir / "o.txt").string() + " --config " +
                                 (dir / "bad.cfg").string());
    CHECK(bad_key.exit_code == 1);
    CHECK(bad_key.output.find("not_a_key") != std::string::npos);

    const auto mismatch = run_cli("eval --gt a.txt --gt b.txt --hyp c.txt");
    CHECK(mismatch.exit_code == 2);
    fs::remove_all(dir);
}

TEST_CASE("eval scores a run and renders the report files") {
    const fs::path dir = fresh_dir("motpipe_cli_eval");
    write_synth_config(dir / "scene.cfg");
    REQUIRE(run_cli("synth --config " + (dir / "scene.cfg").string() + " --out " +
                    (dir / "seq").string())
                .exit_code == 0);
    const fs::path tracks = dir / "tracks.txt";
    REQUIRE(run_cli("track --seq " + (dir / "seq").string() + " --out " + tracks.string())
                .exit_code == 0);

    // A hypothesis scored against itself is perfect on every column.
    const fs::path self_csv = dir / "self.csv";
    const auto self = run_cli("eval --gt " + tracks.string() + " --hyp " + tracks.string() +
                              " --out " + self_csv.string());
    CHECK(self.exit_code == 0);
    const auto self_text = motpipe::read_file(self_csv);
    CHECK(self_text.find("sequence,gt,tp,fp,fn,idsw,mota,idf1,idp,idr,precision,recall\n") == 0);
    CHECK(self_text.find(",1.000000,1.000000,1.000000,1.000000,1.000000,1.000000") !=
          std::string::npos);

    // Against the synthetic ground truth, with an SVG chart.
    const fs::path csv = dir / "report.csv";
    const fs::path svg = dir / "report.svg";
    const auto scored = run_cli("eval --gt " + (dir / "seq").string() + " --hyp " +
                                tracks.string() + " --out " + csv.string() + " --svg " +
                                svg.string());
    CHECK(scored.exit_code == 0);
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(svg));
    const auto svg_text = motpipe::read_file(svg);
    CHECK(svg_text.find("<svg") != std::string::npos);
    CHECK(svg_text.find("IDF1") != std::string::npos);
    CHECK(svg_text.find("MOTA") != std::string::npos);
    CHECK(svg_text.find("Precision") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("version and help are usage successes") {
    CHECK(run_cli("--version").exit_code == 0);
    const auto help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("track") != std::string::npos);
    const auto naked = run_cli("");
    CHECK(naked.exit_code == 1);  // a subcommand is required
}
