#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "grigid/affine.hpp"
#include "grigid/cli.hpp"
#include "grigid/ifs_io.hpp"
#include "grigid/report.hpp"
#include "grigid/svg.hpp"

using namespace grigid;

namespace {

int run(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli::run_command(args, out, err);
    if (out_text) *out_text = out.str();
    return code;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::string("/tmp/grigid_test_") + name;
        std::ofstream f(path);
        f << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("parse_ifs reads the converse pair document") {
    const std::string text = R"({
      "name": "converse",
      "maps": [
        {"ratio": 0.5, "angle": 0, "translation": [0, 0]},
        {"ratio": 0.5, "angle": "0", "translation": [0.5, 0.5]}
      ]
    })";
    const IfsDocument doc = parse_ifs(text);
    CHECK(doc.name == "converse");
    REQUIRE(doc.ifs.size() == 2);
    CHECK(doc.ifs.map(1).ratio == 0.5);
    CHECK(doc.ifs.map(2).translation == Vec2{0.5, 0.5});
    CHECK(doc.ifs.map(1).angle == 0.0);
}

TEST_CASE("parse_ifs accepts the pi literal exactly") {
    const std::string text =
        R"({"maps": [{"ratio": 0.4, "angle": "pi", "translation": [1, -1]}]})";
    const IfsDocument doc = parse_ifs(text);
    CHECK(doc.ifs.map(1).angle == kPi);
}

TEST_CASE("parse_ifs rejects bad documents with informative errors") {
    CHECK_THROWS_WITH(
        parse_ifs(R"({"maps": [{"ratio": 1.2, "angle": 0, "translation": [0,0]}]})"),
        Catch::Matchers::ContainsSubstring("map 1") &&
            Catch::Matchers::ContainsSubstring("(0,1)"));
    CHECK_THROWS_WITH(
        parse_ifs(R"({"maps": [{"ratio": 0.5, "angle": 0, "translation": [0,0], "color": 3}]})"),
        Catch::Matchers::ContainsSubstring("unknown key"));
    CHECK_THROWS_WITH(parse_ifs("{\"maps\": [\n  {\"ratio\": }\n]}"),
                      Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(parse_ifs(R"({"maps": []})"),
                      Catch::Matchers::ContainsSubstring("nonempty"));
    CHECK_THROWS_WITH(
        parse_ifs(R"({"maps": [{"ratio": 0.5, "angle": "tau", "translation": [0,0]}]})"),
        Catch::Matchers::ContainsSubstring("pi"));
    CHECK_THROWS_WITH(parse_ifs(R"({"extra": 1, "maps": [{"ratio": 0.5, "angle": 0, "translation": [0,0]}]})"),
                      Catch::Matchers::ContainsSubstring("unknown key"));
}

TEST_CASE("ifs serialization round trip is bit exact") {
    const Ifs ifs({Similitude(1.0 / 3.0, kPi, {0.1, -2.0 / 7.0}),
                   Similitude(0.123456789012345678, 1.0, {1e-9, 3.25})});
    const std::string text = serialize_ifs(ifs, "roundtrip");
    const IfsDocument doc = parse_ifs(text);
    REQUIRE(doc.ifs.size() == ifs.size());
    for (int i = 1; i <= ifs.size(); ++i) {
        CHECK(doc.ifs.map(i).ratio == ifs.map(i).ratio);
        CHECK(doc.ifs.map(i).angle == ifs.map(i).angle);
        CHECK(doc.ifs.map(i).translation.x == ifs.map(i).translation.x);
        CHECK(doc.ifs.map(i).translation.y == ifs.map(i).translation.y);
    }
    CHECK(doc.name == "roundtrip");
}

TEST_CASE("svg polyline carries one point per node") {
    const SampledGraph g = sample(TakagiSpec{30}, 4096);
    SvgFigure fig;
    fig.add_graph(g);
    const std::string svg = fig.render();
    CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"") !=
          std::string::npos);
    // 4097 coordinate pairs -> 4097 commas inside the points attribute
    const auto from = svg.find("points=\"");
    REQUIRE(from != std::string::npos);
    const auto to = svg.find('"', from + 8);
    const std::string pts = svg.substr(from + 8, to - from - 8);
    CHECK(count_occurrences(pts, ",") == 4097);
    // deterministic output
    SvgFigure fig2;
    fig2.add_graph(g);
    CHECK(fig2.render() == svg);
}

TEST_CASE("svg cantor overlay counts bars and gap markers") {
    const Ifs ifs = converse_ifs(1.0, 0.0);
    const SampledGraph g = sample(AffineSpec{1.0, 0.0}, 1024);
    CantorStage stage = cantor_stage_zero(Interval(0.0, 1.0));
    std::vector<GapRecord> gaps;
    for (int s = 0; s < 2; ++s) {
        stage = cantor_refine(ifs, g, stage);
        gaps.insert(gaps.end(), stage.removed.begin(), stage.removed.end());
    }
    SvgFigure fig;
    fig.add_graph(g);
    fig.add_cantor_stage(stage, gaps);
    const std::string svg = fig.render();
    CHECK(count_occurrences(svg, "class=\"cantor-interval\"") == 4);
    CHECK(count_occurrences(svg, "class=\"cantor-gap\"") == 3);
}

TEST_CASE("svg graph-only figure with empty overlays") {
    const SampledGraph g = sample(AffineSpec{1.0, 2.0}, 16);
    SvgFigure fig;
    fig.add_graph(g);
    fig.add_rectangles({});
    const std::string svg = fig.render();
    CHECK(count_occurrences(svg, "class=\"graph-polyline\"") == 1);
    CHECK(count_occurrences(svg, "class=\"frame-rect\"") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("cli render writes an svg file") {
    const std::string path = "/tmp/grigid_test_fig.svg";
    std::remove(path.c_str());
    const int code = run({"render", "--function", "takagi", "--n", "256", "--out", path});
    CHECK(code == 0);
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str().find("<svg") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("cli render overlays and data export") {
    TempFile ifs_file("render.ifs", serialize_ifs(converse_ifs(1.0, 0.0)));
    std::string svg;

    // framing rectangles at depth 2: 4 frames
    CHECK(run({"render", "--function", "affine", "--a", "1", "--b", "0", "--n", "128",
               "--ifs", ifs_file.path, "--frames", "2"},
              &svg) == 0);
    CHECK(count_occurrences(svg, "class=\"frame-rect\"") == 4);

    // interval family bars for delta = 0.25: depth 2, 4 bars
    CHECK(run({"render", "--function", "affine", "--a", "1", "--b", "0", "--n", "128",
               "--ifs", ifs_file.path, "--cover-delta", "0.25"},
              &svg) == 0);
    CHECK(count_occurrences(svg, "class=\"interval-bar\"") == 4);

    // cantor stage 2 overlay
    CHECK(run({"render", "--function", "affine", "--a", "1", "--b", "0", "--n", "128",
               "--ifs", ifs_file.path, "--cantor-stage", "2"},
              &svg) == 0);
    CHECK(count_occurrences(svg, "class=\"cantor-interval\"") == 4);
    CHECK(count_occurrences(svg, "class=\"cantor-gap\"") == 3);

    // direction-set figure
    CHECK(run({"render", "--function", "takagi", "--n", "256", "--directions"}, &svg) == 0);
    CHECK(count_occurrences(svg, "class=\"direction-circle\"") == 1);
    CHECK(count_occurrences(svg, "class=\"direction-tick\"") > 200);

    // attractor rendering with CSV export
    const std::string csv_path = "/tmp/grigid_test_attractor.csv";
    std::remove(csv_path.c_str());
    CHECK(run({"render", "--ifs", ifs_file.path, "--attractor-depth", "6",
               "--attractor-points", "4096", "--csv-out", csv_path},
              &svg) == 0);
    CHECK(count_occurrences(svg, "class=\"point\"") > 32);
    std::ifstream csv(csv_path);
    REQUIRE(csv.good());
    const PointSet back = read_csv(csv);
    CHECK(back.size() > 32);
    std::remove(csv_path.c_str());

    // graph CSV with metadata sidecar
    const std::string gpath = "/tmp/grigid_test_graph.csv";
    std::remove(gpath.c_str());
    std::remove((gpath + ".meta").c_str());
    CHECK(run({"render", "--function", "takagi", "--n", "64", "--csv-out", gpath}, &svg) == 0);
    std::ifstream meta(gpath + ".meta");
    REQUIRE(meta.good());
    std::ostringstream mbuf;
    mbuf << meta.rdbuf();
    CHECK(mbuf.str().find("name=takagi") != std::string::npos);
    CHECK(mbuf.str().find("eval_error=") != std::string::npos);
    std::remove(gpath.c_str());
    std::remove((gpath + ".meta").c_str());
}

TEST_CASE("cli custom function from csv samples") {
    TempFile samples("samples.csv", "x,y\n0,0\n0.5,1\n1,0\n");
    std::string svg;
    CHECK(run({"render", "--function", "custom", "--samples", samples.path, "--n", "32"},
              &svg) == 0);
    CHECK(svg.find("graph-polyline") != std::string::npos);
}

TEST_CASE("cli verify passes on the converse pair and fails on a wrong ifs") {
    TempFile good("converse.ifs", serialize_ifs(converse_ifs(1.0, 0.0)));
    std::string text;
    const int code =
        run({"verify", "--ifs", good.path, "--function", "affine", "--a", "1", "--b", "0",
             "--n", "2048"},
            &text);
    CHECK(code == 0);
    CHECK(text.find("VERDICT self-similarity PASS") != std::string::npos);

    TempFile wrong("wrong.ifs", serialize_ifs(converse_ifs(0.0, 0.0)));
    const int bad =
        run({"verify", "--ifs", wrong.path, "--function", "takagi", "--n", "512"}, &text);
    CHECK(bad == 1);
    CHECK(text.find("VERDICT self-similarity FAIL") != std::string::npos);
}

TEST_CASE("cli exit code 2 on usage and parse errors") {
    CHECK(run({"no-such-command"}) == 2);
    CHECK(run({"verify", "--ifs", "/tmp/grigid_missing.ifs", "--function", "affine"}) == 2);
    TempFile bad("bad.ifs", "{\"maps\": [{\"ratio\": 2.0, \"angle\": 0, \"translation\": [0,0]}]}");
    CHECK(run({"verify", "--ifs", bad.path, "--function", "affine"}) == 2);
    CHECK(run({"verify", "--unknown-flag", "x"}) == 2);
}

TEST_CASE("cli reports are reproducible") {
    TempFile ifs_file("repro.ifs", serialize_ifs(converse_ifs(3.0, 0.0)));
    const std::vector<std::string> args{"certify-lipschitz", "--ifs", ifs_file.path,
                                        "--function", "affine", "--a", "3", "--b", "0",
                                        "--n", "1024", "--deltas", "0.25,0.125"};
    std::string first, second;
    CHECK(run(args, &first) == 0);
    CHECK(run(args, &second) == 0);
    CHECK(first == second);
    CHECK(first.find("VERDICT lipschitz PASS") != std::string::npos);
    CHECK(first.find("digest=fnv1a:") != std::string::npos);
}

TEST_CASE("cli certify-affine prints the stage blocks") {
    TempFile ifs_file("aff.ifs", serialize_ifs(converse_ifs(1.0, 0.0)));
    std::string text;
    const int code = run({"certify-affine", "--ifs", ifs_file.path, "--function", "affine",
                          "--a", "1", "--b", "0", "--n", "1024", "--stages", "4"},
                         &text);
    CHECK(code == 0);
    CHECK(text.find("[stage 4]") != std::string::npos);
    CHECK(text.find("VERDICT affine-consistent PASS") != std::string::npos);
}

TEST_CASE("cli threads flag is accepted before the subcommand") {
    TempFile ifs_file("threads.ifs", serialize_ifs(converse_ifs(1.0, 0.0)));
    std::string text;
    const int code = run({"--threads", "2", "verify", "--ifs", ifs_file.path, "--function",
                          "affine", "--a", "1", "--b", "0", "--n", "512"},
                         &text);
    CHECK(code == 0);
    CHECK(text.find("VERDICT self-similarity PASS") != std::string::npos);
    set_thread_cap(1);
}

TEST_CASE("cli env seed default") {
    ::setenv("GRIGID_SEED", "12345", 1);
    std::string text;
    const int code = run({"fit", "--function", "affine", "--a", "1", "--b", "0", "--n",
                          "64", "--restarts", "2", "--budget", "800"},
                         &text);
    ::unsetenv("GRIGID_SEED");
    CHECK(code == 0);
    CHECK(text.find("seed = 12345") != std::string::npos);
    CHECK(text.find("VERDICT fit INFO") != std::string::npos);
}

TEST_CASE("cli classify-rotation reports map classes") {
    const Ifs mixed({Similitude(0.5, 0.0, {0.0, 0.0}), Similitude(0.5, kPi, {1.0, 1.0})});
    TempFile ifs_file("mixed.ifs", serialize_ifs(mixed));
    std::string text;
    const int code = run({"classify-rotation", "--ifs", ifs_file.path}, &text);
    CHECK(code == 0);
    CHECK(text.find("map 1 class = identity") != std::string::npos);
    CHECK(text.find("map 2 class = point-reflection") != std::string::npos);
    CHECK(text.find("VERDICT rotation-classification INFO") != std::string::npos);
}

TEST_CASE("cli fit with free rotations reports the mode") {
    std::string text;
    const int code = run({"fit", "--function", "affine", "--a", "1", "--b", "0", "--n",
                          "64", "--restarts", "2", "--budget", "800", "--seed", "3",
                          "--free-rotations"},
                         &text);
    CHECK(code == 0);
    CHECK(text.find("rotation_restriction = free") != std::string::npos);
    CHECK(text.find("translation_box = [") != std::string::npos);
}

TEST_CASE("cli classify-rotation screens candidates against a graph") {
    const Ifs bad({Similitude(0.5, 0.0, {0.0, 0.0}),
                   Similitude(0.5, kPi / 2.0, {0.5, 0.25})});
    TempFile ifs_file("screen.ifs", serialize_ifs(bad));
    std::string text;
    const int code = run({"classify-rotation", "--ifs", ifs_file.path, "--function",
                          "takagi", "--n", "4096"},
                         &text);
    CHECK(code == 1);  // a rejected candidate is a FAIL verdict
    CHECK(text.find("contains_arc = true") != std::string::npos);
    CHECK(text.find("verdict = rejected") != std::string::npos);
    CHECK(text.find("VERDICT rotation-screening FAIL") != std::string::npos);
}

TEST_CASE("report verdict lines are machine parseable") {
    Report rep;
    rep.begin_block("demo");
    rep.kv("value", 0.125, 1e-9);
    rep.verdict("first", VerdictStatus::Pass);
    rep.verdict("second", VerdictStatus::Info);
    const std::string text = rep.str();
    std::istringstream in(text);
    std::string line;
    std::size_t verdicts = 0;
    while (std::getline(in, line)) {
        if (line.rfind("VERDICT ", 0) == 0) {
            ++verdicts;
            std::istringstream ls(line);
            std::string word, name, status;
            ls >> word >> name >> status;
            CHECK((status == "PASS" || status == "FAIL" || status == "INFO"));
        }
    }
    CHECK(verdicts == 2);
    CHECK_FALSE(rep.any_fail());
    CHECK(text.find("(tol = ") != std::string::npos);
}
