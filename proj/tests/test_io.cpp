#include "fairmap/generators.hpp"
#include "fairmap/io.hpp"
#include "fairmap/pipeline.hpp"
#include "fairmap/render.hpp"
#include "fairmap/rng.hpp"
#include "fairmap/spectral.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <regex>
#include <sstream>
#include <sys/wait.h>

using namespace fairmap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("fairmap_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::size_t count_markers(const std::string& svg) {
    std::size_t count = 0;
    for (std::size_t pos = 0; (pos = svg.find("class=\"marker ", pos)) != std::string::npos; ++pos) ++count;
    return count;
}

// Minimal well-formedness check: balanced tags and a single root.
bool balanced_xml(const std::string& s) {
    std::vector<std::string> stack;
    std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)[^>]*?(/?)>)");
    int roots = 0;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), tag); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        if (m[1] == "/") {
            if (stack.empty() || stack.back() != m[2]) return false;
            stack.pop_back();
        } else if (m[3] != "/") {
            if (stack.empty()) ++roots;
            stack.push_back(m[2]);
        } else if (stack.empty()) {
            ++roots;
        }
    }
    return stack.empty() && roots == 1;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FAIRMAP_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_SUITE("cli_io") {

TEST_CASE("17 significant digits round-trip") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform01() * std::pow(10.0, static_cast<int>(rng.below(20)) - 10);
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("instance text parsing") {
    std::istringstream in("# comment\n2 2\n0.5 0.5\n0.5,0.5\n");
    auto m = parse_instance_text(in, "t");
    CHECK(validate(m) == gen_characteristic(CharacteristicKind::IND, 2, 2));
    std::istringstream bad("2 2\n0.5 0.5\n0.5 x\n");
    try {
        parse_instance_text(bad, "bad.txt");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(exit_code(e.kind()) == 4);
        CHECK(std::string(e.what()).find("bad.txt:3") != std::string::npos);
    }
    std::istringstream short_rows("3 2\n1 0\n0 1\n");
    CHECK_THROWS_AS(parse_instance_text(short_rows, "s"), ParseError);
    std::istringstream header("two 2\n");
    CHECK_THROWS_AS(parse_instance_text(header, "h"), ParseError);
    auto u = gen_iid(3, 4, IidDist::Exponential, 3);
    std::istringstream back(instance_text(u));
    CHECK(validate(parse_instance_text(back, "b")) == u);
}

TEST_CASE("ingest single tables") {
    auto dir = scratch("ingest");
    write_text_file((dir / "ind.txt").string(), "2 2\n0.5 0.5\n0.5 0.5\n");
    auto recs = ingest((dir / "ind.txt").string());
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].label == "ind");
    CHECK(describe(recs[0].source) == "ingested(ind)");
    CHECK(recs[0].matrix == gen_characteristic(CharacteristicKind::IND, 2, 2));

    write_text_file((dir / "points.txt").string(), "2 3\n50 30 20\n10 10 80\n");
    CHECK_THROWS_AS(ingest((dir / "points.txt").string()), RowSumViolation);
    IngestOptions norm;
    norm.normalize = true;
    auto p = ingest((dir / "points.txt").string(), norm);
    CHECK(p[0].matrix(0, 0) == 0.5);
    CHECK(p[0].matrix(1, 2) == 0.8);
    CHECK_THROWS_AS(ingest((dir / "missing.txt").string()), IoError);
}

TEST_CASE("subsampling a wide table") {
    auto dir = scratch("sub");
    Rng rng(5);
    std::string table = "40 10\n";
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 10; ++j) table += std::to_string(rng.below(4) == 0 ? 0 : 1 + rng.below(30)) + " ";
        table += "\n";
    }
    const auto path = (dir / "island.txt").string();
    write_text_file(path, table);
    IngestOptions opt;
    opt.subsample = Subsample{3, 6, 0, 9};
    CHECK(ingest(path, opt).empty());
    opt.subsample = Subsample{3, 6, 25, 9};
    auto a = ingest(path, opt), b = ingest(path, opt);
    REQUIRE(a.size() == 25);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].matrix == b[k].matrix);
        CHECK(a[k].matrix.n() == 3);
        CHECK(a[k].matrix.m() == 6);
        CHECK(a[k].label.rfind("island_sub_", 0) == 0);
    }
    opt.subsample = Subsample{12, 11, 1, 9};
    CHECK_THROWS_AS(ingest(path, opt), ValidationError);
}

TEST_CASE("dataset files round-trip bit-exactly") {
    auto dir = scratch("dataset");
    auto data = gen_preset("5x5", 12);
    auto extra = gen_dataset({SyntheticSpec{ResamplingSource{0.3, 0.7}, 5, 5, 3, 4, "r"}});
    data.insert(data.end(), extra.begin(), extra.end());
    const auto path = (dir / "d.json").string();
    write_dataset(path, data);
    auto back = read_dataset(path);
    REQUIRE(back.size() == data.size());
    for (std::size_t k = 0; k < data.size(); ++k) {
        CHECK(back[k].label == data[k].label);
        CHECK(back[k].matrix == data[k].matrix);
        CHECK(back[k].source == data[k].source);
        CHECK(back[k].seed == data[k].seed);
    }
    auto again = ingest(path);
    CHECK(again.size() == data.size());
    CHECK(dataset_text(back) == read_text_file(path));
    auto doc = nlohmann::json::parse(read_text_file(path));
    CHECK(doc["instances"][0].contains("params"));

    CHECK_THROWS_AS(parse_dataset("{\"format\": \"fairmap-dataset\",\n \"instances\": [ ,]}", "x"), ParseError);
    try {
        parse_dataset("{\n\"format\": \"fairmap-dataset\",\n\"instances\": [\n}", "x.json");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 4);
    }
    data.push_back(data.front());
    CHECK_THROWS_AS(dataset_text(data), ValidationError);
}

TEST_CASE("CSV artifacts round-trip") {
    auto data = gen_preset("3x6", 3);
    data.erase(data.begin() + 20, data.end());
    auto d = pairwise_distances(data, Metric::Demand);
    auto dback = parse_distance_csv(distance_csv(d), "d");
    CHECK(dback.labels == d.labels);
    CHECK(dback.d == d.d);
    CHECK(distance_csv(d).substr(0, distance_csv(d).find('\n')).find(data[0].label) == 0);

    auto e = mds_embed(d);
    auto ecsv = embedding_csv(e);
    CHECK(ecsv.rfind("# stress=", 0) == 0);
    auto eback = parse_embedding_csv(ecsv, "e");
    for (std::size_t k = 0; k < e.labels.size(); ++k) {
        CHECK(eback[k].label == e.labels[k]);
        CHECK(eback[k].x == e.points[k][0]);
        CHECK(eback[k].y == e.points[k][1]);
    }

    auto pts = explicit_coords(data);
    auto xback = parse_explicit_csv(explicit_csv(pts), "x");
    CHECK(xback[3].y == pts[3].point.sigma1);
    CHECK(xback[3].x == pts[3].point.sigma2);

    auto rows = feature_table(data);
    auto table = parse_features_csv(features_csv(rows), "f");
    CHECK(table.names == feature_names());
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (const auto& name : feature_names()) CHECK(table.get(rows[k].label, name) == rows[k].value(name));
    CHECK_THROWS_AS(table.get(rows[0].label, "nope"), ValidationError);

    auto wide = gen_preset("10x20", 3);
    wide.erase(wide.begin() + 2, wide.end());
    auto wrows = feature_table(wide);
    auto wt = parse_features_csv(features_csv(wrows), "w");
    CHECK(!wt.get(wide[0].label, "minimax_envy"));
    CHECK(wt.get(wide[0].label, "max_demand"));
    auto reasons = feature_reasons_csv(wrows);
    CHECK(reasons.find(wide[0].label + ",minimax_envy,CapExceeded") != std::string::npos);
}

TEST_CASE("rendering") {
    std::vector<PlanarPoint> three{{"a", 0, 0}, {"b", 1, 0}, {"c", 0, 1}};
    auto svg = render_svg(plot_points(three, std::nullopt, nullptr, ""), RenderSpec{});
    CHECK(count_markers(svg) == 3);
    CHECK(svg.find("<circle class=\"marker circle\"") != std::string::npos);
    CHECK(balanced_xml(svg));
    CHECK_THROWS_AS(plot_points(three, std::nullopt, nullptr, "happiness"), ValidationError);
    std::vector<PlanarPoint> nan_point{{"a", NAN, 0}};
    CHECK_THROWS_AS(plot_points(nan_point, std::nullopt, nullptr, ""), ValidationError);

    auto data = gen_preset("5x5", 1);
    auto pts = explicit_coords(data);
    std::vector<PlanarPoint> coords;
    for (const auto& p : pts) coords.push_back({p.label, p.point.sigma2, p.point.sigma1});
    auto table = to_table(feature_table(data));
    RenderSpec spec;
    spec.kind = MapKind::Explicit;
    spec.n = 5;
    spec.m = 5;
    spec.color_feature = "ef_exists";
    auto points = plot_points(coords, table, &data, "ef_exists");
    auto map = render_svg(points, spec);
    CHECK(count_markers(map) == data.size());
    CHECK(balanced_xml(map));
    CHECK(map.find("σ₂") != std::string::npos);
    CHECK(map.find("boundary-north") != std::string::npos);

    // CON sits at (sigma2, sigma1) = (0, sqrt 5).
    for (const auto& p : points)
        if (p.label == "CON") {
            CHECK(p.x <= 1e-9);
            CHECK(std::abs(p.y - std::sqrt(5.0)) <= 1e-9);
            CHECK(p.shape == MarkerShape::Star);
        }
    // Cross markers exactly on non-characteristic instances with minimax envy <= 1e-9.
    for (std::size_t k = 0; k < points.size(); ++k) {
        const bool characteristic = source_category(data[k].source) == "characteristic";
        const bool ef = *table.get(data[k].label, "minimax_envy") <= 1e-9;
        CHECK((points[k].shape == MarkerShape::Cross) == (!characteristic && ef));
    }
    CHECK(hex(viridis(0)) == "#440154");
    CHECK(hex(viridis(1)) == "#fde725");
}

TEST_CASE("pipeline writes every artifact and is reproducible") {
    auto dir = scratch("pipe");
    PipelineConfig cfg;
    cfg.preset = "3x6";
    cfg.seed = 5;
    cfg.out_dir = (dir / "a").string();
    auto first = run_pipeline(cfg);
    cfg.out_dir = (dir / "b").string();
    cfg.threads = 3;
    auto second = run_pipeline(cfg);
    REQUIRE(first.files.size() == second.files.size());
    for (const char* name : {"dataset.json", "distances_demand.csv", "embedding.csv", "explicit.csv", "features.csv",
                             "features_reasons.csv", "embedding_source.svg", "explicit_max_demand.svg"}) {
        CHECK(fs::exists(dir / "a" / name));
        CHECK(read_text_file((dir / "a" / name).string()) == read_text_file((dir / "b" / name).string()));
    }
    // Labels agree across artifacts.
    auto data = read_dataset((dir / "a" / "dataset.json").string());
    auto dist = parse_distance_csv(read_text_file((dir / "a" / "distances_demand.csv").string()), "d");
    auto emb = parse_embedding_csv(read_text_file((dir / "a" / "embedding.csv").string()), "e");
    auto feat = parse_features_csv(read_text_file((dir / "a" / "features.csv").string()), "f");
    for (std::size_t k = 0; k < data.size(); ++k) {
        CHECK(dist.labels[k] == data[k].label);
        CHECK(emb[k].label == data[k].label);
        CHECK(feat.labels[k] == data[k].label);
    }
    const auto svg = read_text_file((dir / "a" / "explicit_source.svg").string());
    CHECK(count_markers(svg) == data.size());
}

TEST_CASE("pipeline failures are stage-tagged and leave no partial output") {
    auto dir = scratch("pipefail");
    PipelineConfig cfg;
    cfg.preset = "10x20";
    cfg.metric = Metric::Valuation;
    cfg.out_dir = dir.string();
    try {
        run_pipeline(cfg);
        FAIL("expected ExactSearchCapExceeded");
    } catch (const StageError& e) {
        CHECK(e.stage == "distance");
        CHECK(e.code() == "ExactSearchCapExceeded");
        CHECK(e.kind() == ErrorKind::CapExceeded);
        CHECK(std::string(e.what()).rfind("distance: ", 0) == 0);
    }
    CHECK(fs::is_empty(dir));
    cfg.metric = Metric::Demand;
    cfg.colors = {"nonsense"};
    cfg.preset = "3x6";
    CHECK_THROWS_AS(run_pipeline(cfg), StageError);
    CHECK(fs::is_empty(dir));
}

TEST_CASE("command line") {
    auto dir = scratch("cli");
    const auto out = dir.string();
    CHECK(run_cli("--seed 3 --out-dir " + out + " generate --preset 3x6") == 0);
    CHECK(fs::exists(dir / "dataset.json"));
    CHECK(run_cli("--out-dir " + out + " distance --dataset " + out + "/dataset.json --metric demand") == 0);
    CHECK(run_cli("--out-dir " + out + " embed --distances " + out + "/distances_demand.csv --restarts 2") == 0);
    CHECK(run_cli("--out-dir " + out + " explicit --dataset " + out + "/dataset.json") == 0);
    CHECK(run_cli("--out-dir " + out + " --threads 2 features --dataset " + out + "/dataset.json") == 0);
    CHECK(fs::exists(dir / "features_reasons.csv"));
    CHECK(run_cli("--out-dir " + out + " render --coords " + out + "/explicit.csv --features " + out +
                  "/features.csv --dataset " + out + "/dataset.json --color max_nash") == 0);
    CHECK(count_markers(read_text_file((dir / "render.svg").string())) == 165);
    CHECK(run_cli("--out-dir " + out + " render --coords " + out + "/embedding.csv --color unknown_thing") == 2);

    write_text_file((dir / "bad.txt").string(), "2 2\n0.5 0.7\n0.5 0.5\n");
    CHECK(run_cli("--out-dir " + out + " ingest " + out + "/bad.txt") == 2);
    write_text_file((dir / "garbled.txt").string(), "2 2\n0.5 zz\n0.5 0.5\n");
    CHECK(run_cli("--out-dir " + out + " ingest " + out + "/garbled.txt") == 4);
    write_text_file((dir / "pts.txt").string(), "2 3\n50 30 20\n10 10 80\n");
    CHECK(run_cli("--out-dir " + out + " ingest --normalize " + out + "/pts.txt --out " + out + "/pts.json") == 0);
    CHECK(run_cli("--out-dir " + out + "/wide generate --preset 10x20") == 0);
    CHECK(run_cli("--out-dir " + out + "/wide distance --dataset " + out + "/wide/dataset.json --metric valuation") == 3);
    CHECK(run_cli("--out-dir " + out + "/p pipeline --preset 10x20 --metric valuation") == 3);
    CHECK(!fs::exists(dir / "p" / "dataset.json"));
    CHECK(run_cli("generate --model nope") == 2);
    CHECK(run_cli("frobnicate") == 2);
}

} // TEST_SUITE
