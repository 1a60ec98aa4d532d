// fairmap: generate allocation instances, compute distances, maps, features and plots.

#include "fairmap/distance.hpp"
#include "fairmap/embedding.hpp"
#include "fairmap/features.hpp"
#include "fairmap/generators.hpp"
#include "fairmap/io.hpp"
#include "fairmap/pipeline.hpp"
#include "fairmap/render.hpp"
#include "fairmap/spectral.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace fairmap;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out_dir = ".";
};

std::string in_out_dir(const Globals& g, const std::string& given, const std::string& fallback) {
    if (!given.empty()) return given;
    fs::create_directories(g.out_dir);
    return (fs::path(g.out_dir) / fallback).string();
}

std::string reasons_path(const std::string& features_path) {
    fs::path p(features_path);
    return (p.parent_path() / (p.stem().string() + "_reasons.csv")).string();
}

Source model_source(const std::string& model, const std::string& dist, int d, double p, double phi,
                    const std::string& kind) {
    if (model == "iid") {
        auto parsed = parse_iid_dist(dist);
        if (!parsed) throw ValidationError("BadParameter", "unknown distribution " + dist);
        return IidSource{*parsed};
    }
    if (model == "attributes") return AttributesSource{d};
    if (model == "resampling") return ResamplingSource{p, phi};
    if (model == "characteristic") {
        auto parsed = parse_characteristic(kind);
        if (!parsed) throw ValidationError("BadParameter", "unknown characteristic kind " + kind);
        return CharacteristicSource{*parsed};
    }
    throw ValidationError("BadParameter", "unknown model " + model);
}

void report(const std::string& what, const std::string& path) { std::cout << what << ": " << path << "\n"; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairmap: maps of fair division instances"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Directory for default output paths")->capture_default_str();

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset");
    std::string preset, model = "iid", dist = "uniform", kind = "IND", gen_out;
    std::size_t n = 5, m = 5, count = 1;
    int d = 2;
    double p = 0.5, phi = 0.5;
    auto* preset_opt = gen->add_option("--preset", preset, "Built-in composition (3x6, 5x5, 10x20)");
    gen->add_option("--model", model, "iid | attributes | resampling | characteristic")->excludes(preset_opt);
    gen->add_option("--n", n, "Agents")->capture_default_str();
    gen->add_option("--m", m, "Goods")->capture_default_str();
    gen->add_option("--count", count, "Instances")->capture_default_str();
    gen->add_option("--dist", dist, "iid distribution: uniform | exponential")->capture_default_str();
    gen->add_option("--d", d, "Attribute dimension")->capture_default_str();
    gen->add_option("--p", p, "Resampling central-set fraction")->capture_default_str();
    gen->add_option("--phi", phi, "Resampling noise")->capture_default_str();
    gen->add_option("--kind", kind, "Characteristic kind")->capture_default_str();
    gen->add_option("--out", gen_out, "Dataset file (default <out-dir>/dataset.json)");

    // ingest
    auto* ing = app.add_subcommand("ingest", "Read instance tables or datasets into a dataset file");
    std::vector<std::string> ing_inputs;
    bool ing_normalize = false;
    std::vector<std::uint64_t> ing_sub;
    std::string ing_out;
    ing->add_option("inputs", ing_inputs, "Instance or dataset files")->required()->check(CLI::ExistingFile);
    ing->add_flag("--normalize", ing_normalize, "Rescale every row to sum 1");
    ing->add_option("--subsample", ing_sub, "n m k seed: draw k n x m instances from a wide table")
        ->expected(4);
    ing->add_option("--out", ing_out, "Dataset file (default <out-dir>/dataset.json)");

    // distance
    auto* dis = app.add_subcommand("distance", "Pairwise distance matrix");
    std::string dis_dataset, dis_metric = "demand", dis_out;
    std::size_t agent_cap = kDefaultExactAgentCap;
    dis->add_option("--dataset", dis_dataset, "Dataset file")->required()->check(CLI::ExistingFile);
    dis->add_option("--metric", dis_metric, "demand | valuation")->capture_default_str();
    dis->add_option("--agent-cap", agent_cap, "Largest n for exact valuation search")->capture_default_str();
    dis->add_option("--out", dis_out, "CSV (default <out-dir>/distances_<metric>.csv)");

    // embed
    auto* emb = app.add_subcommand("embed", "2-D MDS embedding of a distance matrix");
    std::string emb_in, emb_out;
    MdsOptions mds;
    emb->add_option("--distances", emb_in, "Distance CSV")->required()->check(CLI::ExistingFile);
    emb->add_option("--restarts", mds.restarts, "Independent SMACOF starts")->capture_default_str();
    emb->add_option("--max-iters", mds.max_iters, "Iteration limit per start")->capture_default_str();
    emb->add_option("--tol", mds.tol, "Relative stress improvement threshold")->capture_default_str();
    emb->add_option("--out", emb_out, "CSV (default <out-dir>/embedding.csv)");

    // explicit
    auto* exm = app.add_subcommand("explicit", "Explicit map: top two singular values");
    std::string exm_dataset, exm_out;
    exm->add_option("--dataset", exm_dataset, "Dataset file")->required()->check(CLI::ExistingFile);
    exm->add_option("--out", exm_out, "CSV (default <out-dir>/explicit.csv)");

    // features
    auto* fea = app.add_subcommand("features", "Fairness features of every instance");
    std::string fea_dataset, fea_out;
    FeatureCaps caps;
    fea->add_option("--dataset", fea_dataset, "Dataset file")->required()->check(CLI::ExistingFile);
    fea->add_option("--enum-cap", caps.enumeration, "Largest n^m for exact enumeration")->capture_default_str();
    fea->add_option("--efpo-cap", caps.efpo, "Largest n^m for the EF+PO check")->capture_default_str();
    fea->add_option("--out", fea_out, "CSV (default <out-dir>/features.csv)");

    // render
    auto* ren = app.add_subcommand("render", "SVG scatter plot of a map");
    std::string ren_coords, ren_map, ren_features, ren_dataset, ren_color, ren_out, ren_title;
    ren->add_option("--coords", ren_coords, "Embedding or explicit-map CSV")->required()->check(CLI::ExistingFile);
    ren->add_option("--map", ren_map, "embedding | explicit (default: from the CSV header)");
    ren->add_option("--features", ren_features, "Features CSV")->check(CLI::ExistingFile);
    ren->add_option("--dataset", ren_dataset, "Dataset file (categories, markers, boundary shape)")
        ->check(CLI::ExistingFile);
    ren->add_option("--color", ren_color, "'' | source | <feature name>");
    ren->add_option("--title", ren_title, "Plot title");
    ren->add_option("--out", ren_out, "SVG (default <out-dir>/render.svg)");

    // pipeline
    auto* pip = app.add_subcommand("pipeline", "Run every stage and write all artifacts");
    PipelineConfig cfg;
    std::string pip_metric = "demand";
    bool no_embedding = false, no_explicit = false;
    std::vector<std::string> pip_colors;
    pip->add_option("--preset", cfg.preset, "Built-in composition")->capture_default_str();
    pip->add_option("--input", cfg.inputs, "Ingest these files instead of a preset")->check(CLI::ExistingFile);
    pip->add_flag("--normalize", cfg.ingest.normalize, "Rescale ingested rows to sum 1");
    pip->add_option("--metric", pip_metric, "demand | valuation")->capture_default_str();
    pip->add_option("--agent-cap", cfg.agent_cap, "Largest n for exact valuation search")->capture_default_str();
    pip->add_option("--restarts", cfg.restarts, "Independent SMACOF starts")->capture_default_str();
    pip->add_option("--max-iters", cfg.max_iters, "SMACOF iteration limit")->capture_default_str();
    pip->add_flag("--no-embedding", no_embedding, "Skip distances and embedding");
    pip->add_flag("--no-explicit", no_explicit, "Skip the explicit map");
    pip->add_option("--color", pip_colors, "Color rules for renders (repeatable)");
    pip->add_option("--enum-cap", cfg.caps.enumeration, "Largest n^m for exact enumeration")->capture_default_str();
    pip->add_option("--efpo-cap", cfg.caps.efpo, "Largest n^m for the EF+PO check")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            std::vector<InstanceRecord> records;
            if (!preset.empty()) {
                records = gen_preset(preset, g.seed);
            } else {
                SyntheticSpec spec{model_source(model, dist, d, p, phi, kind), n, m, count, g.seed, {}};
                records = gen_dataset({spec});
            }
            auto path = in_out_dir(g, gen_out, "dataset.json");
            write_dataset(path, records);
            report("dataset (" + std::to_string(records.size()) + " instances)", path);
        } else if (*ing) {
            IngestOptions opt;
            opt.normalize = ing_normalize;
            if (!ing_sub.empty())
                opt.subsample = Subsample{ing_sub[0], ing_sub[1], ing_sub[2], ing_sub[3]};
            std::vector<InstanceRecord> records;
            for (const auto& f : ing_inputs) {
                auto part = ingest(f, opt);
                records.insert(records.end(), std::make_move_iterator(part.begin()),
                               std::make_move_iterator(part.end()));
            }
            auto path = in_out_dir(g, ing_out, "dataset.json");
            write_dataset(path, records);
            report("dataset (" + std::to_string(records.size()) + " instances)", path);
        } else if (*dis) {
            const auto metric = parse_metric(dis_metric);
            auto records = read_dataset(dis_dataset);
            auto dm = pairwise_distances(records, metric, DistanceOptions{agent_cap, g.threads});
            auto path = in_out_dir(g, dis_out, "distances_" + to_string(metric) + ".csv");
            write_text_file(path, distance_csv(dm));
            report("distances", path);
        } else if (*emb) {
            auto dm = parse_distance_csv(read_text_file(emb_in), emb_in);
            mds.seed = g.seed;
            mds.threads = g.threads;
            auto e = mds_embed(dm, mds);
            auto path = in_out_dir(g, emb_out, "embedding.csv");
            write_text_file(path, embedding_csv(e));
            report("embedding (stress " + format_double(e.stress) + ")", path);
        } else if (*exm) {
            auto records = read_dataset(exm_dataset);
            auto path = in_out_dir(g, exm_out, "explicit.csv");
            write_text_file(path, explicit_csv(explicit_coords(records, g.threads)));
            report("explicit map", path);
        } else if (*fea) {
            auto records = read_dataset(fea_dataset);
            auto rows = feature_table(records, caps, g.threads);
            auto path = in_out_dir(g, fea_out, "features.csv");
            write_text_file(path, features_csv(rows));
            write_text_file(reasons_path(path), feature_reasons_csv(rows));
            report("features", path);
        } else if (*ren) {
            const auto text = read_text_file(ren_coords);
            if (ren_map.empty())
                ren_map = text.find("label,sigma1,sigma2") != std::string::npos ? "explicit" : "embedding";
            if (ren_map != "embedding" && ren_map != "explicit")
                throw ValidationError("BadParameter", "unknown map kind " + ren_map);
            RenderSpec spec;
            spec.kind = ren_map == "explicit" ? MapKind::Explicit : MapKind::Embedding;
            spec.color_feature = ren_color;
            spec.title = ren_title;
            auto coords = spec.kind == MapKind::Explicit ? parse_explicit_csv(text, ren_coords)
                                                         : parse_embedding_csv(text, ren_coords);
            std::optional<FeatureTable> table;
            if (!ren_features.empty()) table = parse_features_csv(read_text_file(ren_features), ren_features);
            std::vector<InstanceRecord> records;
            if (!ren_dataset.empty()) {
                records = read_dataset(ren_dataset);
                if (!records.empty()) spec.n = records.front().matrix.n(), spec.m = records.front().matrix.m();
            }
            auto points = plot_points(coords, table, ren_dataset.empty() ? nullptr : &records, ren_color);
            auto path = in_out_dir(g, ren_out, "render.svg");
            write_text_file(path, render_svg(points, spec));
            report("render", path);
        } else if (*pip) {
            cfg.seed = g.seed;
            cfg.threads = g.threads;
            cfg.out_dir = g.out_dir;
            cfg.metric = parse_metric(pip_metric);
            cfg.embedding = !no_embedding;
            cfg.explicit_map = !no_explicit;
            if (!pip_colors.empty()) cfg.colors = pip_colors;
            auto result = run_pipeline(cfg);
            for (const auto& f : result.files) report("wrote", f);
        }
    } catch (const Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
