#include "fairmap/pipeline.hpp"

#include "fairmap/generators.hpp"
#include "fairmap/render.hpp"
#include "fairmap/spectral.hpp"

#include <filesystem>

namespace fairmap {

namespace fs = std::filesystem;

StageError::StageError(std::string stage_, const Error& cause)
    : Error(cause.kind(), cause.code(), stage_ + ": " + cause.what()), stage(std::move(stage_)) {}

namespace {

class Outputs {
public:
    explicit Outputs(const std::string& dir) : dir_(dir) {}

    std::string write(const std::string& name, const std::string& content) {
        const auto path = (dir_ / name).string();
        write_text_file(path, content);
        files_.push_back(path);
        return path;
    }

    void discard() noexcept {
        std::error_code ec;
        for (const auto& f : files_) fs::remove(f, ec);
        files_.clear();
    }

    const std::vector<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

template <class F>
auto stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    } catch (const std::exception& e) {
        throw StageError(name, IoError("Internal", e.what()));
    }
}

std::string svg_name(const std::string& map, const std::string& color) {
    return map + "_" + (color.empty() ? std::string("plain") : color) + ".svg";
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
    stage("setup", [&] {
        std::error_code ec;
        fs::create_directories(config.out_dir, ec);
        if (ec || !fs::is_directory(config.out_dir))
            throw IoError("WriteFailed", "cannot create output directory " + config.out_dir);
        return 0;
    });

    Outputs out(config.out_dir);
    try {
        auto records = stage("dataset", [&] {
            std::vector<InstanceRecord> all;
            if (config.inputs.empty()) return gen_preset(config.preset, config.seed);
            for (const auto& path : config.inputs) {
                auto part = ingest(path, config.ingest);
                all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
            }
            return all;
        });
        stage("dataset", [&] { return out.write("dataset.json", dataset_text(records)); });

        std::optional<Embedding> embedding;
        if (config.embedding) {
            auto dist = stage("distance", [&] {
                DistanceOptions opt;
                opt.agent_cap = config.agent_cap;
                opt.threads = config.threads;
                auto d = pairwise_distances(records, config.metric, opt);
                out.write("distances_" + to_string(config.metric) + ".csv", distance_csv(d));
                return d;
            });
            embedding = stage("embed", [&] {
                MdsOptions opt;
                opt.seed = config.seed;
                opt.restarts = config.restarts;
                opt.max_iters = config.max_iters;
                opt.tol = config.tol;
                opt.threads = config.threads;
                auto e = mds_embed(dist, opt);
                out.write("embedding.csv", embedding_csv(e));
                return e;
            });
        }

        std::vector<LabeledPoint> spectral;
        if (config.explicit_map)
            spectral = stage("explicit", [&] {
                auto pts = explicit_coords(records, config.threads);
                out.write("explicit.csv", explicit_csv(pts));
                return pts;
            });

        auto table = stage("features", [&] {
            auto rows = feature_table(records, config.caps, config.threads);
            out.write("features.csv", features_csv(rows));
            out.write("features_reasons.csv", feature_reasons_csv(rows));
            return to_table(rows);
        });

        stage("render", [&] {
            const std::size_t n = records.empty() ? 0 : records.front().matrix.n();
            const std::size_t m = records.empty() ? 0 : records.front().matrix.m();
            for (const auto& color : config.colors) {
                if (embedding) {
                    std::vector<PlanarPoint> coords;
                    for (std::size_t i = 0; i < embedding->labels.size(); ++i)
                        coords.push_back({embedding->labels[i], embedding->points[i][0], embedding->points[i][1]});
                    RenderSpec spec;
                    spec.kind = MapKind::Embedding;
                    spec.color_feature = color;
                    spec.title = "distance embedding (" + to_string(config.metric) + ")";
                    out.write(svg_name("embedding", color), render_svg(plot_points(coords, table, &records, color), spec));
                }
                if (config.explicit_map) {
                    std::vector<PlanarPoint> coords;
                    for (const auto& p : spectral) coords.push_back({p.label, p.point.sigma2, p.point.sigma1});
                    RenderSpec spec;
                    spec.kind = MapKind::Explicit;
                    spec.color_feature = color;
                    spec.n = n;
                    spec.m = m;
                    spec.title = "explicit map";
                    out.write(svg_name("explicit", color), render_svg(plot_points(coords, table, &records, color), spec));
                }
            }
            return 0;
        });
    } catch (...) {
        out.discard();
        throw;
    }
    return PipelineResult{out.files()};
}

} // namespace fairmap
