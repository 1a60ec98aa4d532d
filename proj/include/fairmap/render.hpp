#pragma once

#include "fairmap/core.hpp"
#include "fairmap/io.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fairmap {

enum class MapKind { Embedding, Explicit };

enum class MarkerShape { Circle, Cross, Star };

struct PlotPoint {
    std::string label;
    double x = 0.0;
    double y = 0.0;
    /// Continuous color value (nullopt: neutral color unless a category is set).
    std::optional<double> value;
    /// Discrete color group; used when the color feature is categorical.
    std::string category;
    MarkerShape shape = MarkerShape::Circle;
};

struct RenderSpec {
    MapKind kind = MapKind::Embedding;
    /// Empty: no coloring. "source": color by instance category. Otherwise a feature name.
    std::string color_feature;
    /// Shape of the instances, needed for boundary overlays on explicit maps.
    std::size_t n = 0;
    std::size_t m = 0;
    std::string title;
    double width = 720;
    double height = 600;
};

using Rgb = std::array<unsigned char, 3>;

/// Viridis ramp, t clamped to [0, 1].
Rgb viridis(double t);
/// Ten-color categorical palette, cycled.
Rgb palette(std::size_t index);
std::string hex(Rgb c);

/// Joins coordinates with features and instance metadata. Characteristic instances get
/// star markers, other instances with ef_exists = 1 get cross markers. Throws
/// UnknownFeature when `color_feature` is neither "source", empty, nor a known feature.
std::vector<PlotPoint> plot_points(const std::vector<PlanarPoint>& coords,
                                   const std::optional<FeatureTable>& features,
                                   const std::vector<InstanceRecord>* records,
                                   const std::string& color_feature);

/// Standalone SVG 1.1 document with exactly one marker element (class "marker") per point.
/// Explicit maps put sigma2 on the horizontal axis and sigma1 on the vertical axis.
std::string render_svg(const std::vector<PlotPoint>& points, const RenderSpec& spec);

} // namespace fairmap
