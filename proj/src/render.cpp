#include "fairmap/render.hpp"

#include "fairmap/features.hpp"
#include "fairmap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

namespace fairmap {

namespace {

// Samples of matplotlib's viridis at t = 0, 0.125, ..., 1.
constexpr std::array<std::array<double, 3>, 9> kViridis{{
    {68, 1, 84},
    {71, 44, 122},
    {59, 81, 139},
    {44, 113, 142},
    {33, 144, 141},
    {39, 173, 129},
    {92, 200, 99},
    {170, 220, 50},
    {253, 231, 37},
}};

constexpr std::array<Rgb, 10> kPalette{{
    {31, 119, 180},
    {255, 127, 14},
    {44, 160, 44},
    {214, 39, 40},
    {148, 103, 189},
    {140, 86, 75},
    {227, 119, 194},
    {127, 127, 127},
    {188, 189, 34},
    {23, 190, 207},
}};

constexpr const char* kDefaultColor = "#3b75af";
constexpr const char* kNeutralColor = "#b0b0b0";

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;            // data range
    double left, top, width, height;  // pixel box
    double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
    double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

std::string star_points(double cx, double cy, double outer, double inner) {
    std::string s;
    for (int k = 0; k < 10; ++k) {
        const double r = k % 2 ? inner : outer;
        const double a = -M_PI / 2 + k * M_PI / 5;
        if (k) s += ' ';
        s += num(cx + r * std::cos(a)) + "," + num(cy + r * std::sin(a));
    }
    return s;
}

// Round tick positions (steps of 1, 2 or 5 times a power of ten), about five per axis.
std::vector<double> nice_ticks(double lo, double hi) {
    const double raw = (hi - lo) / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = 10 * mag;
    for (double k : {1.0, 2.0, 5.0})
        if (k * mag >= raw) {
            step = k * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step - 1e-9); t * step <= hi + 1e-9 * step; t += 1) {
        const double v = t * step;
        out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
}

std::vector<std::pair<Boundary, std::vector<SpectralPoint>>> boundary_curves(std::size_t n, std::size_t m) {
    std::vector<std::pair<Boundary, std::vector<SpectralPoint>>> out;
    for (auto side : {Boundary::West, Boundary::South, Boundary::North, Boundary::East}) {
        std::vector<SpectralPoint> pts;
        for (const auto& u : boundary_interpolation(side, n, m, 25)) pts.push_back(top_singular_values(u));
        if (side == Boundary::North) {
            // The north side is the arc s1^2 + s2^2 = n from CON to the farthest attained point.
            double reach = 0.0;
            for (const auto& q : pts) reach = std::max(reach, q.sigma2);
            const double r = std::sqrt(static_cast<double>(n));
            pts.clear();
            for (int k = 0; k <= 48; ++k) {
                const double s2 = reach * k / 48;
                pts.push_back({std::sqrt(std::max(0.0, r * r - s2 * s2)), s2});
            }
        }
        out.emplace_back(side, std::move(pts));
    }
    return out;
}

} // namespace

Rgb viridis(double t) {
    if (!(t > 0.0)) t = 0.0;
    if (t > 1.0) t = 1.0;
    const double pos = t * (kViridis.size() - 1);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(pos), kViridis.size() - 2);
    const double f = pos - k;
    Rgb c{};
    for (int ch = 0; ch < 3; ++ch)
        c[ch] = static_cast<unsigned char>(std::lround(kViridis[k][ch] * (1 - f) + kViridis[k + 1][ch] * f));
    return c;
}

Rgb palette(std::size_t index) { return kPalette[index % kPalette.size()]; }

std::string hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

std::vector<PlotPoint> plot_points(const std::vector<PlanarPoint>& coords,
                                   const std::optional<FeatureTable>& features,
                                   const std::vector<InstanceRecord>* records,
                                   const std::string& color_feature) {
    const bool by_source = color_feature == "source";
    const bool by_feature = !color_feature.empty() && !by_source;
    if (by_feature) {
        const auto& known = feature_names();
        if (std::find(known.begin(), known.end(), color_feature) == known.end())
            throw ValidationError("UnknownFeature", "unknown feature " + color_feature);
        if (!features || !features->has(color_feature))
            throw ValidationError("UnknownFeature", "feature " + color_feature + " is not in the features table");
    }
    std::unordered_map<std::string, const InstanceRecord*> by_label;
    if (records)
        for (const auto& r : *records) by_label[r.label] = &r;

    std::vector<PlotPoint> out;
    for (const auto& c : coords) {
        if (!std::isfinite(c.x) || !std::isfinite(c.y))
            throw ValidationError("NonFinite", "point " + c.label + " has non-finite coordinates");
        PlotPoint p{c.label, c.x, c.y, std::nullopt, {}, MarkerShape::Circle};
        auto rec = by_label.find(c.label);
        const bool characteristic = rec != by_label.end() && source_category(rec->second->source) == "characteristic";
        if (by_source) p.category = rec != by_label.end() ? source_category(rec->second->source) : "unknown";
        if (by_feature) {
            auto v = features->get(c.label, color_feature);
            if (is_boolean_feature(color_feature)) {
                if (v) p.category = color_feature + (*v != 0.0 ? "=1" : "=0");
            } else {
                p.value = v;
            }
        }
        if (characteristic) {
            p.shape = MarkerShape::Star;
        } else if (features && features->has("ef_exists")) {
            auto ef = features->get(c.label, "ef_exists");
            if (ef && *ef != 0.0) p.shape = MarkerShape::Cross;
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::string render_svg(const std::vector<PlotPoint>& points, const RenderSpec& spec) {
    for (const auto& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || (p.value && !std::isfinite(*p.value)))
            throw ValidationError("NonFinite", "point " + p.label + " is not finite");

    const bool explicit_map = spec.kind == MapKind::Explicit;
    std::vector<std::pair<Boundary, std::vector<SpectralPoint>>> curves;
    if (explicit_map && spec.n >= 2 && spec.m >= spec.n) curves = boundary_curves(spec.n, spec.m);

    // Data range.
    Frame f{};
    f.left = 80;
    f.top = spec.title.empty() ? 20 : 40;
    f.width = spec.width - f.left - 210;
    f.height = spec.height - f.top - 60;
    if (explicit_map) {
        double xmax = 0.0, ymax = spec.n ? std::sqrt(static_cast<double>(spec.n)) : 0.0;
        for (const auto& p : points) xmax = std::max(xmax, p.x), ymax = std::max(ymax, p.y);
        for (const auto& [side, pts] : curves)
            for (const auto& q : pts) xmax = std::max(xmax, q.sigma2), ymax = std::max(ymax, q.sigma1);
        if (xmax <= 0.0) xmax = 1.0;
        if (ymax <= 0.0) ymax = 1.0;
        f.x0 = 0.0, f.x1 = xmax * 1.05, f.y0 = 0.0, f.y1 = ymax * 1.05;
    } else {
        double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
        if (!points.empty()) {
            xlo = xhi = points[0].x;
            ylo = yhi = points[0].y;
        }
        for (const auto& p : points) {
            xlo = std::min(xlo, p.x), xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y), yhi = std::max(yhi, p.y);
        }
        // Equal scale on both axes so embedded distances are not distorted.
        const double half = std::max({(xhi - xlo) / 2, (yhi - ylo) / 2 * f.width / f.height, 1e-9}) * 1.08;
        const double cx = (xlo + xhi) / 2, cy = (ylo + yhi) / 2;
        f.x0 = cx - half, f.x1 = cx + half;
        const double yhalf = half * f.height / f.width;
        f.y0 = cy - yhalf, f.y1 = cy + yhalf;
    }

    // Colors.
    std::optional<double> vmin, vmax;
    std::set<std::string> categories;
    for (const auto& p : points) {
        if (p.value) {
            vmin = vmin ? std::min(*vmin, *p.value) : *p.value;
            vmax = vmax ? std::max(*vmax, *p.value) : *p.value;
        }
        if (!p.category.empty()) categories.insert(p.category);
    }
    std::map<std::string, std::string> category_color;
    {
        std::size_t k = 0;
        for (const auto& c : categories) category_color[c] = hex(palette(k++));
    }
    auto color_of = [&](const PlotPoint& p) -> std::string {
        if (p.value) {
            const double span = *vmax - *vmin;
            return hex(viridis(span > 0 ? (*p.value - *vmin) / span : 0.5));
        }
        if (!p.category.empty()) return category_color[p.category];
        return spec.color_feature.empty() ? kDefaultColor : kNeutralColor;
    };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(spec.width) +
         "\" height=\"" + num(spec.height) + "\" viewBox=\"0 0 " + num(spec.width) + " " + num(spec.height) + "\">\n";
    if (vmin) {
        s += "<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">";
        for (int k = 0; k <= 10; ++k)
            s += "<stop offset=\"" + num(k / 10.0) + "\" stop-color=\"" + hex(viridis(k / 10.0)) + "\"/>";
        s += "</linearGradient></defs>\n";
    }
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        s += "<text x=\"" + num(f.left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" +
             xml_escape(spec.title) + "</text>\n";

    // Axes and ticks.
    s += "<g class=\"axes\" stroke=\"#333\" fill=\"none\">\n";
    s += "<rect x=\"" + num(f.left) + "\" y=\"" + num(f.top) + "\" width=\"" + num(f.width) + "\" height=\"" +
         num(f.height) + "\"/>\n</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double xv : nice_ticks(f.x0, f.x1)) {
        const double px = f.px(xv);
        s += "<line x1=\"" + num(px) + "\" y1=\"" + num(f.top + f.height) + "\" x2=\"" + num(px) + "\" y2=\"" +
             num(f.top + f.height + 5) + "\" stroke=\"#333\"/>";
        s += "<text x=\"" + num(px) + "\" y=\"" + num(f.top + f.height + 18) + "\" text-anchor=\"middle\">" +
             short_num(xv) + "</text>\n";
    }
    for (double yv : nice_ticks(f.y0, f.y1)) {
        const double py = f.py(yv);
        s += "<line x1=\"" + num(f.left - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(f.left) + "\" y2=\"" + num(py) +
             "\" stroke=\"#333\"/>";
        s += "<text x=\"" + num(f.left - 8) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" + short_num(yv) +
             "</text>\n";
    }
    s += "</g>\n";
    const std::string xlabel = explicit_map ? "σ₂" : "x";
    const std::string ylabel = explicit_map ? "σ₁" : "y";
    s += "<text class=\"axis-label\" x=\"" + num(f.left + f.width / 2) + "\" y=\"" + num(f.top + f.height + 40) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + xlabel + "</text>\n";
    s += "<text class=\"axis-label\" x=\"" + num(f.left - 58) + "\" y=\"" + num(f.top + f.height / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + ylabel + "</text>\n";

    // Boundary overlays.
    if (!curves.empty()) {
        s += "<g class=\"boundaries\" fill=\"none\" stroke=\"#888\" stroke-width=\"1.2\" stroke-dasharray=\"4 3\">\n";
        for (const auto& [side, pts] : curves) {
            s += "<polyline class=\"boundary boundary-" + to_string(side) + "\" points=\"";
            for (std::size_t k = 0; k < pts.size(); ++k)
                s += (k ? " " : "") + num(f.px(pts[k].sigma2)) + "," + num(f.py(pts[k].sigma1));
            s += "\"/>\n";
        }
        s += "</g>\n";
    }

    // Markers: one element per point.
    s += "<g class=\"points\">\n";
    for (const auto& p : points) {
        const double cx = f.px(p.x), cy = f.py(p.y);
        const auto color = color_of(p);
        const auto title = "<title>" + xml_escape(p.label) + "</title>";
        const auto data = " data-label=\"" + xml_escape(p.label) + "\"";
        switch (p.shape) {
            case MarkerShape::Circle:
                s += "<circle class=\"marker circle\"" + data + " cx=\"" + num(cx) + "\" cy=\"" + num(cy) +
                     "\" r=\"4\" fill=\"" + color + "\" stroke=\"#222\" stroke-width=\"0.4\">" + title + "</circle>\n";
                break;
            case MarkerShape::Cross:
                s += "<path class=\"marker cross\"" + data + " d=\"M" + num(cx - 4.5) + " " + num(cy - 4.5) + " L" +
                     num(cx + 4.5) + " " + num(cy + 4.5) + " M" + num(cx - 4.5) + " " + num(cy + 4.5) + " L" +
                     num(cx + 4.5) + " " + num(cy - 4.5) + "\" stroke=\"" + color +
                     "\" stroke-width=\"2\" fill=\"none\">" + title + "</path>\n";
                break;
            case MarkerShape::Star:
                s += "<polygon class=\"marker star\"" + data + " points=\"" + star_points(cx, cy, 8, 3.4) +
                     "\" fill=\"" + color + "\" stroke=\"#222\" stroke-width=\"0.6\">" + title + "</polygon>\n";
                break;
        }
    }
    s += "</g>\n";

    // Legend.
    const double lx = f.left + f.width + 25;
    double ly = f.top + 10;
    s += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">\n";
    if (!spec.color_feature.empty()) {
        s += "<text x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" font-weight=\"bold\">" +
             xml_escape(spec.color_feature) + "</text>\n";
        ly += 12;
    }
    if (vmin) {
        s += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" width=\"16\" height=\"120\" fill=\"url(#ramp)\"/>\n";
        s += "<text x=\"" + num(lx + 22) + "\" y=\"" + num(ly + 10) + "\">" + short_num(*vmax) + "</text>\n";
        s += "<text x=\"" + num(lx + 22) + "\" y=\"" + num(ly + 120) + "\">" + short_num(*vmin) + "</text>\n";
        ly += 140;
    }
    for (const auto& [name, color] : category_color) {
        s += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>";
        s += "<text x=\"" + num(lx + 18) + "\" y=\"" + num(ly + 10) + "\">" + xml_escape(name) + "</text>\n";
        ly += 18;
    }
    const bool any_neutral = std::any_of(points.begin(), points.end(), [&](const PlotPoint& p) {
        return !spec.color_feature.empty() && !p.value && p.category.empty();
    });
    if (any_neutral) {
        s += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" width=\"12\" height=\"12\" fill=\"" +
             std::string(kNeutralColor) + "\"/>";
        s += "<text x=\"" + num(lx + 18) + "\" y=\"" + num(ly + 10) + "\">absent</text>\n";
        ly += 18;
    }
    ly += 8;
    const bool any_star = std::any_of(points.begin(), points.end(), [](const PlotPoint& p) { return p.shape == MarkerShape::Star; });
    const bool any_cross = std::any_of(points.begin(), points.end(), [](const PlotPoint& p) { return p.shape == MarkerShape::Cross; });
    if (any_star) {
        s += "<polygon class=\"legend-symbol\" points=\"" + star_points(lx + 6, ly + 6, 7, 3) +
             "\" fill=\"none\" stroke=\"#222\"/>";
        s += "<text x=\"" + num(lx + 18) + "\" y=\"" + num(ly + 10) + "\">characteristic</text>\n";
        ly += 18;
    }
    if (any_cross) {
        s += "<path class=\"legend-symbol\" d=\"M" + num(lx + 2) + " " + num(ly + 2) + " L" + num(lx + 10) + " " +
             num(ly + 10) + " M" + num(lx + 2) + " " + num(ly + 10) + " L" + num(lx + 10) + " " + num(ly + 2) +
             "\" stroke=\"#222\" stroke-width=\"2\"/>";
        s += "<text x=\"" + num(lx + 18) + "\" y=\"" + num(ly + 10) + "\">envy-free allocation exists</text>\n";
        ly += 18;
    }
    if (!curves.empty()) {
        s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly + 6) + "\" x2=\"" + num(lx + 14) + "\" y2=\"" + num(ly + 6) +
             "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>";
        s += "<text x=\"" + num(lx + 18) + "\" y=\"" + num(ly + 10) + "\">map boundary</text>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
}

} // namespace fairmap
