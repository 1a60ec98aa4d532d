#include "fairmap/io.hpp"

#include "fairmap/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace fairmap {

namespace fs = std::filesystem;
using nlohmann::json;

ParseError::ParseError(const std::string& source, std::size_t line_, const std::string& message)
    : IoError("ParseError",
              source + (line_ ? ":" + std::to_string(line_) : std::string()) + ": " + message),
      line(line_) {}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("FileNotFound", "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("WriteFailed", "cannot write " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("WriteFailed", "write failed for " + path);
}

void check_labels(const std::vector<std::string>& labels) {
    std::set<std::string> seen;
    for (const auto& l : labels) {
        if (l.empty() || l.find_first_of(",\"\r\n") != std::string::npos)
            throw ValidationError("BadLabel", "label '" + l + "' is empty or contains , \" or a line break");
        if (!seen.insert(l).second) throw ValidationError("DuplicateLabel", "duplicate label " + l);
    }
}

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || b == e) return std::nullopt;
    return v;
}

std::optional<std::size_t> to_size(const std::string& s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

// Lines with their 1-based numbers, skipping blanks and '#' comments.
std::vector<std::pair<std::size_t, std::string>> content_lines(std::istream& in) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.emplace_back(no, std::move(t));
    }
    return out;
}

std::vector<std::pair<std::size_t, std::string>> content_lines(const std::string& text) {
    std::istringstream in(text);
    return content_lines(in);
}

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string stem_of(const std::string& path) {
    auto s = fs::path(path).stem().string();
    std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '"'; }, '_');
    return s.empty() ? "instance" : s;
}

json params_json(const Source& source) {
    struct {
        json operator()(const CharacteristicSource& s) const { return {{"kind", to_string(s.kind)}}; }
        json operator()(const IidSource& s) const { return {{"dist", to_string(s.dist)}}; }
        json operator()(const AttributesSource& s) const { return {{"d", s.d}}; }
        json operator()(const ResamplingSource& s) const { return {{"p", s.p}, {"phi", s.phi}}; }
        json operator()(const IngestedSource& s) const { return {{"name", s.name}}; }
    } visitor;
    return std::visit(visitor, source);
}

Source source_from_json(const std::string& category, const json& params) {
    if (category == "characteristic") {
        auto k = parse_characteristic(params.at("kind").get<std::string>());
        if (!k) throw ValidationError("BadParameter", "unknown characteristic kind");
        return CharacteristicSource{*k};
    }
    if (category == "iid") {
        auto d = parse_iid_dist(params.at("dist").get<std::string>());
        if (!d) throw ValidationError("BadParameter", "unknown iid distribution");
        return IidSource{*d};
    }
    if (category == "attributes") return AttributesSource{params.at("d").get<int>()};
    if (category == "resampling")
        return ResamplingSource{params.at("p").get<double>(), params.at("phi").get<double>()};
    if (category == "ingested") return IngestedSource{params.at("name").get<std::string>()};
    throw ValidationError("BadParameter", "unknown source category " + category);
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

// Compact JSON except that matrix and parameter numbers are printed with 17 digits.
std::string json_number_dump(const json& j) {
    if (j.is_number_float()) return format_double(j.get<double>());
    if (j.is_object()) {
        std::string s = "{";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) s += ", ";
            first = false;
            s += json(it.key()).dump() + ": " + json_number_dump(it.value());
        }
        return s + "}";
    }
    return j.dump();
}

} // namespace

Matrix parse_instance_text(std::istream& in, const std::string& source_name) {
    auto lines = content_lines(in);
    if (lines.empty()) throw ParseError(source_name, 0, "empty instance file");
    auto head = tokens(lines[0].second);
    std::optional<std::size_t> n, m;
    if (head.size() == 2) {
        n = to_size(head[0]);
        m = to_size(head[1]);
    }
    if (!n || !m) throw ParseError(source_name, lines[0].first, "expected header 'n m'");
    if (lines.size() - 1 != *n)
        throw ParseError(source_name, lines.size() > *n ? lines[*n + 1].first : lines.back().first,
                         "expected " + std::to_string(*n) + " rows, found " +
                             std::to_string(lines.size() - 1));
    Matrix out(*n, *m);
    for (std::size_t i = 0; i < *n; ++i) {
        const auto& [no, text] = lines[i + 1];
        auto t = tokens(text);
        if (t.size() != *m)
            throw ParseError(source_name, no,
                             "expected " + std::to_string(*m) + " values, found " + std::to_string(t.size()));
        for (std::size_t j = 0; j < *m; ++j) {
            auto v = to_double(t[j]);
            if (!v) throw ParseError(source_name, no, "not a number: '" + t[j] + "'");
            out(i, j) = *v;
        }
    }
    return out;
}

std::string instance_text(const UtilityMatrix& u) {
    std::string s = std::to_string(u.n()) + " " + std::to_string(u.m()) + "\n";
    for (std::size_t i = 0; i < u.n(); ++i) {
        for (std::size_t j = 0; j < u.m(); ++j) {
            if (j) s += ' ';
            s += format_double(u(i, j));
        }
        s += '\n';
    }
    return s;
}

std::string dataset_text(const std::vector<InstanceRecord>& records) {
    std::vector<std::string> labels;
    for (const auto& r : records) labels.push_back(r.label);
    check_labels(labels);

    std::string s = "{\n  \"format\": \"fairmap-dataset\",\n  \"version\": 1,\n  \"instances\": [";
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        s += k ? ",\n    {" : "\n    {";
        s += "\"label\": " + json(r.label).dump();
        s += ", \"source\": " + json(source_category(r.source)).dump();
        s += ", \"params\": " + json_number_dump(params_json(r.source));
        s += ", \"seed\": " + (r.seed ? std::to_string(*r.seed) : std::string("null"));
        s += ",\n     \"matrix\": [";
        const auto& u = r.matrix;
        for (std::size_t i = 0; i < u.n(); ++i) {
            s += i ? ", [" : "[";
            for (std::size_t j = 0; j < u.m(); ++j) {
                if (j) s += ", ";
                s += format_double(u(i, j));
            }
            s += "]";
        }
        s += "]}";
    }
    s += records.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return s;
}

std::vector<InstanceRecord> parse_dataset(const std::string& text, const std::string& source_name,
                                          bool normalize) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source_name, line_of_byte(text, e.byte), e.what());
    }
    std::vector<InstanceRecord> out;
    try {
        if (doc.value("format", std::string()) != "fairmap-dataset")
            throw ParseError(source_name, 1, "not a fairmap dataset (missing \"format\")");
        for (const auto& item : doc.at("instances")) {
            const auto& rows = item.at("matrix");
            std::vector<std::vector<double>> raw;
            for (const auto& row : rows) raw.push_back(row.get<std::vector<double>>());
            Matrix m = Matrix::from_rows(raw);
            auto u = normalize ? normalize_rows(std::move(m)) : validate(std::move(m));
            std::optional<std::uint64_t> seed;
            if (item.contains("seed") && !item.at("seed").is_null())
                seed = item.at("seed").get<std::uint64_t>();
            out.push_back(make_record(item.at("label").get<std::string>(), std::move(u),
                                      source_from_json(item.at("source").get<std::string>(),
                                                       item.value("params", json::object())),
                                      seed));
        }
    } catch (const json::exception& e) {
        throw ParseError(source_name, 0, std::string("malformed dataset: ") + e.what());
    }
    std::vector<std::string> labels;
    for (const auto& r : out) labels.push_back(r.label);
    check_labels(labels);
    return out;
}

void write_dataset(const std::string& path, const std::vector<InstanceRecord>& records) {
    write_text_file(path, dataset_text(records));
}

std::vector<InstanceRecord> read_dataset(const std::string& path, bool normalize) {
    return parse_dataset(read_text_file(path), path, normalize);
}

std::vector<InstanceRecord> subsample_table(const Matrix& table, const std::string& name,
                                            const Subsample& spec) {
    std::vector<InstanceRecord> out;
    if (spec.count == 0) return out;
    if (spec.n < 2 || spec.m < spec.n || spec.n > table.rows() || spec.m > table.cols())
        throw ValidationError("BadDimensions",
                              "cannot draw " + std::to_string(spec.n) + "x" + std::to_string(spec.m) +
                                  " instances from a " + std::to_string(table.rows()) + "x" +
                                  std::to_string(table.cols()) + " table");
    constexpr int kAttempts = 1000;
    for (std::size_t t = 0; t < spec.count; ++t) {
        const auto seed = child_seed(spec.seed, t);
        Rng rng(seed);
        std::optional<UtilityMatrix> drawn;
        for (int attempt = 0; attempt < kAttempts && !drawn; ++attempt) {
            auto pick = [&rng](std::size_t total, std::size_t want) {
                std::vector<std::size_t> idx(total);
                std::iota(idx.begin(), idx.end(), std::size_t{0});
                for (std::size_t k = 0; k < want; ++k)
                    std::swap(idx[k], idx[k + rng.below(total - k)]);
                idx.resize(want);
                return idx;
            };
            auto rows = pick(table.rows(), spec.n);
            auto cols = pick(table.cols(), spec.m);
            Matrix sub(spec.n, spec.m);
            bool zero_row = false;
            for (std::size_t i = 0; i < spec.n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < spec.m; ++j) s += sub(i, j) = table(rows[i], cols[j]);
                zero_row = zero_row || s <= 0.0;
            }
            if (!zero_row) drawn = normalize_rows(std::move(sub));
        }
        if (!drawn)
            throw ValidationError("ZeroRow", "every subsample of " + name +
                                                 " drawn for instance " + std::to_string(t) +
                                                 " had an agent valuing no sampled good");
        char label[32];
        std::snprintf(label, sizeof label, "_sub_%03zu", t);
        out.push_back(make_record(name + label, std::move(*drawn), IngestedSource{name}, seed));
    }
    return out;
}

std::vector<InstanceRecord> ingest(const std::string& path, const IngestOptions& options) {
    const auto text = read_text_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool is_dataset = first != std::string::npos && text[first] == '{';
    if (is_dataset) {
        if (options.subsample)
            throw ValidationError("BadParameter", "subsampling needs a single table, not a dataset");
        return parse_dataset(text, path, options.normalize);
    }
    std::istringstream in(text);
    Matrix table = parse_instance_text(in, path);
    const auto name = stem_of(path);
    if (options.subsample) return subsample_table(table, name, *options.subsample);
    auto u = options.normalize ? normalize_rows(std::move(table)) : validate(std::move(table));
    std::vector<InstanceRecord> out;
    out.push_back(make_record(name, std::move(u), IngestedSource{name}));
    return out;
}

std::string distance_csv(const DistanceMatrix& d) {
    check_labels(d.labels);
    std::string s;
    for (std::size_t i = 0; i < d.labels.size(); ++i) s += (i ? "," : "") + d.labels[i];
    s += '\n';
    for (std::size_t i = 0; i < d.d.rows(); ++i) {
        for (std::size_t j = 0; j < d.d.cols(); ++j) s += (j ? "," : "") + format_double(d.d(i, j));
        s += '\n';
    }
    return s;
}

DistanceMatrix parse_distance_csv(const std::string& text, const std::string& source_name) {
    auto lines = content_lines(text);
    if (lines.empty()) throw ParseError(source_name, 0, "empty distance file");
    DistanceMatrix out;
    out.labels = split_csv(lines[0].second);
    const auto k = out.labels.size();
    if (lines.size() != k + 1)
        throw ParseError(source_name, lines.back().first,
                         "expected " + std::to_string(k) + " rows after the header");
    out.d = Matrix(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        auto cells = split_csv(lines[i + 1].second);
        if (cells.size() != k)
            throw ParseError(source_name, lines[i + 1].first, "expected " + std::to_string(k) + " values");
        for (std::size_t j = 0; j < k; ++j) {
            auto v = to_double(cells[j]);
            if (!v) throw ParseError(source_name, lines[i + 1].first, "not a number: '" + cells[j] + "'");
            out.d(i, j) = *v;
        }
    }
    check_labels(out.labels);
    return out;
}

std::string embedding_csv(const Embedding& e) {
    check_labels(e.labels);
    std::string s = "# stress=" + format_double(e.stress) + ",iterations=" + std::to_string(e.iterations) +
                    (e.degenerate ? ",degenerate=1" : "") + "\nlabel,x,y\n";
    for (std::size_t i = 0; i < e.labels.size(); ++i)
        s += e.labels[i] + "," + format_double(e.points[i][0]) + "," + format_double(e.points[i][1]) + "\n";
    return s;
}

namespace {

std::vector<PlanarPoint> parse_three_columns(const std::string& text, const std::string& source_name,
                                             const std::string& header, bool swap) {
    auto lines = content_lines(text);
    if (lines.empty() || lines[0].second != header)
        throw ParseError(source_name, lines.empty() ? 0 : lines[0].first, "expected header '" + header + "'");
    std::vector<PlanarPoint> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto cells = split_csv(lines[r].second);
        if (cells.size() != 3) throw ParseError(source_name, lines[r].first, "expected 3 columns");
        auto a = to_double(cells[1]);
        auto b = to_double(cells[2]);
        if (!a || !b) throw ParseError(source_name, lines[r].first, "not a number");
        out.push_back(swap ? PlanarPoint{cells[0], *b, *a} : PlanarPoint{cells[0], *a, *b});
    }
    std::vector<std::string> labels;
    for (const auto& p : out) labels.push_back(p.label);
    check_labels(labels);
    return out;
}

} // namespace

std::vector<PlanarPoint> parse_embedding_csv(const std::string& text, const std::string& source_name) {
    return parse_three_columns(text, source_name, "label,x,y", false);
}

std::string explicit_csv(const std::vector<LabeledPoint>& points) {
    std::vector<std::string> labels;
    for (const auto& p : points) labels.push_back(p.label);
    check_labels(labels);
    std::string s = "label,sigma1,sigma2\n";
    for (const auto& p : points)
        s += p.label + "," + format_double(p.point.sigma1) + "," + format_double(p.point.sigma2) + "\n";
    return s;
}

std::vector<PlanarPoint> parse_explicit_csv(const std::string& text, const std::string& source_name) {
    return parse_three_columns(text, source_name, "label,sigma1,sigma2", true);
}

std::string features_csv(const std::vector<FeatureRecord>& rows) {
    std::vector<std::string> labels;
    for (const auto& r : rows) labels.push_back(r.label);
    check_labels(labels);
    std::string s = "# sum_max_envies=min over allocations; booleans 0/1; empty cells are listed in the reasons file\nlabel";
    for (const auto& name : feature_names()) s += "," + name;
    s += '\n';
    for (const auto& r : rows) {
        s += r.label;
        for (const auto& name : feature_names()) {
            s += ',';
            if (auto v = r.value(name))
                s += is_boolean_feature(name) ? (*v != 0.0 ? "1" : "0") : format_double(*v);
        }
        s += '\n';
    }
    return s;
}

std::string feature_reasons_csv(const std::vector<FeatureRecord>& rows) {
    std::string s = "label,feature,reason\n";
    for (const auto& r : rows)
        for (const auto& name : feature_names())
            if (auto it = r.absent_reasons.find(name); it != r.absent_reasons.end()) {
                std::string reason = it->second;
                std::replace_if(reason.begin(), reason.end(),
                                [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
                s += r.label + "," + name + "," + reason + "\n";
            }
    return s;
}

bool FeatureTable::has(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::optional<double> FeatureTable::get(const std::string& label, const std::string& name) const {
    auto col = std::find(names.begin(), names.end(), name);
    if (col == names.end()) throw ValidationError("UnknownFeature", "unknown feature " + name);
    auto row = std::find(labels.begin(), labels.end(), label);
    if (row == labels.end()) return std::nullopt;
    return values[row - labels.begin()][col - names.begin()];
}

FeatureTable parse_features_csv(const std::string& text, const std::string& source_name) {
    auto lines = content_lines(text);
    if (lines.empty()) throw ParseError(source_name, 0, "empty features file");
    auto header = split_csv(lines[0].second);
    if (header.empty() || header[0] != "label")
        throw ParseError(source_name, lines[0].first, "expected header starting with 'label'");
    FeatureTable t;
    t.names.assign(header.begin() + 1, header.end());
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto cells = split_csv(lines[r].second);
        if (cells.size() != header.size())
            throw ParseError(source_name, lines[r].first,
                             "expected " + std::to_string(header.size()) + " columns");
        t.labels.push_back(cells[0]);
        std::vector<std::optional<double>> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                row.push_back(std::nullopt);
                continue;
            }
            auto v = to_double(cells[c]);
            if (!v) throw ParseError(source_name, lines[r].first, "not a number: '" + cells[c] + "'");
            row.push_back(*v);
        }
        t.values.push_back(std::move(row));
    }
    check_labels(t.labels);
    return t;
}

FeatureTable to_table(const std::vector<FeatureRecord>& rows) {
    FeatureTable t;
    t.names = feature_names();
    for (const auto& r : rows) {
        t.labels.push_back(r.label);
        std::vector<std::optional<double>> row;
        for (const auto& name : t.names) row.push_back(r.value(name));
        t.values.push_back(std::move(row));
    }
    return t;
}

} // namespace fairmap
