#include "curvad/cloud_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "curvad/error.hpp"

namespace curvad {
namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Splits text into lines, dropping a trailing '\r' from each.
class LineReader {
public:
    explicit LineReader(std::string_view text, std::size_t first_line = 1)
        : text_(text), line_no_(first_line - 1) {}

    bool next(std::string_view& line) {
        if (pos_ >= text_.size()) return false;
        const std::size_t nl = text_.find('\n', pos_);
        const std::size_t end = nl == std::string_view::npos ? text_.size() : nl;
        line = text_.substr(pos_, end - pos_);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
        ++line_no_;
        return true;
    }

    std::size_t line_number() const noexcept { return line_no_; }
    std::size_t offset() const noexcept { return pos_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_;
};

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::vector<std::string_view> split_char(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t p = s.find(sep, start);
        out.push_back(trim(s.substr(start, p == std::string_view::npos ? s.npos : p - start)));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

std::optional<double> to_double(std::string_view token) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
    return v;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& msg) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

Vec3 parse_triple(const std::filesystem::path& path, std::size_t line,
                  const std::vector<std::string_view>& tokens) {
    if (tokens.size() != 3) {
        parse_fail(path, line, "expected 3 values, found " + std::to_string(tokens.size()));
    }
    Vec3 p{};
    for (int c = 0; c < 3; ++c) {
        const auto v = to_double(tokens[c]);
        if (!v) parse_fail(path, line, "not a number: '" + std::string(tokens[c]) + "'");
        if (!std::isfinite(*v)) {
            throw ValidationError(path.string() + ":" + std::to_string(line) +
                                  ": non-finite coordinate '" + std::string(tokens[c]) + "'");
        }
        p[c] = *v;
    }
    return p;
}

PointCloud finish(const std::filesystem::path& path, std::vector<Vec3> pts) {
    if (pts.empty()) throw EmptyInputError("'" + path.string() + "' contains no points");
    return PointCloud(std::move(pts));
}

PointCloud load_xyz(const std::filesystem::path& path, std::string_view text) {
    std::vector<Vec3> pts;
    LineReader lines(text);
    std::string_view line;
    while (lines.next(line)) {
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        pts.push_back(parse_triple(path, lines.line_number(), split_ws(t)));
    }
    return finish(path, std::move(pts));
}

PointCloud load_csv(const std::filesystem::path& path, std::string_view text) {
    std::vector<Vec3> pts;
    LineReader lines(text);
    std::string_view line;
    bool first = true;
    while (lines.next(line)) {
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        const auto fields = split_char(t, ',');
        if (first) {
            first = false;
            if (fields.size() == 3 && lower(fields[0]) == "x" && lower(fields[1]) == "y" &&
                lower(fields[2]) == "z") {
                continue;
            }
        }
        pts.push_back(parse_triple(path, lines.line_number(), fields));
    }
    return finish(path, std::move(pts));
}

// --- PLY -------------------------------------------------------------------

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<PlyType> parse_ply_type(std::string_view name) {
    if (name == "char" || name == "int8") return PlyType::Int8;
    if (name == "uchar" || name == "uint8") return PlyType::UInt8;
    if (name == "short" || name == "int16") return PlyType::Int16;
    if (name == "ushort" || name == "uint16") return PlyType::UInt16;
    if (name == "int" || name == "int32") return PlyType::Int32;
    if (name == "uint" || name == "uint32") return PlyType::UInt32;
    if (name == "float" || name == "float32") return PlyType::Float32;
    if (name == "double" || name == "float64") return PlyType::Float64;
    return std::nullopt;
}

std::size_t type_size(PlyType t) {
    switch (t) {
        case PlyType::Int8:
        case PlyType::UInt8: return 1;
        case PlyType::Int16:
        case PlyType::UInt16: return 2;
        case PlyType::Int32:
        case PlyType::UInt32:
        case PlyType::Float32: return 4;
        case PlyType::Float64: return 8;
    }
    return 0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::Float32;
    bool is_list = false;
    PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

template <class T>
T read_le(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
        auto* b = reinterpret_cast<unsigned char*>(&v);
        std::reverse(b, b + sizeof(T));
    }
    return v;
}

double read_scalar(PlyType t, const char* p) {
    switch (t) {
        case PlyType::Int8: return read_le<std::int8_t>(p);
        case PlyType::UInt8: return read_le<std::uint8_t>(p);
        case PlyType::Int16: return read_le<std::int16_t>(p);
        case PlyType::UInt16: return read_le<std::uint16_t>(p);
        case PlyType::Int32: return read_le<std::int32_t>(p);
        case PlyType::UInt32: return read_le<std::uint32_t>(p);
        case PlyType::Float32: return read_le<float>(p);
        case PlyType::Float64: return read_le<double>(p);
    }
    return 0.0;
}

PointCloud load_ply(const std::filesystem::path& path, std::string_view text) {
    LineReader lines(text);
    std::string_view line;
    if (!lines.next(line) || trim(line) != "ply") parse_fail(path, 1, "missing 'ply' magic");

    bool binary = false;
    bool have_format = false;
    std::vector<PlyElement> elements;
    bool ended = false;
    while (lines.next(line)) {
        const std::size_t ln = lines.line_number();
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "format") {
            if (tok.size() != 3 || tok[2] != "1.0") parse_fail(path, ln, "bad format line");
            if (tok[1] == "ascii") {
                binary = false;
            } else if (tok[1] == "binary_little_endian") {
                binary = true;
            } else {
                parse_fail(path, ln, "unsupported PLY format '" + std::string(tok[1]) + "'");
            }
            have_format = true;
        } else if (tok[0] == "element") {
            if (tok.size() != 3) parse_fail(path, ln, "bad element line");
            std::size_t count = 0;
            const auto [ptr, ec] =
                std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), count);
            if (ec != std::errc() || ptr != tok[2].data() + tok[2].size()) {
                parse_fail(path, ln, "bad element count");
            }
            elements.push_back({std::string(tok[1]), count, {}});
        } else if (tok[0] == "property") {
            if (elements.empty()) parse_fail(path, ln, "property before any element");
            PlyProperty prop;
            if (tok.size() == 5 && tok[1] == "list") {
                const auto ct = parse_ply_type(tok[2]);
                const auto it = parse_ply_type(tok[3]);
                if (!ct || !it) parse_fail(path, ln, "unknown list property type");
                prop = {std::string(tok[4]), *it, true, *ct};
            } else if (tok.size() == 3) {
                const auto t = parse_ply_type(tok[1]);
                if (!t) parse_fail(path, ln, "unknown property type '" + std::string(tok[1]) + "'");
                prop = {std::string(tok[2]), *t, false, PlyType::UInt8};
            } else {
                parse_fail(path, ln, "bad property line");
            }
            elements.back().properties.push_back(prop);
        } else if (tok[0] == "end_header") {
            ended = true;
            break;
        } else {
            parse_fail(path, ln, "unexpected header keyword '" + std::string(tok[0]) + "'");
        }
    }
    if (!ended) parse_fail(path, lines.line_number(), "missing end_header");
    if (!have_format) parse_fail(path, lines.line_number(), "missing format line");

    const auto vertex_it = std::find_if(elements.begin(), elements.end(),
                                        [](const PlyElement& e) { return e.name == "vertex"; });
    if (vertex_it == elements.end()) parse_fail(path, lines.line_number(), "no vertex element");
    int slot[3] = {-1, -1, -1};
    for (std::size_t p = 0; p < vertex_it->properties.size(); ++p) {
        const auto& prop = vertex_it->properties[p];
        for (int c = 0; c < 3; ++c) {
            if (prop.name == std::string(1, static_cast<char>('x' + c))) {
                if (prop.is_list || (prop.type != PlyType::Float32 && prop.type != PlyType::Float64)) {
                    parse_fail(path, lines.line_number(),
                               "vertex coordinate '" + prop.name + "' must be float or double");
                }
                slot[c] = static_cast<int>(p);
            }
        }
    }
    if (slot[0] < 0 || slot[1] < 0 || slot[2] < 0) {
        parse_fail(path, lines.line_number(), "vertex element lacks x, y, z");
    }

    std::vector<Vec3> pts;
    pts.reserve(vertex_it->count);
    if (!binary) {
        for (const auto& el : elements) {
            const bool is_vertex = &el == &*vertex_it;
            for (std::size_t r = 0; r < el.count; ++r) {
                if (!lines.next(line)) {
                    parse_fail(path, lines.line_number() + 1,
                               "unexpected end of file in element '" + el.name + "'");
                }
                const std::size_t ln = lines.line_number();
                const auto tok = split_ws(line);
                std::size_t t = 0;
                Vec3 p{};
                for (std::size_t pi = 0; pi < el.properties.size(); ++pi) {
                    const auto& prop = el.properties[pi];
                    if (t >= tok.size()) parse_fail(path, ln, "too few values");
                    if (prop.is_list) {
                        std::size_t n = 0;
                        const auto [ptr, ec] =
                            std::from_chars(tok[t].data(), tok[t].data() + tok[t].size(), n);
                        if (ec != std::errc()) parse_fail(path, ln, "bad list count");
                        t += 1 + n;
                        continue;
                    }
                    if (is_vertex) {
                        for (int c = 0; c < 3; ++c) {
                            if (static_cast<int>(pi) != slot[c]) continue;
                            const auto v = to_double(tok[t]);
                            if (!v) parse_fail(path, ln, "not a number: '" + std::string(tok[t]) + "'");
                            if (!std::isfinite(*v)) {
                                throw ValidationError(path.string() + ":" + std::to_string(ln) +
                                                      ": non-finite coordinate");
                            }
                            p[c] = *v;
                        }
                    }
                    ++t;
                }
                if (t != tok.size()) parse_fail(path, ln, "unexpected extra values");
                if (is_vertex) pts.push_back(p);
            }
        }
    } else {
        const char* data = text.data() + lines.offset();
        const char* const end = text.data() + text.size();
        auto need = [&](std::size_t bytes, std::size_t record, const std::string& el) {
            if (static_cast<std::size_t>(end - data) < bytes) {
                throw ParseError(path.string() + ": truncated binary body in element '" + el +
                                 "' at record " + std::to_string(record));
            }
        };
        for (const auto& el : elements) {
            const bool is_vertex = &el == &*vertex_it;
            for (std::size_t r = 0; r < el.count; ++r) {
                Vec3 p{};
                for (std::size_t pi = 0; pi < el.properties.size(); ++pi) {
                    const auto& prop = el.properties[pi];
                    if (prop.is_list) {
                        need(type_size(prop.count_type), r, el.name);
                        const double n = read_scalar(prop.count_type, data);
                        data += type_size(prop.count_type);
                        const std::size_t bytes = static_cast<std::size_t>(n) * type_size(prop.type);
                        need(bytes, r, el.name);
                        data += bytes;
                        continue;
                    }
                    need(type_size(prop.type), r, el.name);
                    if (is_vertex) {
                        for (int c = 0; c < 3; ++c) {
                            if (static_cast<int>(pi) == slot[c]) p[c] = read_scalar(prop.type, data);
                        }
                    }
                    data += type_size(prop.type);
                }
                if (is_vertex) {
                    for (double c : p) {
                        if (!std::isfinite(c)) {
                            throw ValidationError(path.string() + ": non-finite coordinate at vertex " +
                                                  std::to_string(r));
                        }
                    }
                    pts.push_back(p);
                }
            }
        }
    }
    return finish(path, std::move(pts));
}

void append_number(std::string& out, double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

}  // namespace

CloudFormat parse_cloud_format(std::string_view name) {
    const std::string n = lower(name);
    if (n == "xyz" || n == "xyz-ascii") return CloudFormat::XyzAscii;
    if (n == "ply") return CloudFormat::Ply;
    if (n == "csv") return CloudFormat::Csv;
    throw ArgumentError("unknown cloud format '" + std::string(name) + "' (xyz, ply, csv)");
}

CloudFormat format_from_extension(const std::filesystem::path& path) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".ply") return CloudFormat::Ply;
    if (ext == ".csv") return CloudFormat::Csv;
    return CloudFormat::XyzAscii;
}

std::string_view to_string(CloudFormat format) noexcept {
    switch (format) {
        case CloudFormat::XyzAscii: return "xyz";
        case CloudFormat::Ply: return "ply";
        case CloudFormat::Csv: return "csv";
    }
    return "xyz";
}

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format) {
    const std::string text = read_file(path);
    switch (format) {
        case CloudFormat::XyzAscii: return load_xyz(path, text);
        case CloudFormat::Csv: return load_csv(path, text);
        case CloudFormat::Ply: return load_ply(path, text);
    }
    throw ArgumentError("unknown cloud format");
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format) {
    std::string out;
    if (format == CloudFormat::Ply) {
        out = "ply\nformat binary_little_endian 1.0\nelement vertex " +
              std::to_string(cloud.size()) +
              "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
        const std::size_t header = out.size();
        out.resize(header + cloud.size() * 3 * sizeof(double));
        char* dst = out.data() + header;
        for (const Vec3& p : cloud.points()) {
            for (double c : p) {
                if constexpr (std::endian::native == std::endian::big) {
                    auto* b = reinterpret_cast<unsigned char*>(&c);
                    std::reverse(b, b + sizeof(double));
                }
                std::memcpy(dst, &c, sizeof(double));
                dst += sizeof(double);
            }
        }
    } else {
        const char sep = format == CloudFormat::Csv ? ',' : ' ';
        if (format == CloudFormat::Csv) out = "x,y,z\n";
        out.reserve(out.size() + cloud.size() * 64);
        for (const Vec3& p : cloud.points()) {
            append_number(out, p[0]);
            out.push_back(sep);
            append_number(out, p[1]);
            out.push_back(sep);
            append_number(out, p[2]);
            out.push_back('\n');
        }
    }
    write_file(path, out);
}

LabelSet load_labels(const std::filesystem::path& path, std::size_t expected_n) {
    const std::string text = read_file(path);
    std::vector<std::uint8_t> labels;
    LineReader lines(text);
    std::string_view line;
    while (lines.next(line)) {
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        long v = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size()) {
            parse_fail(path, lines.line_number(), "not an integer label: '" + std::string(t) + "'");
        }
        if (v != 0 && v != 1) {
            throw ValidationError(path.string() + ":" + std::to_string(lines.line_number()) +
                                  ": label " + std::to_string(v) + " is not 0 or 1");
        }
        labels.push_back(static_cast<std::uint8_t>(v));
    }
    if (labels.size() != expected_n) {
        throw AlignmentError("'" + path.string() + "' has " + std::to_string(labels.size()) +
                             " labels, expected " + std::to_string(expected_n));
    }
    return LabelSet(std::move(labels));
}

void save_labels(const LabelSet& labels, const std::filesystem::path& path) {
    std::string out;
    out.reserve(labels.size() * 2);
    for (std::uint8_t v : labels.values()) {
        out.push_back(v ? '1' : '0');
        out.push_back('\n');
    }
    write_file(path, out);
}

Vec3 NormalizationTransform::apply(const Vec3& p) const {
    return (1.0 / scale) * (p - centroid);
}

Vec3 NormalizationTransform::invert(const Vec3& q) const { return scale * q + centroid; }

std::pair<PointCloud, NormalizationTransform> normalize_cloud(const PointCloud& cloud) {
    NormalizationTransform tf;
    const auto pts = cloud.points();
    if (std::all_of(pts.begin(), pts.end(), [&](const Vec3& p) { return p == pts[0]; })) {
        tf.centroid = pts[0];
        return {PointCloud(std::vector<Vec3>(pts.size(), Vec3{0.0, 0.0, 0.0})), tf};
    }
    Vec3 sum{0.0, 0.0, 0.0};
    for (const Vec3& p : cloud.points()) sum = sum + p;
    tf.centroid = (1.0 / static_cast<double>(cloud.size())) * sum;

    std::vector<Vec3> centered;
    centered.reserve(cloud.size());
    double max_r = 0.0;
    for (const Vec3& p : cloud.points()) {
        centered.push_back(p - tf.centroid);
        max_r = std::max(max_r, norm(centered.back()));
    }
    tf.scale = max_r > 0.0 ? max_r : 1.0;
    const double inv = 1.0 / tf.scale;
    for (Vec3& p : centered) p = inv * p;
    return {PointCloud(std::move(centered)), tf};
}

}  // namespace curvad
