#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grigid/point_set.hpp"
#include "grigid/similitude.hpp"

namespace grigid {

/// Parse / validation failure for `.ifs` documents. Parse errors carry
/// line/column positions; validation errors name the offending map.
struct IfsFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text,
                                                       std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline double parse_angle_field(const nlohmann::json& v, int map_index) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "0") return 0.0;
        if (s == "pi") return kPi;
        throw IfsFormatError("map " + std::to_string(map_index) +
                             ": angle string must be \"0\" or \"pi\", got \"" + s + "\"");
    }
    throw IfsFormatError("map " + std::to_string(map_index) +
                         ": angle must be a number or \"0\"/\"pi\"");
}

}  // namespace detail

struct IfsDocument {
    Ifs ifs;
    std::string name;
    std::string source;
};

/// Parses a `.ifs` document: a JSON object with optional `name`/`source`
/// and a `maps` array of {ratio, angle, translation:[x,y]}. Unknown keys
/// are rejected.
inline IfsDocument parse_ifs(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw IfsFormatError("parse error at line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ": " + e.what());
    }
    if (!doc.is_object()) throw IfsFormatError("document must be a JSON object");
    std::string name, source;
    for (const auto& [key, value] : doc.items()) {
        if (key == "name") {
            name = value.get<std::string>();
        } else if (key == "source") {
            source = value.get<std::string>();
        } else if (key == "maps") {
            // handled below
        } else {
            throw IfsFormatError("unknown key \"" + key + "\"");
        }
    }
    if (!doc.contains("maps") || !doc["maps"].is_array() || doc["maps"].empty())
        throw IfsFormatError("document must contain a nonempty \"maps\" array");

    std::vector<Similitude> maps;
    int index = 0;
    for (const auto& m : doc["maps"]) {
        ++index;
        if (!m.is_object())
            throw IfsFormatError("map " + std::to_string(index) + ": must be an object");
        for (const auto& [key, value] : m.items()) {
            (void)value;
            if (key != "ratio" && key != "angle" && key != "translation")
                throw IfsFormatError("map " + std::to_string(index) + ": unknown key \"" +
                                     key + "\"");
        }
        for (const char* required : {"ratio", "angle", "translation"})
            if (!m.contains(required))
                throw IfsFormatError("map " + std::to_string(index) + ": missing key \"" +
                                     std::string(required) + "\"");
        if (!m["ratio"].is_number())
            throw IfsFormatError("map " + std::to_string(index) + ": ratio must be a number");
        const double ratio = m["ratio"].get<double>();
        if (!(ratio > 0.0 && ratio < 1.0))
            throw IfsFormatError("map " + std::to_string(index) +
                                 ": ratio must lie strictly inside (0,1), got " +
                                 detail::format17(ratio));
        const double angle = detail::parse_angle_field(m["angle"], index);
        const auto& tr = m["translation"];
        if (!tr.is_array() || tr.size() != 2 || !tr[0].is_number() || !tr[1].is_number())
            throw IfsFormatError("map " + std::to_string(index) +
                                 ": translation must be a [x, y] number pair");
        maps.emplace_back(ratio, angle, Vec2{tr[0].get<double>(), tr[1].get<double>()});
    }
    return {Ifs(std::move(maps)), std::move(name), std::move(source)};
}

inline IfsDocument load_ifs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IfsFormatError("cannot open IFS file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ifs(buf.str());
}

/// Serialization with 17 significant digits; parse(serialize(x)) reproduces
/// every field bit-exactly.
inline std::string serialize_ifs(const Ifs& ifs, const std::string& name = "",
                                 const std::string& source = "") {
    std::ostringstream out;
    out << "{\n";
    if (!name.empty()) out << "  \"name\": " << nlohmann::json(name).dump() << ",\n";
    if (!source.empty()) out << "  \"source\": " << nlohmann::json(source).dump() << ",\n";
    out << "  \"maps\": [\n";
    for (std::size_t i = 0; i < ifs.maps().size(); ++i) {
        const Similitude& s = ifs.maps()[i];
        out << "    {\"ratio\": " << detail::format17(s.ratio)
            << ", \"angle\": " << detail::format17(s.angle) << ", \"translation\": ["
            << detail::format17(s.translation.x) << ", " << detail::format17(s.translation.y)
            << "]}" << (i + 1 < ifs.maps().size() ? "," : "") << '\n';
    }
    out << "  ]\n}\n";
    return out.str();
}

}  // namespace grigid
