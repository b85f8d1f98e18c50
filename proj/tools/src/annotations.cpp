#include "glyphguide_cli/annotations.hpp"

#include <cmath>
#include <fstream>

#include "glyphguide/errors.hpp"

namespace glyphguide::cli {

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& path, const std::string& what) {
    throw ParseError(source + ": " + path + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& source, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(source, path, std::string("missing field \"") + key + "\"");
    return *it;
}

int dimension(const json& obj, const char* key, const std::string& source) {
    const json& v = field(obj, key, source, key);
    if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 0xFFFFFFFFll)
        fail(source, key, "expected a non-negative integer");
    return static_cast<int>(v.get<long long>());
}

struct RawWord {
    std::vector<Point> vertices;
    std::string text;
};

std::vector<RawWord> raw_words(const json& j, const std::string& source, int& width, int& height) {
    if (!j.is_object()) fail(source, "$", "expected an object");
    width = dimension(j, "width", source);
    height = dimension(j, "height", source);
    const json& words = field(j, "words", source, "$");
    if (!words.is_array()) fail(source, "words", "expected an array");
    std::vector<RawWord> out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::string at = "words[" + std::to_string(i) + "]";
        const json& w = words[i];
        if (!w.is_object()) fail(source, at, "expected an object");
        const json& poly = field(w, "poly", source, at);
        if (!poly.is_array()) fail(source, at + ".poly", "expected an array of [x, y]");
        RawWord word;
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const json& p = poly[k];
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                fail(source, at + ".poly[" + std::to_string(k) + "]", "expected [x, y]");
            word.vertices.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        const json& text = field(w, "text", source, at);
        if (!text.is_string()) fail(source, at + ".text", "expected a string");
        word.text = text.get<std::string>();
        out.push_back(std::move(word));
    }
    return out;
}

Polygon make_polygon(std::vector<Point> vertices, const std::string& source, const std::string& at) {
    try {
        return Polygon(std::move(vertices));
    } catch (const ValidationError& e) {
        fail(source, at + ".poly", e.what());
    }
}

json coordinate(double v) {
    if (v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
    return v;
}

}  // namespace

AuxPayload payload_from_json(const json& j, const std::string& source) {
    int width = 0, height = 0;
    std::vector<RawWord> words = raw_words(j, source, width, height);
    AuxPayload payload;
    payload.image_width = static_cast<std::uint32_t>(width);
    payload.image_height = static_cast<std::uint32_t>(height);
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::string at = "words[" + std::to_string(i) + "]";
        AuxRecord r{make_polygon(std::move(words[i].vertices), source, at), std::move(words[i].text)};
        try {
            validate(r);
        } catch (const ValidationError& e) {
            fail(source, at, e.what());
        }
        payload.records.push_back(std::move(r));
    }
    return payload;
}

json payload_to_json(const AuxPayload& payload) {
    json words = json::array();
    for (const AuxRecord& r : payload.records) {
        json poly = json::array();
        for (const Point& p : r.polygon.vertices()) poly.push_back({coordinate(p.x), coordinate(p.y)});
        words.push_back({{"poly", std::move(poly)}, {"text", r.text}});
    }
    return {{"width", payload.image_width}, {"height", payload.image_height}, {"words", std::move(words)}};
}

Spotting spotting_from_json(const json& j, const std::string& source) {
    Spotting s;
    std::vector<RawWord> words = raw_words(j, source, s.width, s.height);
    for (std::size_t i = 0; i < words.size(); ++i)
        s.words.push_back({make_polygon(std::move(words[i].vertices), source, "words[" + std::to_string(i) + "]"),
                           std::move(words[i].text)});
    return s;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": invalid JSON at byte " + std::to_string(e.byte));
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot write file");
    out << j.dump(2) << '\n';
    if (!out) throw Error(path + ": write failed");
}

}  // namespace glyphguide::cli
