#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "glyphguide/aux_stream.hpp"
#include "glyphguide/metrics.hpp"

namespace glyphguide::cli {

using nlohmann::json;

/// Annotation JSON:
///
///   {"width": W, "height": H,
///    "words": [{"poly": [[x, y], ...], "text": "..."}, ...]}
///
/// Errors are ParseError with `source` and the offending path, e.g.
/// "scene.json: words[3].poly[1]: expected [x, y]".
AuxPayload payload_from_json(const json& j, const std::string& source);
/// Canonical form; integral coordinates are written as integers.
json payload_to_json(const AuxPayload& payload);

/// Spotting results share the annotation schema; coordinates may be real.
struct Spotting {
    int width = 0;
    int height = 0;
    SpottingResult words;
};
Spotting spotting_from_json(const json& j, const std::string& source);

json read_json_file(const std::string& path);
/// Pretty-printed with two-space indent and a trailing newline.
void write_json_file(const std::string& path, const json& j);

}  // namespace glyphguide::cli
