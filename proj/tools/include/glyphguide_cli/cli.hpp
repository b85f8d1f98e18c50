#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace glyphguide::cli {

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit code: 0 on success, 1 on a runtime failure and 2 on a usage
/// error. Failures print one "error: ..." line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct DemoOptions {
    std::filesystem::path image;
    std::filesystem::path annotations;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> params;
    int stride = 4;
    double gain = 12.0;
    double threshold = 800.0;
    std::uint64_t seed = 0;
};

/// Writes decoded.ppm, guidance.ppm, fused.ppm, image.tbic, aux.tbax and
/// metrics.json into out_dir.
void run_demo(const DemoOptions& opts);

}  // namespace glyphguide::cli
