#include "glyphguide_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "glyphguide/aux_stream.hpp"
#include "glyphguide/errors.hpp"
#include "glyphguide/fusion.hpp"
#include "glyphguide/guidance.hpp"
#include "glyphguide/metrics.hpp"
#include "glyphguide/synth.hpp"
#include "glyphguide/toy_codec.hpp"
#include "glyphguide/training.hpp"
#include "glyphguide_cli/annotations.hpp"

namespace glyphguide::cli {

namespace fs = std::filesystem;

namespace {

// Flat JSON object -> option values of the invoked subcommand. Nested
// values are rejected.
class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(const CLI::App* root) : root_(root) {}

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        try {
            j = json::parse(input);
        } catch (const json::parse_error& e) {
            throw CLI::ConversionError("config: invalid JSON at byte " + std::to_string(e.byte));
        }
        if (!j.is_object()) throw CLI::ConversionError("config: expected a JSON object");
        std::vector<std::string> parents;
        for (const CLI::App* app = root_; !app->get_subcommands().empty();) {
            app = app->get_subcommands().front();
            parents.push_back(app->get_name());
        }
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_string()) item.inputs = {value.get<std::string>()};
            else if (value.is_boolean()) item.inputs = {value.get<bool>() ? "true" : "false"};
            else if (value.is_number()) item.inputs = {value.dump()};
            else throw CLI::ConversionError("config: value of \"" + key + "\" must be a string, number or bool");
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    const CLI::App* root_;
};

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(path.string() + ": cannot open file");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path.string() + ": cannot write file");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(path.string() + ": write failed");
}

// Prefixes errors with the file they came from.
template <class F>
auto with_source(const fs::path& path, F&& f) {
    try {
        return f();
    } catch (const DecodeError& e) {
        throw DecodeError(path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        const std::string what = e.what();
        if (what.starts_with(path.string())) throw;
        throw ParseError(path.string() + ": " + what);
    }
}

Image load_image(const fs::path& path) {
    return with_source(path, [&] { return read_ppm(read_bytes(path)); });
}

void save_image(const fs::path& path, const Image& img) { write_bytes(path, write_ppm(img)); }

AuxPayload load_annotations(const fs::path& path) {
    return payload_from_json(read_json_file(path.string()), path.string());
}

FusionParams load_params(const std::optional<fs::path>& path, std::uint64_t seed) {
    if (!path) return init_identity(seed);
    return with_source(*path, [&] { return FusionParams::from_named(ad::load_tensors(read_bytes(*path))); });
}

// Shortest round-trip text for a double; "inf" / "nan" spelled out.
std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    for (int precision = 6; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

// JSON has no infinity; identical images report null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Mask mask_of(const AuxPayload& payload, int height, int width) {
    std::vector<Polygon> polys;
    for (const AuxRecord& r : payload.records) polys.push_back(r.polygon);
    return rasterize_mask(polys, height, width);
}

std::vector<std::pair<fs::path, fs::path>> list_scenes(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(dir.string() + ": not a directory");
    std::vector<std::pair<fs::path, fs::path>> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".ppm") continue;
        fs::path ann = entry.path();
        ann.replace_extension(".json");
        if (!fs::exists(ann)) throw Error(entry.path().string() + ": missing annotations " + ann.string());
        out.emplace_back(entry.path(), ann);
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw Error(dir.string() + ": no .ppm scenes found");
    return out;
}

std::string scene_stem(int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%04d", i);
    return buf;
}

void print_report(std::ostream& out, const F1Report& r) {
    out << std::left << std::setw(6) << "task" << std::right << std::setw(11) << "precision" << std::setw(11)
        << "recall" << std::setw(11) << "f1" << std::setw(6) << "tp" << '\n';
    for (const auto& [name, s] : {std::pair<const char*, const Scores&>{"DET", r.det}, {"E2E", r.e2e}})
        out << std::left << std::setw(6) << name << std::right << std::fixed << std::setprecision(4)
            << std::setw(11) << s.precision << std::setw(11) << s.recall << std::setw(11) << s.f1 << std::setw(6)
            << s.true_positives << '\n';
    out.unsetf(std::ios::fixed);
}

json report_json(const F1Report& r) {
    const auto scores = [](const Scores& s) {
        return json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"tp", s.true_positives}};
    };
    json matches = json::array();
    for (const Match& m : r.matches)
        matches.push_back({{"pred", m.pred}, {"gt", m.gt}, {"iou", m.iou}, {"transcript_match", m.transcript_match}});
    return {{"det", scores(r.det)}, {"e2e", scores(r.e2e)}, {"matches", std::move(matches)}};
}

struct Common {
    std::uint64_t seed = 0;
};

CLI::App* command(CLI::App& parent, const std::string& name, const std::string& help, Common& common) {
    CLI::App* sub = parent.add_subcommand(name, help);
    sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    sub->allow_config_extras(CLI::config_extras_mode::error);
    return sub;
}

}  // namespace

void run_demo(const DemoOptions& opts) {
    const Image original = load_image(opts.image);
    const AuxPayload all = load_annotations(opts.annotations);
    if (all.image_width != static_cast<std::uint32_t>(original.width()) ||
        all.image_height != static_cast<std::uint32_t>(original.height()))
        throw ValidationError("demo: annotation canvas " + std::to_string(all.image_width) + "x" +
                              std::to_string(all.image_height) + " does not match image " +
                              std::to_string(original.width()) + "x" + std::to_string(original.height()));
    const FusionParams params = load_params(opts.params, opts.seed);
    fs::create_directories(opts.out_dir);

    const CodedImage coded = compress(original, opts.stride, opts.gain);
    const std::vector<std::uint8_t> coded_bytes = coded.to_bytes();
    const Image decoded = decompress(CodedImage::from_bytes(coded_bytes));

    const AuxPayload kept = filter_records(all, FilterConfig{opts.threshold});
    const std::vector<std::uint8_t> aux = transmit_aux(kept);
    const AuxPayload received = receive_aux(aux, all.image_width, all.image_height);
    const GuidanceMap guidance = render_guidance(received, original.height(), original.width());
    const Image fused = fuse_image(decoded, guidance.to_image(), params);

    write_bytes(opts.out_dir / "image.tbic", coded_bytes);
    write_bytes(opts.out_dir / "aux.tbax", aux);
    save_image(opts.out_dir / "decoded.ppm", decoded);
    save_image(opts.out_dir / "guidance.ppm", guidance.to_image());
    save_image(opts.out_dir / "fused.ppm", fused);

    const Mask text = mask_of(received, original.height(), original.width());
    const double bpp_image = coded.bpp();
    const double bpp_aux = aux_bpp(aux, original.height(), original.width());
    json metrics = {
        {"width", original.width()},
        {"height", original.height()},
        {"stride", opts.stride},
        {"gain", opts.gain},
        {"threshold", opts.threshold},
        {"words_total", all.records.size()},
        {"words_kept", kept.records.size()},
        {"image_bytes", coded_bytes.size()},
        {"aux_bytes", aux.size()},
        {"bpp_image", bpp_image},
        {"bpp_aux", bpp_aux},
        {"bpp_total", total_bpp(coded, aux)},
        {"psnr_decoded", finite_or_null(psnr(original, decoded))},
        {"psnr_fused", finite_or_null(psnr(original, fused))},
        {"masked_psnr_decoded", finite_or_null(masked_psnr(original, decoded, text))},
        {"masked_psnr_fused", finite_or_null(masked_psnr(original, fused, text))},
        {"text_pixels", text.count()},
    };
    if (ms_ssim_scales(original.height(), original.width()) > 0) {
        metrics["ms_ssim_decoded"] = ms_ssim(original, decoded);
        metrics["ms_ssim_fused"] = ms_ssim(original, fused);
    }
    write_json_file((opts.out_dir / "metrics.json").string(), metrics);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Text-guided image compression toolkit", "glyphguide"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.fallthrough();
    app.config_formatter(std::make_shared<JsonConfig>(&app));
    app.set_config("--config", "", "JSON file with option values for the command (command-line flags win)");
    app.allow_config_extras(CLI::config_extras_mode::error);
    Common common;

    // aux
    CLI::App* aux = app.add_subcommand("aux", "Auxiliary OCR stream (TBAX)");
    aux->require_subcommand(1);
    fs::path aux_in, aux_out;
    double threshold = kTrainThreshold;
    CLI::App* pack = command(*aux, "pack", "Filter annotations and encode them", common);
    pack->add_option("input", aux_in, "Annotation JSON")->required();
    pack->add_option("output", aux_out, "TBAX file")->required();
    pack->add_option("--threshold", threshold, "Keep words with average character area <= T (px^2)");
    CLI::App* unpack = command(*aux, "unpack", "Decode a TBAX file to annotation JSON", common);
    unpack->add_option("input", aux_in, "TBAX file")->required();
    unpack->add_option("output", aux_out, "Annotation JSON")->required();
    std::vector<fs::path> stat_in;
    CLI::App* stat = command(*aux, "stat", "Report filtering and stream size for annotations", common);
    stat->add_option("inputs", stat_in, "Annotation JSON files (several give per-image and corpus figures)")
        ->required();
    stat->add_option("--threshold", threshold, "Keep words with average character area <= T (px^2)");

    // codec
    CLI::App* codec = app.add_subcommand("codec", "Toy image codec (TBIC)");
    codec->require_subcommand(1);
    fs::path codec_in, codec_out;
    int stride = 4;
    double gain = 12.0;
    CLI::App* enc = command(*codec, "compress", "Encode a PPM", common);
    enc->add_option("input", codec_in, "PPM image")->required();
    enc->add_option("output", codec_out, "TBIC file")->required();
    enc->add_option("--stride", stride, "Downsampling stride (2, 4 or 8)");
    enc->add_option("--gain", gain, "Latent gain Q");
    CLI::App* dec = command(*codec, "decompress", "Decode a TBIC file", common);
    dec->add_option("input", codec_in, "TBIC file")->required();
    dec->add_option("output", codec_out, "PPM image")->required();

    // render
    fs::path render_in, render_out;
    std::optional<double> render_threshold;
    CLI::App* render = command(app, "render", "Render the guidance map of an annotation file", common);
    render->add_option("input", render_in, "Annotation JSON")->required();
    render->add_option("output", render_out, "Guidance PPM")->required();
    render->add_option("--threshold", render_threshold, "Filter before rendering");

    // fuse
    fs::path fuse_decoded, fuse_guidance, fuse_out;
    std::optional<fs::path> params_path;
    CLI::App* fuse_cmd = command(app, "fuse", "Fuse a decoded image with a guidance map", common);
    fuse_cmd->add_option("decoded", fuse_decoded, "Decoded PPM")->required();
    fuse_cmd->add_option("guidance", fuse_guidance, "Guidance PPM")->required();
    fuse_cmd->add_option("output", fuse_out, "Fused PPM")->required();
    fuse_cmd->add_option("--params", params_path, "TBWT weights (identity initialization if absent)");

    // synth
    fs::path synth_dir;
    int synth_count = 1;
    SynthConfig synth_cfg;
    CLI::App* synth = command(app, "synth", "Generate synthetic text scenes", common);
    synth->add_option("out_dir", synth_dir, "Output directory")->required();
    synth->add_option("--count", synth_count, "Number of scenes")->check(CLI::PositiveNumber);
    synth->add_option("--width", synth_cfg.width, "Scene width");
    synth->add_option("--height", synth_cfg.height, "Scene height");

    // train
    TrainConfig train_cfg;
    std::optional<fs::path> train_data;
    int train_scenes = 200;
    fs::path train_out = "params.tbwt", train_history = "history.csv";
    CLI::App* train = command(app, "train", "Stage-2 fine-tuning of the fusion block", common);
    train->add_option("--data", train_data, "Directory of scene_*.ppm/.json (synthesized if absent)");
    train->add_option("--scenes", train_scenes, "Synthetic scene count when --data is absent")
        ->check(CLI::PositiveNumber);
    train->add_option("--out", train_out, "TBWT output");
    train->add_option("--history", train_history, "CSV loss history");
    train->add_option("--alpha", train_cfg.alpha, "Guidance-consistent loss weight");
    train->add_option("--lambda", train_cfg.lambda, "Rate-distortion weight");
    train->add_option("--lr", train_cfg.lr, "Adam learning rate");
    train->add_option("--epochs", train_cfg.epochs, "Epochs");
    train->add_option("--batch", train_cfg.batch, "Crops per update");
    train->add_option("--crop", train_cfg.crop, "Crop size");
    train->add_option("--threshold", train_cfg.t_train, "Training filter threshold T");
    train->add_option("--stride", train_cfg.stride, "Codec stride");
    train->add_option("--gain", train_cfg.gain, "Codec gain");
    train->add_flag("--all-boxes", train_cfg.use_all_boxes, "Loss mask from every box, not only kept ones");

    // eval
    CLI::App* eval = app.add_subcommand("eval", "Quality and spotting metrics");
    eval->require_subcommand(1);
    fs::path eval_a, eval_b;
    std::optional<fs::path> eval_json;
    MatchConfig match_cfg;
    CLI::App* eval_psnr = command(*eval, "psnr", "PSNR between two PPMs", common);
    eval_psnr->add_option("a", eval_a)->required();
    eval_psnr->add_option("b", eval_b)->required();
    CLI::App* eval_ssim = command(*eval, "msssim", "MS-SSIM between two PPMs", common);
    eval_ssim->add_option("a", eval_a)->required();
    eval_ssim->add_option("b", eval_b)->required();
    CLI::App* eval_f1 = command(*eval, "f1", "DET/E2E precision, recall and F1", common);
    eval_f1->add_option("pred", eval_a, "Predicted spotting JSON")->required();
    eval_f1->add_option("gt", eval_b, "Ground-truth JSON")->required();
    eval_f1->add_option("--iou", match_cfg.iou_threshold, "IoU threshold");
    eval_f1->add_flag("--strict", match_cfg.strict_transcripts, "Case-sensitive, untrimmed transcripts");
    eval_f1->add_option("--json", eval_json, "Also write the report as JSON");

    // demo
    DemoOptions demo_opts;
    CLI::App* demo = command(app, "demo", "Full pipeline on one image", common);
    demo->add_option("image", demo_opts.image, "Input PPM")->required();
    demo->add_option("annotations", demo_opts.annotations, "Annotation JSON")->required();
    demo->add_option("--out-dir", demo_opts.out_dir, "Output directory")->required();
    demo->add_option("--params", demo_opts.params, "TBWT weights (identity initialization if absent)");
    demo->add_option("--stride", demo_opts.stride, "Codec stride");
    demo->add_option("--gain", demo_opts.gain, "Codec gain");
    demo->add_option("--threshold", demo_opts.threshold, "Evaluation filter threshold T");

    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << msg << '\n';
        return 2;
    }

    try {
        if (pack->parsed()) {
            const AuxPayload kept = filter_records(load_annotations(aux_in), FilterConfig{threshold});
            write_bytes(aux_out, encode_aux(kept));
        } else if (unpack->parsed()) {
            const AuxPayload payload = with_source(aux_in, [&] { return decode_aux(read_bytes(aux_in)); });
            write_json_file(aux_out.string(), payload_to_json(payload));
        } else if (stat->parsed()) {
            struct Row {
                std::string name;
                std::size_t records, kept, body, sent;
                double pixels;
            };
            std::vector<Row> rows;
            for (const fs::path& in : stat_in) {
                const AuxPayload all = load_annotations(in);
                const AuxPayload kept = filter_records(all, FilterConfig{threshold});
                rows.push_back({in.filename().string(), all.records.size(), kept.records.size(),
                                serialize_aux_body(kept).size(), transmit_aux(kept).size(),
                                static_cast<double>(all.image_height) * all.image_width});
            }
            const auto bpp = [](std::size_t bytes, double pixels) {
                return pixels > 0 ? num(8.0 * static_cast<double>(bytes) / pixels) : std::string("n/a");
            };
            if (rows.size() == 1) {
                const Row& r = rows.front();
                out << "records " << r.records << '\n'
                    << "kept " << r.kept << '\n'
                    << "dropped " << r.records - r.kept << '\n'
                    << "body_bytes " << r.body << '\n'
                    << "stream_bytes " << r.sent << '\n'
                    << "aux_bpp " << bpp(r.sent, r.pixels) << '\n';
            } else {
                std::size_t records = 0, kept = 0, sent = 0;
                double pixels = 0.0, mean = 0.0;
                out << "file records kept stream_bytes aux_bpp\n";
                for (const Row& r : rows) {
                    out << r.name << ' ' << r.records << ' ' << r.kept << ' ' << r.sent << ' ' << bpp(r.sent, r.pixels)
                        << '\n';
                    records += r.records;
                    kept += r.kept;
                    sent += r.sent;
                    pixels += r.pixels;
                    if (r.pixels > 0) mean += 8.0 * static_cast<double>(r.sent) / r.pixels / static_cast<double>(rows.size());
                }
                out << "images " << rows.size() << '\n'
                    << "records " << records << '\n'
                    << "kept " << kept << '\n'
                    << "stream_bytes " << sent << '\n'
                    << "mean_image_aux_bpp " << num(mean) << '\n'
                    << "corpus_aux_bpp " << bpp(sent, pixels) << '\n';
            }
        } else if (enc->parsed()) {
            const CodedImage coded = compress(load_image(codec_in), stride, gain);
            write_bytes(codec_out, coded.to_bytes());
            out << "bytes " << coded.byte_size() << '\n' << "bpp " << num(coded.bpp()) << '\n';
        } else if (dec->parsed()) {
            const auto bytes = read_bytes(codec_in);
            const CodedImage coded = with_source(codec_in, [&] { return CodedImage::from_bytes(bytes); });
            save_image(codec_out, with_source(codec_in, [&] { return decompress(coded); }));
            out << "width " << coded.width << '\n' << "height " << coded.height << '\n'
                << "bytes " << bytes.size() << '\n' << "bpp " << num(coded.bpp()) << '\n';
        } else if (render->parsed()) {
            AuxPayload payload = load_annotations(render_in);
            if (render_threshold) payload = filter_records(payload, FilterConfig{*render_threshold});
            const GuidanceMap map = render_guidance(payload, static_cast<int>(payload.image_height),
                                                    static_cast<int>(payload.image_width));
            save_image(render_out, map.to_image());
        } else if (fuse_cmd->parsed()) {
            const Image decoded = load_image(fuse_decoded);
            const Image guidance = load_image(fuse_guidance);
            save_image(fuse_out, fuse_image(decoded, guidance, load_params(params_path, common.seed)));
        } else if (synth->parsed()) {
            fs::create_directories(synth_dir);
            const auto scenes = synth_dataset(synth_count, common.seed, synth_cfg);
            for (std::size_t i = 0; i < scenes.size(); ++i) {
                const std::string stem = scene_stem(static_cast<int>(i));
                save_image(synth_dir / (stem + ".ppm"), scenes[i].image);
                write_json_file((synth_dir / (stem + ".json")).string(), payload_to_json(scenes[i].annotations));
            }
        } else if (train->parsed()) {
            train_cfg.seed = common.seed;
            std::vector<SynthScene> data;
            if (train_data) {
                for (const auto& [img, ann] : list_scenes(*train_data))
                    data.push_back({load_image(img), load_annotations(ann)});
            } else {
                data = synth_dataset(train_scenes, common.seed);
            }
            std::ofstream history(train_history, std::ios::binary);
            if (!history) throw Error(train_history.string() + ": cannot write file");
            history << "epoch,mean_loss\n";
            const TrainResult result =
                train_stage2(data, init_identity(common.seed), train_cfg, [&](int epoch, double loss) {
                    history << epoch << ',' << num(loss) << '\n' << std::flush;
                    out << "epoch " << epoch << " loss " << num(loss) << '\n' << std::flush;
                });
            write_bytes(train_out, ad::save_tensors(result.params.to_named()));
        } else if (eval_psnr->parsed()) {
            out << num(psnr(load_image(eval_a), load_image(eval_b))) << '\n';
        } else if (eval_ssim->parsed()) {
            out << num(ms_ssim(load_image(eval_a), load_image(eval_b))) << '\n';
        } else if (eval_f1->parsed()) {
            const Spotting pred = spotting_from_json(read_json_file(eval_a.string()), eval_a.string());
            const Spotting gt = spotting_from_json(read_json_file(eval_b.string()), eval_b.string());
            if (pred.width != gt.width || pred.height != gt.height)
                throw ValidationError("eval f1: prediction and ground-truth canvases differ");
            const F1Report report = f1_report(pred.words, gt.words, gt.height, gt.width, match_cfg);
            print_report(out, report);
            if (eval_json) write_json_file(eval_json->string(), report_json(report));
        } else if (demo->parsed()) {
            demo_opts.seed = common.seed;
            run_demo(demo_opts);
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << msg << '\n';
        return 1;
    }
    return 0;
}

}  // namespace glyphguide::cli
