// bwtex: command-line front end for rendering, presets, lint, study material,
// log analysis, the HTTP service and the shipped asset tree.

#include "bwtex/png.hpp"
#include "bwtex/presets.hpp"
#include "bwtex/service.hpp"
#include "bwtex/stats.hpp"
#include "bwtex/study.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace bwtex;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    out << text;
}

/// Shipped assets when present, compiled-in definitions otherwise.
PresetLibrary library() {
    const auto dir = assets_dir();
    if (fs::exists(dir / "presets")) return PresetLibrary::load(dir);
    return PresetLibrary::builtin();
}

int exit_code(ErrorCode code) {
    return code == ErrorCode::IoError || code == ErrorCode::RenderFailure ? kExitFailure : kExitInvalid;
}

std::vector<TextureSpec> textures_from_any(const Json& j) {
    std::vector<TextureSpec> out;
    const auto take = [&](const Json& arr) {
        if (!arr.is_array()) fail(ErrorCode::ParseError, "expected an array of textures");
        for (const auto& t : arr) out.push_back(texture_from_json(t));
    };
    if (j.is_array()) {
        take(j);
    } else if (j.is_object() && j.contains("textures")) {
        take(j["textures"]);
    } else if (j.is_object() && j.contains("categories")) {
        for (const auto& c : chart_from_json(j).categories)
            if (const auto* t = std::get_if<TextureSpec>(&c.fill)) out.push_back(*t);
    } else {
        fail(ErrorCode::ParseError, "expected a texture array, a preset set or a chart");
    }
    return out;
}

struct RenderArgs {
    std::string spec, preset, chart = "bar", data, out = "-", png, selected;
    double scale = kDefaultPngScale;
    std::optional<std::uint64_t> seed;
};

int run_render(const RenderArgs& a) {
    const auto lib = library();
    if (a.spec.empty() == a.preset.empty()) fail(ErrorCode::InvalidSpec, "give exactly one of --spec or --preset");
    ChartSpec chart;
    if (!a.spec.empty()) {
        chart = chart_from_json(parse_json(read_text(a.spec)));
    } else if (lib.find_set(a.preset) || a.preset == "unicolor") {
        chart = lib.chart_from_set(a.preset, parse_chart_kind(a.chart));
    } else {
        chart = lib.winner(a.preset).chart;
    }
    if (a.seed)
        for (auto& c : chart.categories)
            if (auto* t = std::get_if<TextureSpec>(&c.fill)) t->seed = *a.seed;
    const Dataset data = a.data.empty() ? lib.default_dataset : dataset_from_json(parse_json(read_text(a.data)));
    RenderOptions opts;
    opts.glyphs = &lib.glyphs;
    if (!a.selected.empty()) opts.selected = a.selected;
    const Scene scene = build_chart_scene(chart, data, opts);
    for (const auto& w : scene.warnings) std::cerr << "warning: " << w << "\n";
    write_text(a.out, to_svg(scene));
    if (!a.png.empty()) write_png(a.png, rasterize_scene(scene, a.scale));
    return 0;
}

int run_presets_list() {
    const auto lib = library();
    for (const auto& s : lib.sets) std::cout << s.id << "\t" << to_string(s.kind) << "\n";
    for (const auto& w : lib.winners) std::cout << w.id << "\t" << to_string(w.chart.kind) << "\n";
    return 0;
}

int run_presets_show(const std::string& id) {
    const auto lib = library();
    if (const auto* s = lib.find_set(id)) {
        std::cout << PresetLibrary::preset_to_json(*s).dump(2) << "\n";
        return 0;
    }
    std::cout << to_json(lib.winner(id).chart).dump(2) << "\n";
    return 0;
}

int run_lint(const std::string& path, const LintOptions& opts) {
    const auto lib = library();
    const auto specs = textures_from_any(parse_json(read_text(path)));
    for (const auto& t : specs) validate(t, lib.glyphs);
    const auto report = lint_texture_set(specs, opts, lib.glyphs);
    std::cout << to_json(report).dump(2) << "\n";
    return 0;
}

struct StudyArgs {
    std::uint64_t seed = 0;
    std::string chart = "bar", out;
    int training = 0;
    bool png = false;
    double scale = kDefaultPngScale;
};

int run_gen_datasets(const StudyArgs& a) {
    Json arr = Json::array();
    for (const auto& d : generate_datasets(a.seed)) arr.push_back(to_json(d));
    write_text(a.out, Json{{"seed", a.seed}, {"datasets", arr}}.dump(2) + "\n");
    return 0;
}

int run_gen_schedule(const StudyArgs& a) {
    const auto kind = parse_chart_kind(a.chart);
    Json trials = Json::array(), training = Json::array();
    for (const auto& t : build_trial_schedule(a.seed, kind)) trials.push_back(to_json(t));
    std::vector<StudyDataset> practice_sets;
    for (const auto& t : build_training_trials(a.seed, kind, a.training, &practice_sets)) training.push_back(to_json(t));
    Json out{{"seed", a.seed}, {"chart", a.chart}, {"trials", trials}};
    if (a.training > 0) {
        Json sets = Json::array();
        for (const auto& d : practice_sets) sets.push_back(to_json(d));
        out["training"] = training;
        out["training_datasets"] = sets;
    }
    write_text(a.out, out.dump(2) + "\n");
    return 0;
}

int run_export_stimuli(const StudyArgs& a) {
    if (a.out.empty()) fail(ErrorCode::InvalidSpec, "--out directory is required");
    const auto lib = library();
    const auto kind = parse_chart_kind(a.chart);
    const auto datasets = generate_datasets(a.seed);
    const auto schedule = build_trial_schedule(a.seed, kind, datasets);
    SceneWriter extra;
    if (a.png) {
        const double scale = a.scale;
        extra = [scale](const fs::path& stem, const Scene& scene) {
            write_png(fs::path(stem.string() + ".png"), rasterize_scene(scene, scale));
        };
    }
    const auto m = export_stimuli(schedule, datasets, a.out, lib, extra);
    Json sets = Json::array();
    for (const auto& d : datasets) sets.push_back(to_json(d));
    write_text((fs::path(a.out) / "datasets.json").string(), sets.dump(2) + "\n");
    std::cerr << m.stimuli.size() << " images, " << m.trial_files.size() << " trials\n";
    return 0;
}

struct AnalyzeArgs {
    std::string input, policy = "refined", report, intervals;
    ExclusionPolicy exclusion;
    ReportOptions options;
    bool skip_validation = false;
};

template <typename Row>
bool report_violations(const std::vector<Row>& rows) {
    bool blocking = false;
    for (const auto& v : validate_log(rows)) {
        std::cerr << (v.warning ? "warning: " : "error: ") << v.code << " " << v.participant_id << " " << v.message
                  << "\n";
        blocking = blocking || !v.warning;
    }
    return blocking;
}

int finish_report(const AnalyzeArgs& a, const Json& report) {
    write_text(a.report, report.dump(2) + "\n");
    if (!a.intervals.empty()) write_text(a.intervals, intervals_csv(report));
    return 0;
}

int run_analyze_trials(const AnalyzeArgs& a) {
    const auto rows = trials_from_csv(read_text(a.input));
    if (!a.skip_validation && report_violations(rows)) return kExitInvalid;
    const auto summary = summarize_trials(rows, a.exclusion, parse_policy_variant(a.policy));
    return finish_report(a, trials_report(summary, a.options));
}

int run_analyze_ratings(const AnalyzeArgs& a) {
    const auto rows = ratings_from_csv(read_text(a.input));
    if (!a.skip_validation && report_violations(rows)) return kExitInvalid;
    return finish_report(a, ratings_report(rows, a.options));
}

int run_validate(const std::string& kind, const std::string& path) {
    Json arr = Json::array();
    bool blocking = false;
    const auto collect = [&](const auto& violations) {
        for (const auto& v : violations) {
            arr.push_back(to_json(v));
            blocking = blocking || !v.warning;
        }
    };
    if (kind == "trials") collect(validate_log(trials_from_csv(read_text(path))));
    else collect(validate_log(ratings_from_csv(read_text(path))));
    std::cout << arr.dump(2) << "\n";
    return blocking ? kExitInvalid : 0;
}

int run_serve(const std::string& host, int port) {
    static const PresetLibrary lib = library();
    SessionStore store(std::chrono::minutes(30), SessionStore::Clock::now, lib);
    httplib::Server server;
    install_routes(server, store, lib);
    std::cerr << "listening on http://" << host << ":" << port << "\n";
    if (!server.listen(host, port)) fail(ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port));
    return 0;
}

int run_assets_export(const std::string& dir) {
    PresetLibrary::builtin().export_to(dir.empty() ? assets_dir() : fs::path(dir));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Black-and-white texture charts: render, presets, study material and analysis"};
    app.require_subcommand(1);
    std::function<int()> action;

    RenderArgs render;
    auto* cmd = app.add_subcommand("render", "Render a chart to SVG (and optionally PNG)");
    cmd->add_option("--spec", render.spec, "Chart spec JSON file");
    cmd->add_option("--preset", render.preset, "Preset set or winner id instead of --spec");
    cmd->add_option("--chart", render.chart, "Chart kind for a preset set")->check(CLI::IsMember({"bar", "pie", "map"}));
    cmd->add_option("--data", render.data, "Dataset JSON file (default dataset when omitted)");
    cmd->add_option("--out", render.out, "SVG output path, - for stdout");
    cmd->add_option("--png", render.png, "PNG output path");
    cmd->add_option("--scale", render.scale, "PNG pixels per unit")->check(CLI::Range(0.1, 16.0));
    cmd->add_option("--seed", render.seed, "Override every texture's jitter seed");
    cmd->add_option("--selected", render.selected, "Category to mark as selected");
    cmd->callback([&] { action = [&] { return run_render(render); }; });

    auto* presets = app.add_subcommand("presets", "Inspect the preset library");
    presets->require_subcommand(1);
    presets->add_subcommand("list", "List preset ids")->callback([&] { action = run_presets_list; });
    std::string preset_id;
    auto* show = presets->add_subcommand("show", "Print one preset as JSON");
    show->add_option("id", preset_id, "Preset id")->required();
    show->callback([&] { action = [&] { return run_presets_show(preset_id); }; });

    std::string lint_path;
    LintOptions lint_opts;
    cmd = app.add_subcommand("lint", "Check a texture set for discriminability");
    cmd->add_option("--specs", lint_path, "Texture array, preset set or chart JSON")->required();
    cmd->add_option("--min-orientation", lint_opts.min_orientation_deg, "Degrees");
    cmd->add_option("--min-ratio", lint_opts.min_spacing_ratio, "Spacing ratio");
    cmd->callback([&] { action = [&] { return run_lint(lint_path, lint_opts); }; });

    StudyArgs study;
    auto* st = app.add_subcommand("study", "Generate study datasets, schedules and stimuli");
    st->require_subcommand(1);
    cmd = st->add_subcommand("gen-datasets", "Ten constrained datasets");
    cmd->add_option("--seed", study.seed)->required();
    cmd->add_option("--out", study.out, "Output file, stdout when omitted");
    cmd->callback([&] { action = [&] { return run_gen_datasets(study); }; });
    cmd = st->add_subcommand("gen-schedule", "The 60-trial schedule");
    cmd->add_option("--seed", study.seed)->required();
    cmd->add_option("--chart", study.chart)->check(CLI::IsMember({"bar", "pie"}));
    cmd->add_option("--training", study.training, "Also emit this many practice trials")->check(CLI::Range(0, 100));
    cmd->add_option("--out", study.out, "Output file, stdout when omitted");
    cmd->callback([&] { action = [&] { return run_gen_schedule(study); }; });
    cmd = st->add_subcommand("export-stimuli", "Write stimulus SVGs and a manifest");
    cmd->add_option("--seed", study.seed)->required();
    cmd->add_option("--chart", study.chart)->check(CLI::IsMember({"bar", "pie"}));
    cmd->add_option("--out", study.out, "Output directory")->required();
    cmd->add_flag("--png", study.png, "Also write PNGs");
    cmd->add_option("--scale", study.scale, "PNG pixels per unit")->check(CLI::Range(0.1, 16.0));
    cmd->callback([&] { action = [&] { return run_export_stimuli(study); }; });

    AnalyzeArgs analyze;
    auto* an = app.add_subcommand("analyze", "Summaries and intervals from study logs");
    an->require_subcommand(1);
    for (const char* kind : {"trials", "ratings"}) {
        const bool trials = std::string_view(kind) == "trials";
        cmd = an->add_subcommand(kind, trials ? "Accuracy and response times" : "BeauVis and preference");
        cmd->add_option("file", analyze.input, "CSV log")->required();
        cmd->add_option("--report", analyze.report, "JSON report path, stdout when omitted");
        cmd->add_option("--intervals", analyze.intervals, "Plot-ready CSV of interval endpoints");
        cmd->add_option("--iterations", analyze.options.iterations)->check(CLI::Range(100, 1000000));
        cmd->add_option("--seed", analyze.options.seed);
        cmd->add_option("--alpha", analyze.options.family_alpha, "Family-wise alpha")->check(CLI::Range(0.0001, 0.5));
        cmd->add_flag("--skip-validation", analyze.skip_validation);
        if (trials) {
            cmd->add_option("--policy", analyze.policy)->check(CLI::IsMember({"refined", "original"}));
            cmd->add_option("--min-accuracy", analyze.exclusion.min_accuracy)->check(CLI::Range(0.0, 1.0));
            cmd->add_option("--grace-ms", analyze.exclusion.overrun_grace_ms)->check(CLI::Range(0.0, 1000.0));
            cmd->add_flag("--overrun-in-rt", analyze.exclusion.include_overrun_in_rt);
            cmd->callback([&] { action = [&] { return run_analyze_trials(analyze); }; });
        } else {
            cmd->callback([&] { action = [&] { return run_analyze_ratings(analyze); }; });
        }
    }

    std::string validate_kind, validate_path;
    cmd = app.add_subcommand("validate", "Check a trial or rating log");
    cmd->add_option("kind", validate_kind)->required()->check(CLI::IsMember({"trials", "ratings"}));
    cmd->add_option("file", validate_path)->required();
    cmd->callback([&] { action = [&] { return run_validate(validate_kind, validate_path); }; });

    std::string host = "127.0.0.1";
    int port = 8080;
    cmd = app.add_subcommand("serve", "Run the HTTP API");
    cmd->add_option("--host", host);
    cmd->add_option("--port", port)->check(CLI::Range(1, 65535));
    cmd->callback([&] { action = [&] { return run_serve(host, port); }; });

    std::string assets_out;
    auto* as = app.add_subcommand("assets", "Manage the asset tree");
    as->require_subcommand(1);
    cmd = as->add_subcommand("export", "Write the built-in presets, glyphs, map and dataset");
    cmd->add_option("--out", assets_out, "Target directory (default: the asset directory)");
    cmd->callback([&] { action = [&] { return run_assets_export(assets_out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitInvalid;
    }
    try {
        return action ? action() : kExitInvalid;
    } catch (const Error& e) {
        std::cerr << "bwtex: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "bwtex: " << e.what() << "\n";
        return kExitFailure;
    }
}
