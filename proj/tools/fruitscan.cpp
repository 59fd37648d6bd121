// fruitscan: command-line front end for the phenotyping pipeline and evaluators.
//
// Exit status is 0 unless something fatal happened (unreadable input, bad
// arguments). Per-fruit failures in `phenotype` are reported in the JSON and
// summarized on stderr, but still exit 0.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fruitscan/edgeops.hpp"
#include "fruitscan/evaluation.hpp"
#include "fruitscan/formats.hpp"
#include "fruitscan/fusion.hpp"
#include "fruitscan/pipeline.hpp"

namespace fs = std::filesystem;
using namespace fruitscan;

namespace {

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        formats::write_file(out_path, text);
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct PhenotypeArgs {
    std::string manifest;
    std::string calibration;
    std::string depth_mode = "center";
    std::string out;
    bool timing = false;
};

int cmd_phenotype(const PhenotypeArgs& a) {
    pipeline::PipelineOptions opts;
    opts.depth_mode = fusion::parse_depth_mode(a.depth_mode);
    const pipeline::PipelineReport report = pipeline::run_phenotype_files(a.manifest, a.calibration, opts);
    emit(pipeline::report_to_json(report, a.timing), a.out);
    for (const auto& f : report.fruits) {
        if (f.error) std::cerr << "fruit " << f.id << ": " << *f.error << "\n";
        for (const auto& w : f.warnings) std::cerr << "fruit " << f.id << ": warning: " << w << "\n";
    }
    std::cerr << report.fruits.size() - report.error_count() << " of " << report.fruits.size()
              << " fruits measured\n";
    return 0;
}

struct CalibrateArgs {
    std::string csv;
    std::string out;
};

int cmd_calibrate(const CalibrateArgs& a) {
    const auto samples = formats::read_calibration_csv(a.csv);
    const fusion::CalibrationModel model = fusion::fit_calibration(samples);
    std::cout << "k=" << format_double(model.k) << "\n";
    std::printf("rms_residual=%.6f\n", model.rms_residual);
    std::cout << "samples=" << model.n_samples << "\n";
    const fs::path out = a.out.empty() ? fs::path(a.csv).replace_extension(".model") : fs::path(a.out);
    formats::write_file(out, formats::encode_calibration_model(model.k));
    std::cerr << "model written to " << out.string() << "\n";
    return 0;
}

struct StatsArgs {
    bool bundled = false;
    std::string csv;
    std::string out;
    bool recompute = false;
    bool json = false;
};

int cmd_stats(const StatsArgs& a) {
    if (a.bundled == !a.csv.empty()) throw CLI::ValidationError("stats", "give exactly one of --bundled or --csv");
    const auto rows = a.bundled ? formats::load_bundled_phenotype_table() : formats::read_phenotype_csv(a.csv);
    const auto source = a.recompute ? evaluation::ErrorSource::Recomputed : evaluation::ErrorSource::Printed;
    const auto stats = evaluation::phenotype_stats(rows, source);
    emit(a.json ? evaluation::stats_to_json(stats, source) : evaluation::stats_to_csv(stats), a.out);
    for (const auto& s : stats) {
        std::fprintf(stderr, "%-7s median %+.2f%%  (max printed/recomputed gap %.3f pp)\n",
                     std::string(metrics::to_string(s.trait)).c_str(), s.stats.median, s.max_printed_deviation);
    }
    return 0;
}

struct EvalArgs {
    std::string kind;
    std::string pred;
    std::string gt;
    int samples = metrics::kDefaultEdgeSamples;
    std::string out;
    std::string csv;
};

int cmd_eval(const EvalArgs& a) {
    const auto kind = evaluation::parse_eval_kind(a.kind);
    const auto result =
        evaluation::run_eval(kind, evaluation::read_annotations(a.pred), evaluation::read_annotations(a.gt), a.samples);
    emit(result.json, a.out);
    if (!a.csv.empty()) formats::write_file(a.csv, result.csv);
    std::cerr << evaluation::to_string(kind) << " = " << format_double(result.headline) << "\n";
    return 0;
}

struct BoostArgs {
    std::string in;
    std::string out;
    double contrast = edgeops::kDefaultContrast;
    double acutance = edgeops::kDefaultAcutance;
};

int cmd_boost(const BoostArgs& a) {
    const ImageBuffer image = formats::read_image(a.in);
    formats::write_image(a.out, edgeops::edge_boost(image, a.contrast, a.acutance));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fruit phenotyping from RGB-D scenes"};
    app.require_subcommand(1);

    PhenotypeArgs ph;
    auto* phenotype = app.add_subcommand("phenotype", "measure every fruit in a scene manifest");
    phenotype->add_option("--manifest", ph.manifest, "scene manifest JSON")->required()->check(CLI::ExistingFile);
    phenotype->add_option("--calibration", ph.calibration, "calibration CSV or k= model file")
        ->required()
        ->check(CLI::ExistingFile);
    phenotype->add_option("--depth-mode", ph.depth_mode, "center or mask-median")
        ->check(CLI::IsMember({"center", "mask-median"}));
    phenotype->add_option("--out", ph.out, "report path (default: stdout)");
    phenotype->add_flag("--timing", ph.timing, "include elapsed_ms in the report");

    CalibrateArgs cal;
    auto* calibrate = app.add_subcommand("calibrate", "fit k in pixels_per_cm = k / depth_cm");
    calibrate->add_option("--csv", cal.csv, "depth_cm,pixels_per_cm samples")->required()->check(CLI::ExistingFile);
    calibrate->add_option("--out", cal.out, "model file (default: the CSV path with .model)");

    StatsArgs st;
    auto* stats = app.add_subcommand("stats", "box-plot statistics of per-trait relative errors");
    stats->add_flag("--bundled", st.bundled, "use the built-in 31-fruit table");
    stats->add_option("--csv", st.csv, "phenotype table CSV")->check(CLI::ExistingFile);
    stats->add_option("--out", st.out, "output path (default: stdout)");
    stats->add_flag("--recompute", st.recompute, "recompute errors from truth/predicted instead of the printed column");
    stats->add_flag("--json", st.json, "emit JSON instead of CSV");

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "compare predicted and ground-truth annotations");
    eval->add_option("kind", ev.kind, "mee, map or edgeloss")->required()->check(CLI::IsMember({"mee", "map", "edgeloss"}));
    eval->add_option("--pred", ev.pred, "prediction annotations")->required()->check(CLI::ExistingFile);
    eval->add_option("--gt", ev.gt, "ground-truth annotations")->required()->check(CLI::ExistingFile);
    eval->add_option("--samples", ev.samples, "boundary samples per mask for mee")->check(CLI::Range(3, 1000000));
    eval->add_option("--out", ev.out, "JSON report path (default: stdout)");
    eval->add_option("--csv", ev.csv, "also write a CSV report here");

    BoostArgs bo;
    auto* boost = app.add_subcommand("boost", "contrast and acutance enhancement of a PPM/PGM");
    boost->add_option("--in", bo.in, "input image")->required()->check(CLI::ExistingFile);
    boost->add_option("--out", bo.out, "output image")->required();
    boost->add_option("--contrast", bo.contrast, "contrast factor")->check(CLI::NonNegativeNumber);
    boost->add_option("--acutance", bo.acutance, "acutance factor")->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (phenotype->parsed()) return cmd_phenotype(ph);
        if (calibrate->parsed()) return cmd_calibrate(cal);
        if (stats->parsed()) return cmd_stats(st);
        if (eval->parsed()) return cmd_eval(ev);
        if (boost->parsed()) return cmd_boost(bo);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "fruitscan: " << to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fruitscan: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
