// gmi: scattered-point Gaussian-mixture image interpolation toolkit.
//
// Subcommands: forward, resample, benchmark, optimize, validate, gen-corpus.
// Exit codes: 0 success, 1 validation failure, 2 usage/input error,
// 3 empty corpus.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gmi/benchmark.hpp"
#include "gmi/engine.hpp"
#include "gmi/imaging.hpp"
#include "gmi/optimize.hpp"
#include "gmi/resample.hpp"
#include "gmi/validate.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitEmptyCorpus = 3;

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

gmi::Fallback parse_fallback(const std::string& name) {
    if (name == "nearest") {
        return gmi::Fallback::NearestPoint;
    }
    if (name == "zero") {
        return gmi::Fallback::Zero;
    }
    throw gmi::Error(gmi::ErrorCode::ConfigInvalid,
                     "unknown fallback policy: " + name);
}

struct ForwardArgs {
    std::string points_path;
    int width = 0;
    int height = 0;
    double sigma = 1.0;
    double radius = 0.0;  // 0 = default 3*sigma
    std::string fallback = "nearest";
    std::string out_path;
    int threads = default_threads();
};

int cmd_forward(const ForwardArgs& args) {
    const gmi::PointSet ps = gmi::load_point_set(args.points_path);
    gmi::InterpConfig cfg = gmi::make_config(
        args.sigma, {args.width, args.height}, parse_fallback(args.fallback));
    if (args.radius > 0.0) {
        cfg.cutoff_radius = args.radius;
    }
    const gmi::ForwardResult result =
        gmi::forward(ps, cfg, cfg.frame, args.threads);
    gmi::save_image(result.image, args.out_path);
    std::fprintf(stderr, "fallback pixels: %d\n",
                 result.cache.fallback_count());
    return kExitOk;
}

struct ResampleArgs {
    std::string in_path;
    std::string out_path;
    int width = 0;
    int height = 0;
    std::string method = "bilinear";
};

int cmd_resample(const ResampleArgs& args) {
    const auto filter = gmi::filter_from_name(args.method);
    if (!filter) {
        std::fprintf(stderr, "error: unknown method: %s\n",
                     args.method.c_str());
        return kExitUsage;
    }
    const gmi::ImageBuffer img = gmi::load_image(args.in_path);
    const gmi::ImageBuffer out =
        gmi::resample(img, {args.width, args.height}, *filter);
    gmi::save_image(out, args.out_path);
    return kExitOk;
}

struct BenchmarkArgs {
    std::string images_dir;
    std::vector<int> factors{2, 4, 8, 16};
    std::vector<std::string> methods;
    std::string sigma = "auto";
    std::string downsample = "box";
    std::string out_path;
    int threads = default_threads();
};

bool readable_image(const fs::path& p) {
    const std::string ext = p.extension().string();
    return ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".png";
}

int cmd_benchmark(const BenchmarkArgs& args) {
    std::vector<fs::path> files;
    if (!fs::is_directory(args.images_dir)) {
        std::fprintf(stderr, "error: not a directory: %s\n",
                     args.images_dir.c_str());
        return kExitUsage;
    }
    for (const auto& entry : fs::directory_iterator(args.images_dir)) {
        if (entry.is_regular_file() && readable_image(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<std::pair<std::string, gmi::ImageBuffer>> images;
    for (const fs::path& file : files) {
        try {
            images.emplace_back(file.stem().string(),
                                gmi::load_image(file.string()));
        } catch (const gmi::Error& e) {
            std::fprintf(stderr, "warning: skipping %s: %s\n",
                         file.string().c_str(), e.what());
        }
    }
    if (images.empty()) {
        std::fprintf(stderr, "error: no readable images in %s\n",
                     args.images_dir.c_str());
        return kExitEmptyCorpus;
    }

    gmi::BenchmarkOptions options;
    options.factors = args.factors;
    if (!args.methods.empty() &&
        !(args.methods.size() == 1 && args.methods[0] == "all")) {
        options.methods = args.methods;
    }
    if (args.sigma != "auto") {
        options.sigma = std::stod(args.sigma);
    }
    if (args.downsample == "bicubic") {
        options.downsample = gmi::DownsampleMode::Bicubic;
    } else if (args.downsample != "box") {
        std::fprintf(stderr, "error: unknown downsample mode: %s\n",
                     args.downsample.c_str());
        return kExitUsage;
    }
    options.num_workers = args.threads;

    const auto rows = gmi::run_benchmark(images, options);
    gmi::write_benchmark_report(rows, args.out_path);
    std::fprintf(stderr, "benchmarked %zu images, %zu rows -> %s\n",
                 images.size(), rows.size(), args.out_path.c_str());
    return kExitOk;
}

struct OptimizeArgs {
    std::string image_path;
    int num_points = 256;
    int steps = 200;
    double lr = 0.5;
    double sigma = 2.0;
    double radius = 0.0;
    std::uint64_t seed = 0;
    int log_every = 10;
    bool optimize_colors = false;
    std::string log_path;
    std::string loss_path;
    std::string out_path;
    std::string displacement_path;
    int threads = default_threads();
};

int cmd_optimize(const OptimizeArgs& args) {
    const gmi::ImageBuffer target = gmi::load_image(args.image_path);
    const gmi::PointSet ps =
        gmi::random_subsample(target, args.num_points, args.seed);

    gmi::InterpConfig icfg = gmi::make_config(args.sigma, target.frame());
    if (args.radius > 0.0) {
        icfg.cutoff_radius = args.radius;
    }
    gmi::OptimConfig ocfg;
    ocfg.steps = args.steps;
    ocfg.learning_rate = args.lr;
    ocfg.log_every = args.log_every;
    ocfg.optimize_colors = args.optimize_colors;
    ocfg.seed = args.seed;

    const gmi::OptimResult result =
        gmi::optimize_points(ps, target, icfg, ocfg, args.threads);

    if (!args.log_path.empty()) {
        gmi::save_trajectory(result.trajectory, args.log_path);
    }
    if (!args.loss_path.empty()) {
        std::ofstream out(args.loss_path, std::ios::binary);
        if (!out) {
            throw gmi::Error(gmi::ErrorCode::IoError,
                             "cannot open for writing: " + args.loss_path);
        }
        out << "step,loss\n";
        for (std::size_t step = 0; step < result.loss_curve.size(); ++step) {
            out << step << "," << gmi::format_double(result.loss_curve[step])
                << "\n";
        }
    }
    if (!args.out_path.empty()) {
        const gmi::ForwardResult render =
            gmi::forward(result.points, icfg, target.frame(), args.threads);
        gmi::save_image(render.image, args.out_path);
    }

    const gmi::DisplacementReport report =
        gmi::displacement_report(result.trajectory);
    if (!args.displacement_path.empty()) {
        gmi::save_displacement_report(report, args.displacement_path);
    }
    std::printf("initial loss: %s\n",
                gmi::format_double(result.loss_curve.front()).c_str());
    std::printf("final loss:   %s\n",
                gmi::format_double(result.loss_curve.back()).c_str());
    std::printf("mean displacement: %s\n",
                gmi::format_double(report.mean).c_str());
    std::printf("max displacement:  %s\n",
                gmi::format_double(report.max).c_str());
    return kExitOk;
}

struct ValidateArgs {
    std::uint64_t seed = 1;
    int cases = 100;
    int grid_max = 8;
    int points_max = 20;
    bool inject_fault = false;
};

int cmd_validate(const ValidateArgs& args) {
    gmi::ValidationOptions options;
    options.seed = args.seed;
    options.cases = args.cases;
    options.grid_max = args.grid_max;
    options.points_max = args.points_max;
    options.inject_fault = args.inject_fault;

    const gmi::ValidationSummary summary = gmi::run_validation(options);
    std::printf("%-48s %-10s %-14s %s\n", "check", "status", "worst",
                "tolerance");
    for (const auto& check : summary.checks) {
        const char* status = check.hard
                                 ? (check.passed ? "pass" : "FAIL")
                                 : "measured";
        std::printf("%-48s %-10s %-14.3e %s\n", check.name.c_str(), status,
                    check.worst,
                    check.tolerance > 0.0
                        ? gmi::format_double(check.tolerance).c_str()
                        : "-");
        if (check.hard && !check.passed) {
            std::printf("  replay seeds:");
            for (std::uint64_t seed : check.failed_seeds) {
                std::printf(" %llu", static_cast<unsigned long long>(seed));
            }
            std::printf("\n");
        }
    }
    if (!summary.all_passed()) {
        std::printf("validation FAILED\n");
        return kExitValidationFailure;
    }
    std::printf("validation passed (%d cases)\n", args.cases);
    return kExitOk;
}

struct GenCorpusArgs {
    std::string out_dir;
    int count = 20;
    int width = 128;
    int height = 128;
    int channels = 3;
    std::uint64_t seed = 1;
};

int cmd_gen_corpus(const GenCorpusArgs& args) {
    if (args.count < 1 || args.width < 1 || args.height < 1 ||
        (args.channels != 1 && args.channels != 3)) {
        std::fprintf(stderr, "error: invalid corpus parameters\n");
        return kExitUsage;
    }
    fs::create_directories(args.out_dir);
    gmi::Rng master(args.seed);
    for (int k = 0; k < args.count; ++k) {
        gmi::Rng rng(master.next_u64());
        const gmi::ImageBuffer img =
            gmi::make_blob_image(args.width, args.height, args.channels, rng);
        char name[32];
        std::snprintf(name, sizeof(name), "blob_%03d.%s", k,
                      args.channels == 3 ? "ppm" : "pgm");
        gmi::save_image(img, (fs::path(args.out_dir) / name).string());
    }
    std::fprintf(stderr, "wrote %d images to %s\n", args.count,
                 args.out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-mixture interpolation of scattered image points"};
    app.require_subcommand(1);

    ForwardArgs fwd;
    CLI::App* forward_cmd = app.add_subcommand(
        "forward", "Reconstruct an image from a point file");
    forward_cmd->add_option("--points", fwd.points_path, "Point table (CSV)")
        ->required();
    forward_cmd->add_option("--width", fwd.width, "Output width")->required();
    forward_cmd->add_option("--height", fwd.height, "Output height")
        ->required();
    forward_cmd->add_option("--sigma", fwd.sigma, "Gaussian sigma, pixels")
        ->required();
    forward_cmd->add_option("--radius", fwd.radius,
                            "Cutoff radius, pixels (default 3*sigma)");
    forward_cmd->add_option("--fallback", fwd.fallback,
                            "Empty-neighborhood policy: nearest|zero");
    forward_cmd->add_option("--out", fwd.out_path, "Output image")->required();
    forward_cmd->add_option("--threads", fwd.threads, "Worker threads");

    ResampleArgs rsp;
    CLI::App* resample_cmd =
        app.add_subcommand("resample", "Classical uniform-grid resample");
    resample_cmd->add_option("--in", rsp.in_path, "Input image")->required();
    resample_cmd->add_option("--out", rsp.out_path, "Output image")
        ->required();
    resample_cmd->add_option("--width", rsp.width, "Output width")->required();
    resample_cmd->add_option("--height", rsp.height, "Output height")
        ->required();
    resample_cmd
        ->add_option("--method", rsp.method,
                     "nearest|box|bilinear|bicubic|hamming|lanczos")
        ->required();

    BenchmarkArgs bench;
    CLI::App* benchmark_cmd = app.add_subcommand(
        "benchmark", "Downsample/upsample L1 reconstruction benchmark");
    benchmark_cmd->add_option("--images", bench.images_dir, "Image directory")
        ->required();
    benchmark_cmd->add_option("--factors", bench.factors,
                              "Downsample factors")
        ->delimiter(',');
    benchmark_cmd
        ->add_option("--methods", bench.methods,
                     "Methods to run, or 'all' (default)")
        ->delimiter(',');
    benchmark_cmd->add_option("--sigma", bench.sigma,
                              "gmm sigma value, or 'auto'");
    benchmark_cmd->add_option("--downsample", bench.downsample,
                              "Downsample mode: box|bicubic");
    benchmark_cmd->add_option("--out", bench.out_path, "Report CSV")
        ->required();
    benchmark_cmd->add_option("--threads", bench.threads, "Worker threads");

    OptimizeArgs opt;
    CLI::App* optimize_cmd = app.add_subcommand(
        "optimize", "Gradient-descent point-position optimization");
    optimize_cmd->add_option("--image", opt.image_path, "Target image")
        ->required();
    optimize_cmd->add_option("--num-points", opt.num_points, "Points to sample")
        ->required();
    optimize_cmd->add_option("--steps", opt.steps, "Descent steps")
        ->required();
    optimize_cmd->add_option("--lr", opt.lr, "Learning rate, pixels")
        ->required();
    optimize_cmd->add_option("--sigma", opt.sigma, "Gaussian sigma, pixels")
        ->required();
    optimize_cmd->add_option("--radius", opt.radius,
                             "Cutoff radius (default 3*sigma)");
    optimize_cmd->add_option("--seed", opt.seed, "Sampling seed")->required();
    optimize_cmd->add_option("--log", opt.log_path, "Trajectory CSV");
    optimize_cmd->add_option("--loss-out", opt.loss_path, "Loss curve CSV");
    optimize_cmd->add_option("--out", opt.out_path, "Final reconstruction");
    optimize_cmd->add_option("--displacement-out", opt.displacement_path,
                             "Per-point displacement CSV");
    optimize_cmd->add_option("--log-every", opt.log_every,
                             "Trajectory logging stride");
    optimize_cmd->add_flag("--optimize-colors", opt.optimize_colors,
                           "Also descend on colors");
    optimize_cmd->add_option("--threads", opt.threads, "Worker threads");

    ValidateArgs val;
    CLI::App* validate_cmd = app.add_subcommand(
        "validate", "Randomized engine-vs-reference validation");
    validate_cmd->add_option("--seed", val.seed, "Base seed");
    validate_cmd->add_option("--cases", val.cases, "Number of instances");
    validate_cmd->add_option("--grid-max", val.grid_max, "Max frame side");
    validate_cmd->add_option("--points-max", val.points_max, "Max points");
    validate_cmd->add_flag("--inject-fault", val.inject_fault)->group("");

    GenCorpusArgs gen;
    CLI::App* gen_cmd = app.add_subcommand(
        "gen-corpus", "Generate a synthetic smooth-image corpus");
    gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();
    gen_cmd->add_option("--count", gen.count, "Number of images");
    gen_cmd->add_option("--width", gen.width, "Image width");
    gen_cmd->add_option("--height", gen.height, "Image height");
    gen_cmd->add_option("--channels", gen.channels, "1 or 3");
    gen_cmd->add_option("--seed", gen.seed, "Corpus seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (forward_cmd->parsed()) {
            return cmd_forward(fwd);
        }
        if (resample_cmd->parsed()) {
            return cmd_resample(rsp);
        }
        if (benchmark_cmd->parsed()) {
            return cmd_benchmark(bench);
        }
        if (optimize_cmd->parsed()) {
            return cmd_optimize(opt);
        }
        if (validate_cmd->parsed()) {
            return cmd_validate(val);
        }
        if (gen_cmd->parsed()) {
            return cmd_gen_corpus(gen);
        }
    } catch (const gmi::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
