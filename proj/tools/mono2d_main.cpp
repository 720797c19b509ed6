// mono2d command-line tool: feature extraction, gradient checks, toy
// training/evaluation, histogram-divergence reports and benchmarks.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/config error,
// 3 runtime divergence; extract additionally uses 4 unreadable input,
// 5 unsupported format, 6 corrupt checkpoint.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "mono2d/autodiff.hpp"
#include "mono2d/checkpoint.hpp"
#include "mono2d/config.hpp"
#include "mono2d/histogram.hpp"
#include "mono2d/imageio.hpp"
#include "mono2d/parallel.hpp"
#include "mono2d/trainer.hpp"

namespace {

using namespace mono2d;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitUnreadable = 4;
constexpr int kExitBadFormat = 5;
constexpr int kExitBadCheckpoint = 6;

struct BankSource {
    std::string checkpoint_path;
    std::uint64_t init_seed = 0;
    bool has_seed = false;

    // Resolves the bank; shape is used only when initializing from a seed.
    FilterBank resolve(int n_scales, int height, int width) const {
        if (!checkpoint_path.empty()) return load_checkpoint(checkpoint_path).bank;
        if (!has_seed) throw ConfigError("need --checkpoint or --init-seed");
        return FilterBank::init(n_scales, height, width, init_seed);
    }
    std::string seed_label() const {
        return has_seed ? std::to_string(init_seed) : std::string("-");
    }
};

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

struct ExtractArgs {
    std::vector<std::string> inputs;
    BankSource bank;
    int n_scales = 8;
    std::string mode = "both";
    double lpf_cutoff = 0.5;
    int lpf_order = 10;
    double epsilon = 1e-12;
    bool concat_input = false;
    bool per_set_rescale = false;
    bool preview = false;
    std::string out_dir;
};

int run_extract(const ExtractArgs& args) {
    const ChannelMode mode = parse_channel_mode(args.mode);
    const LowPassSpec lpf{args.lpf_cutoff, args.lpf_order};
    lpf.validate();

    std::vector<RealField> images(args.inputs.size());
    for (std::size_t i = 0; i < args.inputs.size(); ++i) images[i] = read_pgm(args.inputs[i]);

    FilterBank bank = args.bank.resolve(args.n_scales, images[0].height(), images[0].width());
    const ForwardOptions options{lpf, mode, args.epsilon};

    // Compile kernels once per distinct shape.
    std::map<std::pair<int, int>, CompiledFilters> compiled;
    for (const auto& img : images) {
        const auto key = std::make_pair(img.height(), img.width());
        if (!compiled.count(key))
            compiled.emplace(key, compile_filters(img.height(), img.width(), bank, lpf, false));
    }

    std::vector<PhaseFeatures> features(images.size());
    parallel_for(images.size(), [&](std::size_t i) {
        const auto key = std::make_pair(images[i].height(), images[i].width());
        features[i] = forward(fft2(images[i]), compiled.at(key), options);
    });

    if (args.per_set_rescale) {
        double plo = features[0].phase_lo, phi = features[0].phase_hi;
        double alo = features[0].asym_lo, ahi = features[0].asym_hi;
        for (const auto& f : features) {
            plo = std::min(plo, f.phase_lo);
            phi = std::max(phi, f.phase_hi);
            alo = std::min(alo, f.asym_lo);
            ahi = std::max(ahi, f.asym_hi);
        }
        for (auto& f : features) {
            if (f.has_phase()) f.phase = rescale_with_stats(f.raw_phase, plo, phi);
            if (f.has_asym()) f.asym = rescale_with_stats(f.raw_asym, alo, ahi);
        }
    }

    for (std::size_t i = 0; i < images.size(); ++i) {
        FeatureFile out;
        out.height = images[i].height();
        out.width = images[i].width();
        out.scales = bank.n_scales();
        std::ostringstream flags;
        flags << "mode=" << args.mode << " seed=" << args.bank.seed_label()
              << " rescale=" << (args.per_set_rescale ? "per-set" : "per-image");
        out.flags = flags.str();
        if (features[i].has_phase()) {
            out.channel_names.push_back("phase");
            out.channels.push_back(features[i].phase);
        }
        if (features[i].has_asym()) {
            out.channel_names.push_back("asym");
            out.channels.push_back(features[i].asym);
        }
        if (args.concat_input) {
            out.channel_names.push_back("input");
            out.channels.push_back(images[i]);
        }

        std::filesystem::path src(args.inputs[i]);
        std::filesystem::path dir =
            args.out_dir.empty() ? src.parent_path() : std::filesystem::path(args.out_dir);
        if (!args.out_dir.empty()) std::filesystem::create_directories(dir);
        const std::string stem = src.stem().string();
        write_feature_file((dir / (stem + ".mono2d")).string(), out);
        if (args.preview) {
            for (std::size_t c = 0; c < out.channels.size(); ++c)
                write_pgm((dir / (stem + "." + out.channel_names[c] + ".pgm")).string(), out.channels[c]);
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// gradcheck
// ---------------------------------------------------------------------------

struct GradcheckArgs {
    std::uint64_t seed = 42;
    int height = 32;
    int width = 32;
    int n_scales = 4;
    int images = 3;
    std::string mode = "both";
    double tolerance = 1e-4;
    double abs_floor = 1e-8;
    double fd_step = 1e-4;
    double perturb_analytic = 0.0; // test hook: corrupts analytic gradients
};

struct GradcheckOutcome {
    double max_rel_f0 = 0.0;
    double max_rel_sigma = 0.0;
    int checked = 0;
    bool ok = true;
    std::string worst;
};

GradcheckOutcome run_gradcheck_suite(const GradcheckArgs& args, std::ostream& log) {
    const ChannelMode mode = parse_channel_mode(args.mode);
    const ForwardOptions options{LowPassSpec{}, mode, 1e-12};
    GradcheckOutcome outcome;

    for (int k = 0; k < args.images; ++k) {
        const auto sample =
            generate_dataset(1, args.height, args.width, DomainSpec::identity(), args.seed + k)[0];
        const FilterBank bank =
            FilterBank::init(args.n_scales, args.height, args.width, args.seed + 1000 * (k + 1));
        auto [features, bundle] = forward_with_tangents(sample.image, bank, options);

        const double inv_n = 1.0 / static_cast<double>(sample.image.size());
        for (int pass = 0; pass < 2; ++pass) {
            const bool phase_channel = pass == 0;
            if (phase_channel && !features.has_phase()) continue;
            if (!phase_channel && !features.has_asym()) continue;
            const RealField ones(args.height, args.width, inv_n);
            const auto analytic = grad_of_scalar(bundle, phase_channel ? &ones : nullptr,
                                                 phase_channel ? nullptr : &ones);
            const auto loss = frozen_channel_mean_loss(features, phase_channel);
            for (int p = 0; p < bank.parameter_count(); ++p) {
                const double fd = fd_oracle(sample.image, bank, options, loss, p, args.fd_step);
                double a = analytic[p] * (1.0 + args.perturb_analytic);
                const double scale = std::max(std::abs(fd), std::abs(a));
                double rel = 0.0;
                if (scale > args.abs_floor) rel = std::abs(a - fd) / scale;
                const bool is_f0 = p < bank.n_scales();
                auto& slot = is_f0 ? outcome.max_rel_f0 : outcome.max_rel_sigma;
                if (rel > slot) {
                    slot = rel;
                    if (rel > std::max(outcome.max_rel_f0, outcome.max_rel_sigma) - 1e-30) {
                        std::ostringstream w;
                        w << (is_f0 ? "f0_star[" : "sigma_r_star[") << p % bank.n_scales() << "] image "
                          << k << " " << (phase_channel ? "phase" : "asym") << " analytic " << a
                          << " fd " << fd;
                        outcome.worst = w.str();
                    }
                }
                ++outcome.checked;
            }
        }
    }
    outcome.ok = outcome.max_rel_f0 <= args.tolerance && outcome.max_rel_sigma <= args.tolerance;
    log << "gradcheck: " << outcome.checked << " parameter/loss pairs checked\n";
    log << "  max rel error f0_star:      " << outcome.max_rel_f0 << "\n";
    log << "  max rel error sigma_r_star: " << outcome.max_rel_sigma << "\n";
    if (!outcome.ok) log << "  worst offender: " << outcome.worst << "\n";
    return outcome;
}

int run_gradcheck(const GradcheckArgs& args) {
    const auto outcome = run_gradcheck_suite(args, std::cout);
    std::cout << (outcome.ok ? "gradcheck PASS" : "gradcheck FAIL") << " (tolerance " << args.tolerance
              << ")\n";
    return outcome.ok ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------
// train / eval
// ---------------------------------------------------------------------------

FeatureSetup setup_from_config(const RunConfig& cfg) {
    FeatureSetup s;
    s.use_mono2d = cfg.use_mono2d;
    s.mode = cfg.channel_mode();
    s.freeze_bank = cfg.freeze_bank;
    s.concat_input = cfg.concat_input;
    s.rescale_per_image = cfg.rescale_per_image;
    s.lpf = cfg.lpf();
    s.epsilon = cfg.epsilon;
    return s;
}

TrainConfig train_config_from(const RunConfig& cfg) {
    TrainConfig t;
    t.learning_rate = cfg.learning_rate;
    t.min_lr = cfg.min_lr;
    t.beta1 = cfg.beta1;
    t.beta2 = cfg.beta2;
    t.epochs = cfg.epochs;
    t.batch_size = cfg.batch_size;
    t.seed = cfg.seed;
    return t;
}

std::string run_label(const RunConfig& cfg) {
    if (!cfg.use_mono2d) return "raw";
    std::string label = "mono2d-" + cfg.mode;
    label += cfg.freeze_bank ? "-frozen" : "-trainable";
    return label;
}

void print_report(const std::string& label, const TrainResult* result, const SsdgReport& report) {
    std::cout << "== " << label << " ==\n";
    if (result) {
        std::cout << "best val dice " << report.source_val_dice << " (epoch " << result->best_epoch
                  << ")\n";
    }
    std::printf("%-18s %s\n", "domain", "dice");
    std::printf("%-18s %.4f\n", "source_val", report.source_val_dice);
    for (const auto& d : report.domains) std::printf("%-18s %.4f\n", d.domain.c_str(), d.mean_dice);
    std::printf("%-18s %.4f\n", "shifted_mean", report.shifted_mean_dice);
}

int run_train(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    const FeatureSetup setup = setup_from_config(cfg);
    const SsdgSuite suite = make_ssdg_suite(cfg.dataset_count, cfg.height, cfg.width, cfg.seed,
                                            cfg.val_fraction, DomainSpec::default_shifted());
    const FilterBank init = FilterBank::init(cfg.n_scales, cfg.height, cfg.width, cfg.seed);
    const TrainResult result = train(train_config_from(cfg), setup, init, suite.train, suite.val);
    const SsdgReport report = evaluate_ssdg(setup, result.bank, result.head, suite.val, suite.shifted_val);

    const std::string label = run_label(cfg);
    std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
    const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    {
        std::ofstream csv(dir / ("metrics_" + label + ".csv"));
        write_metrics_csv(csv, cfg.seed, label, result.log, &report);
    }
    save_checkpoint((dir / ("model_" + label + ".ckpt")).string(), result.bank, &result.head);
    print_report(label, &result, report);
    return kExitOk;
}

int run_eval(const RunConfig& cfg, const std::string& checkpoint) {
    cfg.validate();
    const ModelCheckpoint ckpt = load_checkpoint(checkpoint);
    if (!ckpt.head) throw CheckpointError("checkpoint '" + checkpoint + "' has no head weights");
    FeatureSetup setup = setup_from_config(cfg);
    const SsdgSuite suite = make_ssdg_suite(cfg.dataset_count, cfg.height, cfg.width, cfg.seed,
                                            cfg.val_fraction, DomainSpec::default_shifted());
    const int expected = setup.channel_count();
    if (ckpt.head->channels() != expected)
        throw ConfigError("checkpoint head has " + std::to_string(ckpt.head->channels()) +
                          " channels but config expects " + std::to_string(expected));
    const SsdgReport report = evaluate_ssdg(setup, ckpt.bank, *ckpt.head, suite.val, suite.shifted_val);
    print_report("eval " + run_label(cfg), nullptr, report);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// histcompare
// ---------------------------------------------------------------------------

struct HistcompareArgs {
    std::vector<std::string> set_a;
    std::vector<std::string> set_b;
    BankSource bank;
    int n_scales = 8;
    int bins = 64;
};

int run_histcompare(const HistcompareArgs& args) {
    if (args.set_a.empty() || args.set_b.empty()) throw ConfigError("histcompare: both sets need images");
    auto load_set = [](const std::vector<std::string>& paths) {
        std::vector<RealField> out(paths.size());
        for (std::size_t i = 0; i < paths.size(); ++i) out[i] = read_pgm(paths[i]);
        return out;
    };
    const auto images_a = load_set(args.set_a);
    const auto images_b = load_set(args.set_b);
    const FilterBank bank = args.bank.resolve(args.n_scales, images_a[0].height(), images_a[0].width());
    const ForwardOptions options{LowPassSpec{}, ChannelMode::Phase, 1e-12};

    auto phase_set = [&](const std::vector<RealField>& images) {
        std::vector<RealField> out(images.size());
        parallel_for(images.size(), [&](std::size_t i) {
            out[i] = forward(images[i], bank, options).phase;
        });
        return out;
    };
    const auto phase_a = phase_set(images_a);
    const auto phase_b = phase_set(images_b);

    auto ptrs = [](const std::vector<RealField>& v) {
        std::vector<const RealField*> out;
        for (const auto& f : v) out.push_back(&f);
        return out;
    };
    const double raw_dist =
        wasserstein1(intensity_histogram(ptrs(images_a), args.bins), intensity_histogram(ptrs(images_b), args.bins));
    const double phase_dist =
        wasserstein1(intensity_histogram(ptrs(phase_a), args.bins), intensity_histogram(ptrs(phase_b), args.bins));
    std::cout << "raw_wasserstein " << raw_dist << "\n";
    std::cout << "phase_wasserstein " << phase_dist << "\n";
    std::cout << (phase_dist < raw_dist ? "phase histograms are closer\n" : "raw histograms are closer\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    int height = 256;
    int width = 256;
    int n_scales = 8;
    int reps = 10;
    std::uint64_t seed = 42;
};

int run_bench(const BenchArgs& args) {
    RealField image(args.height, args.width);
    std::mt19937_64 rng(args.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (auto& v : image.values()) v = u01(rng);
    const FilterBank bank = FilterBank::init(args.n_scales, args.height, args.width, args.seed);
    const ForwardOptions options{LowPassSpec{}, ChannelMode::Both, 1e-12};

    auto time_ms = [&](auto&& fn) {
        std::vector<double> times(args.reps);
        fn(); // warm-up: plans and kernel caches
        for (int r = 0; r < args.reps; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            fn();
            const auto t1 = std::chrono::steady_clock::now();
            times[r] = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
        double mean = 0.0;
        for (double t : times) mean += t;
        mean /= args.reps;
        double var = 0.0;
        for (double t : times) var += (t - mean) * (t - mean);
        const double sd = args.reps > 1 ? std::sqrt(var / (args.reps - 1)) : 0.0;
        return std::make_pair(mean, sd);
    };

    const auto [fwd_mean, fwd_sd] = time_ms([&] { forward(image, bank, options); });
    const auto [tan_mean, tan_sd] = time_ms([&] { forward_with_tangents(image, bank, options); });
    const double ratio = tan_mean / fwd_mean;
    const double bound = (1.0 + 2.0 * args.n_scales) * 1.25;

    std::printf("forward          %.3f ms +/- %.3f\n", fwd_mean, fwd_sd);
    std::printf("forward+tangents %.3f ms +/- %.3f\n", tan_mean, tan_sd);
    std::printf("ratio %.2f (contract <= %.2f)\n", ratio, bound);
    if (ratio > bound) {
        std::cout << "bench FAIL: tangent cost exceeds contract\n";
        return kExitVerification;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

void add_bank_source(CLI::App* cmd, BankSource& src) {
    auto* ckpt = cmd->add_option("--checkpoint", src.checkpoint_path, "model checkpoint file");
    auto* seed = cmd->add_option("--init-seed", src.init_seed, "initialize a fresh bank from this seed");
    ckpt->excludes(seed);
    cmd->callback([&src, seed] { src.has_seed = seed->count() > 0; });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mono2d: multi-scale local-phase feature extraction with trainable log-Gabor filters"};
    app.require_subcommand(1);

    ExtractArgs extract_args;
    auto* extract = app.add_subcommand("extract", "extract phase/asym features from PGM images");
    extract->add_option("images", extract_args.inputs, "input PGM images")->required();
    add_bank_source(extract, extract_args.bank);
    extract->add_option("--n-scales", extract_args.n_scales, "filter bank scales");
    extract->add_option("--mode", extract_args.mode, "channels: phase|asym|both");
    extract->add_option("--lpf-cutoff", extract_args.lpf_cutoff, "Butterworth cutoff (cycles/pixel)");
    extract->add_option("--lpf-order", extract_args.lpf_order, "Butterworth order");
    extract->add_option("--epsilon", extract_args.epsilon, "denominator stabilizer");
    extract->add_flag("--concat-input", extract_args.concat_input, "append the input image channel");
    extract->add_flag("--per-set-rescale", extract_args.per_set_rescale,
                      "min-max rescale over the whole input set instead of per image");
    extract->add_flag("--preview", extract_args.preview, "also write 8-bit preview PGMs");
    extract->add_option("--out-dir", extract_args.out_dir, "output directory (default: beside inputs)");

    GradcheckArgs grad_args;
    auto* gradcheck = app.add_subcommand("gradcheck", "verify analytic gradients against finite differences");
    gradcheck->add_option("--seed", grad_args.seed, "rng seed");
    gradcheck->add_option("--height", grad_args.height, "image height");
    gradcheck->add_option("--width", grad_args.width, "image width");
    gradcheck->add_option("--n-scales", grad_args.n_scales, "filter bank scales");
    gradcheck->add_option("--images", grad_args.images, "number of test images");
    gradcheck->add_option("--mode", grad_args.mode, "channels: phase|asym|both");
    gradcheck->add_option("--tolerance", grad_args.tolerance, "max relative error");
    gradcheck->add_option("--fd-step", grad_args.fd_step, "finite-difference step");
    gradcheck->add_option("--perturb-analytic", grad_args.perturb_analytic,
                          "test hook: scale analytic gradients by (1+x)")
        ->group(""); // hidden
    gradcheck->add_option("--abs-floor", grad_args.abs_floor,
                          "absolute tolerance for near-zero gradients");

    RunConfig cfg;
    std::string config_path, out_dir, eval_checkpoint;
    bool flag_raw = false, flag_mono2d = false, flag_freeze = false;
    auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file (key = value lines)");
        cmd->add_option("--seed", cfg.seed, "rng seed");
        cmd->add_option("--epochs", cfg.epochs, "training epochs");
        cmd->add_option("--batch-size", cfg.batch_size, "batch size");
        cmd->add_option("--n-scales", cfg.n_scales, "filter bank scales");
        cmd->add_option("--height", cfg.height, "image height");
        cmd->add_option("--width", cfg.width, "image width");
        cmd->add_option("--dataset-count", cfg.dataset_count, "synthetic dataset size");
        cmd->add_option("--mode", cfg.mode, "channels: phase|asym|both");
        cmd->add_option("--learning-rate", cfg.learning_rate, "Adam learning rate");
        cmd->add_option("--min-lr", cfg.min_lr, "cosine annealing floor");
        cmd->add_flag("--raw", flag_raw, "train on raw input (no layer)");
        cmd->add_flag("--mono2d", flag_mono2d, "train with the layer (default)");
        cmd->add_flag("--freeze", flag_freeze, "freeze the layer parameters");
        cmd->add_flag("--concat-input", cfg.concat_input, "append the raw image channel");
    };

    auto* train_cmd = app.add_subcommand("train", "train the toy segmentation model");
    add_run_options(train_cmd);
    train_cmd->add_option("--out-dir", out_dir, "output directory for CSV and checkpoints");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the synthetic SSDG suite");
    add_run_options(eval_cmd);
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "model checkpoint")->required();

    HistcompareArgs hist_args;
    auto* hist = app.add_subcommand("histcompare", "histogram divergence of raw vs phase images");
    hist->add_option("--set-a", hist_args.set_a, "first image set")->required()->expected(-1);
    hist->add_option("--set-b", hist_args.set_b, "second image set")->required()->expected(-1);
    add_bank_source(hist, hist_args.bank);
    hist->add_option("--n-scales", hist_args.n_scales, "filter bank scales");
    hist->add_option("--bins", hist_args.bins, "histogram bins");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "forward and tangent latency");
    bench->add_option("--height", bench_args.height, "image height");
    bench->add_option("--width", bench_args.width, "image width");
    bench->add_option("--n-scales", bench_args.n_scales, "filter bank scales");
    bench->add_option("--reps", bench_args.reps, "repetitions")->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_args.seed, "rng seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*extract) return run_extract(extract_args);
        if (*gradcheck) return run_gradcheck(grad_args);
        if (*train_cmd || *eval_cmd) {
            if (!config_path.empty()) {
                RunConfig file_cfg = RunConfig::from_file(config_path);
                // Flags win over file entries: re-parse the command line onto
                // the file-derived defaults.
                cfg = file_cfg;
                flag_raw = flag_mono2d = flag_freeze = false;
                try {
                    app.clear();
                    app.parse(argc, argv);
                } catch (const CLI::ParseError&) {
                    return kExitUsage;
                }
            }
            if (flag_raw && flag_mono2d) throw ConfigError("--raw and --mono2d are mutually exclusive");
            if (flag_raw) cfg.use_mono2d = false;
            if (flag_mono2d) cfg.use_mono2d = true;
            if (flag_freeze) cfg.freeze_bank = true;
            if (*train_cmd) return run_train(cfg, out_dir);
            return run_eval(cfg, eval_checkpoint);
        }
        if (*hist) return run_histcompare(hist_args);
        if (*bench) return run_bench(bench_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << "\n";
        return kExitBadCheckpoint;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitBadFormat;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitUnreadable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
