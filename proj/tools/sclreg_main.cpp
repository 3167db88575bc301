// Command-line front end for the kernel-regression library.
//
// Subcommands: synth-kernel, make-dataset, stats, fit, predict, evaluate,
// experiment. Exit codes: 0 success, 1 usage error, 2 data or format error,
// 3 solver failure (divergence, or non-convergence under --strict).

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "sclreg/errors.hpp"
#include "sclreg/estimator.hpp"
#include "sclreg/field_io.hpp"
#include "sclreg/harness.hpp"
#include "sclreg/kernels.hpp"
#include "sclreg/rng.hpp"
#include "sclreg/spectral.hpp"
#include "sclreg/synth.hpp"

namespace {

namespace fs = std::filesystem;

bool has_extension(const std::string& path, const char* ext) {
    const std::string e = fs::path(path).extension().string();
    return e == ext;
}

sclreg::ImageGrid load_image(const std::string& path) {
    return has_extension(path, ".pgm") ? sclreg::load_pgm(path) : sclreg::load_field_real(path);
}

// Collects the (input, output) positional file list into pairs.
std::vector<sclreg::ImagePair> load_pairs(const std::vector<std::string>& files) {
    if (files.empty() || files.size() % 2 != 0)
        throw sclreg::ArgumentError("expected an even number of image files "
                                    "(input output input output ...)");
    std::vector<sclreg::ImagePair> pairs;
    pairs.reserve(files.size() / 2);
    for (std::size_t k = 0; k < files.size(); k += 2)
        pairs.emplace_back(load_image(files[k]), load_image(files[k + 1]));
    return pairs;
}

std::string pair_path(const std::string& dir, const std::string& prefix, std::size_t index,
                      const char* role) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%03zu", index);
    return (fs::path(dir) / (prefix + "_" + buf + "." + role + ".field")).string();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear convolution kernel regression in the frequency domain"};
    app.require_subcommand(1);
    int rc = 0;

    // synth-kernel: write a zero-sum disk/annulus kernel.
    auto* synth = app.add_subcommand("synth-kernel", "Generate a zero-sum disk/annulus kernel");
    sclreg::ZeroSumKernelSpec kspec;
    std::string synth_out;
    synth->add_option("--height", kspec.height, "Grid rows")->required();
    synth->add_option("--width", kspec.width, "Grid columns")->required();
    synth->add_option("--r-positive", kspec.r_positive, "Positive disk radius")->required();
    synth->add_option("--r-inner", kspec.r_inner, "Annulus inner radius")->required();
    synth->add_option("--r-outer", kspec.r_outer, "Annulus outer radius")->required();
    synth->add_option("--out", synth_out, "Output kernel field file")->required();
    synth->callback([&] {
        const sclreg::ImageGrid kernel = sclreg::make_zero_sum_kernel(kspec);
        sclreg::save_field(kernel, synth_out);
        std::cout << "wrote " << synth_out << " (" << kernel.height() << "x" << kernel.width()
                  << ")\n";
    });

    // make-dataset: convolve inputs with a kernel and add noise at an SNR.
    auto* mkds = app.add_subcommand(
        "make-dataset", "Build noisy (input, output) training pairs from a kernel");
    std::string mkds_kernel, mkds_outdir, mkds_inputs_dir, mkds_prefix = "pair";
    double mkds_snr = 0.0, mkds_corr = 2.0;
    std::size_t mkds_textures = 0, mkds_h = 128, mkds_w = 128;
    std::uint64_t mkds_noise_seed = 0, mkds_texture_seed = 0;
    mkds->add_option("--kernel", mkds_kernel, "Kernel field file")->required();
    mkds->add_option("--snr-db", mkds_snr, "Signal-to-noise ratio in dB")->required();
    mkds->add_option("--noise-seed", mkds_noise_seed, "Base seed for the noise streams");
    mkds->add_option("--out-dir", mkds_outdir, "Directory for the pair files")->required();
    mkds->add_option("--prefix", mkds_prefix, "Pair file name prefix");
    auto* from_dir = mkds->add_option("--inputs", mkds_inputs_dir,
                                      "Directory of input images (.field/.pgm, sorted by name)");
    auto* gen_n = mkds->add_option("--textures", mkds_textures,
                                   "Generate this many Gaussian textures instead");
    mkds->add_option("--height", mkds_h, "Texture rows (with --textures)");
    mkds->add_option("--width", mkds_w, "Texture columns (with --textures)");
    mkds->add_option("--correlation-length", mkds_corr,
                     "Texture correlation length in pixels (with --textures)");
    mkds->add_option("--texture-seed", mkds_texture_seed, "Base seed for textures");
    from_dir->excludes(gen_n);
    gen_n->excludes(from_dir);
    mkds->callback([&] {
        const sclreg::ImageGrid kernel = sclreg::load_field_real(mkds_kernel);
        std::vector<sclreg::ImageGrid> inputs;
        if (!mkds_inputs_dir.empty()) {
            std::vector<std::string> names;
            for (const auto& entry : fs::directory_iterator(mkds_inputs_dir)) {
                if (!entry.is_regular_file())
                    continue;
                const std::string ext = entry.path().extension().string();
                if (ext == ".field" || ext == ".pgm")
                    names.push_back(entry.path().string());
            }
            std::sort(names.begin(), names.end());
            for (const std::string& name : names)
                inputs.push_back(load_image(name));
            if (inputs.empty())
                throw sclreg::ArgumentError("no .field or .pgm files in '" + mkds_inputs_dir +
                                            "'");
        } else if (mkds_textures > 0) {
            for (std::size_t i = 0; i < mkds_textures; ++i)
                inputs.push_back(sclreg::make_texture(
                    mkds_h, mkds_w, sclreg::derive_seed(mkds_texture_seed, {1, i}), mkds_corr));
        } else {
            throw sclreg::ArgumentError("pass either --inputs or --textures");
        }
        fs::create_directories(mkds_outdir);
        const std::vector<sclreg::ImagePair> pairs =
            sclreg::make_dataset(inputs, kernel, {mkds_snr, mkds_noise_seed});
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            sclreg::save_field(pairs[i].first, pair_path(mkds_outdir, mkds_prefix, i, "in"));
            sclreg::save_field(pairs[i].second, pair_path(mkds_outdir, mkds_prefix, i, "out"));
        }
        std::cout << "wrote " << pairs.size() << " pairs to " << mkds_outdir << "\n";
    });

    // stats: accumulate sufficient statistics over pairs.
    auto* stats_cmd = app.add_subcommand(
        "stats", "Accumulate frequency-domain sufficient statistics over image pairs");
    std::vector<std::string> stats_files;
    std::string stats_out;
    bool stats_append = false;
    stats_cmd->add_option("files", stats_files, "Image files: input output input output ...");
    stats_cmd->add_option("--out", stats_out, "Statistics file to write")->required();
    stats_cmd->add_flag("--append", stats_append,
                        "Fold the new pairs into an existing statistics file");
    stats_cmd->callback([&] {
        const std::vector<sclreg::ImagePair> pairs = load_pairs(stats_files);
        sclreg::SufficientStatistics stats;
        if (stats_append) {
            stats = sclreg::load_stats(stats_out);
        } else {
            stats = sclreg::SufficientStatistics(pairs.front().first.height(),
                                                 pairs.front().first.width());
        }
        const sclreg::DftPlan plan(stats.height, stats.width);
        for (const sclreg::ImagePair& p : pairs)
            stats.accumulate(p.first, p.second, plan);
        sclreg::save_stats(stats, stats_out);
        std::cout << "statistics: " << stats.n_pairs << " pairs, " << stats.height << "x"
                  << stats.width << " -> " << stats_out << "\n";
    });

    // fit: solve for the kernel at a given regularization weight.
    auto* fit_cmd = app.add_subcommand("fit", "Fit a kernel from a statistics file");
    std::string fit_stats, fit_out;
    double fit_lambda = 0.0;
    bool fit_strict = false;
    sclreg::SolverOptions fit_opts;
    fit_cmd->add_option("--stats", fit_stats, "Statistics file")->required();
    fit_cmd->add_option("--lambda", fit_lambda, "Regularization weight (0 = plain regression)")
        ->required();
    fit_cmd->add_option("--tolerance", fit_opts.tolerance,
                        "Relative per-sweep change at which to stop");
    fit_cmd->add_option("--max-iterations", fit_opts.max_iterations, "Sweep budget");
    fit_cmd->add_option("--out", fit_out, "Output kernel field file")->required();
    fit_cmd->add_flag("--strict", fit_strict, "Exit 3 if the solver did not converge");
    fit_cmd->callback([&] {
        const sclreg::SufficientStatistics stats = sclreg::load_stats(fit_stats);
        const sclreg::KernelEstimate est =
            sclreg::solve_regularized(stats, fit_lambda, fit_opts);
        sclreg::save_field(est.kernel, fit_out);
        const sclreg::DftPlan plan(stats.height, stats.width);
        const double residual =
            sclreg::optimality_residual_inf(stats, plan.forward(est.kernel), fit_lambda);
        std::cout << "lambda " << est.lambda << ", " << est.iterations << " sweeps, "
                  << (est.converged ? "converged" : "NOT converged") << " (last change "
                  << est.final_residual << ", optimality residual " << residual << ")\n";
        std::cout << "note: the data term is a plain sum over the " << stats.n_pairs
                  << " accumulated pairs, so the effective regularization strength scales as "
                     "lambda / n_pairs\n";
        std::cout << "wrote " << fit_out << "\n";
        if (fit_strict && !est.converged)
            rc = 3;
    });

    // predict: convolve an image with a kernel.
    auto* pred = app.add_subcommand("predict", "Apply a kernel to an image");
    std::string pred_kernel, pred_in, pred_out;
    double pred_lo = 0.0, pred_hi = 1.0;
    pred->add_option("--kernel", pred_kernel, "Kernel field file")->required();
    pred->add_option("--input", pred_in, "Input image (.field or .pgm)")->required();
    pred->add_option("--out", pred_out, "Output image (.field, or .pgm with clipping)")
        ->required();
    pred->add_option("--clip-lo", pred_lo, "Lower clip bound for .pgm output");
    pred->add_option("--clip-hi", pred_hi, "Upper clip bound for .pgm output");
    pred->callback([&] {
        const sclreg::ImageGrid kernel = sclreg::load_field_real(pred_kernel);
        const sclreg::ImageGrid input = load_image(pred_in);
        const sclreg::ImageGrid out = sclreg::circ_convolve(input, kernel);
        if (has_extension(pred_out, ".pgm")) {
            sclreg::save_pgm(out, pred_out, pred_lo, pred_hi);
            const double frac = sclreg::clipped_fraction(out, pred_lo, pred_hi);
            std::cout << "wrote " << pred_out << " (clipped fraction " << frac << ")\n";
        } else {
            sclreg::save_field(out, pred_out);
            std::cout << "wrote " << pred_out << "\n";
        }
    });

    // evaluate: mean squared prediction error of a kernel over pairs.
    auto* eval_cmd = app.add_subcommand("evaluate", "Report per-pair and mean prediction MSE");
    std::string eval_kernel;
    std::vector<std::string> eval_files;
    eval_cmd->add_option("--kernel", eval_kernel, "Kernel field file")->required();
    eval_cmd->add_option("files", eval_files, "Image files: input output input output ...");
    eval_cmd->callback([&] {
        const sclreg::ImageGrid kernel = sclreg::load_field_real(eval_kernel);
        const std::vector<sclreg::ImagePair> pairs = load_pairs(eval_files);
        const sclreg::DftPlan plan(kernel.height(), kernel.width());
        double total = 0.0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const sclreg::ImageGrid p = sclreg::circ_convolve(pairs[i].first, kernel, plan);
            const double err = sclreg::mse(p, pairs[i].second);
            total += err;
            std::cout << "pair " << i << ": mse " << err << "\n";
        }
        std::cout << "mean mse " << total / static_cast<double>(pairs.size()) << "\n";
    });

    // experiment: run a configured sweep and emit the CSV.
    auto* exp_cmd = app.add_subcommand("experiment", "Run a config-driven sweep, emit CSV");
    std::string exp_config, exp_out;
    exp_cmd->add_option("--config", exp_config, "Key = value config file")->required();
    exp_cmd->add_option("--out", exp_out, "Output CSV path")->required();
    exp_cmd->callback([&] {
        const sclreg::ExperimentConfig config = sclreg::parse_config(exp_config);
        const std::vector<sclreg::ExperimentRecord> records = sclreg::run_experiment(config);
        sclreg::emit_csv(records, exp_out);
        std::cout << "wrote " << records.size() << " records to " << exp_out << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const sclreg::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const sclreg::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const sclreg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
