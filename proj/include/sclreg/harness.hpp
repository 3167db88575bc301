#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sclreg/estimator.hpp"
#include "sclreg/grid.hpp"
#include "sclreg/synth.hpp"

namespace sclreg {

/// Sweep specification: the cross product of SNR levels, training-set
/// sizes and repetitions, with one fit per lambda in each cell. The whole
/// run is a pure function of this config (see run_experiment).
struct ExperimentConfig {
    std::size_t image_height = 128, image_width = 128;
    std::size_t n_images = 8;
    std::vector<double> snr_db_list;
    std::vector<double> lambda_list;
    std::vector<std::size_t> train_sizes;
    std::size_t repetitions = 1;
    std::uint64_t base_seed = 0;
    ZeroSumKernelSpec kernel_spec;
    double texture_correlation_length = 2.0;
    SolverOptions solver;

    void validate() const;
};

struct ExperimentRecord {
    double snr_db = 0.0;
    double lambda = 0.0;
    std::size_t train_size = 0;
    std::size_t repetition = 0;
    double test_mse = 0.0;       // vs noisy held-out outputs
    double log10_mse = 0.0;      // log10(test_mse)
    double test_mse_clean = 0.0; // vs noiseless held-out outputs
    double noise_floor = 0.0;    // mean sigma^2 over the test images
    double clipped_fraction = 0.0; // learned kernel vs [2*min(u0), 2*max(u0)]
    std::size_t solver_iterations = 0;
    bool converged = false;
    std::vector<std::size_t> train_image_ids;
};

/// Mean per-pixel squared difference.
double mse(const ImageGrid& predicted, const ImageGrid& target);

/// Mean noise variance sigma^2 over the given clean outputs at the stated
/// SNR: the expected squared error of even the true kernel against noisy
/// targets, hence the floor of every test error.
double noise_floor(double snr_db, const std::vector<ImageGrid>& clean_test_outputs);

/// Runs the full sweep. Deterministic given the config: textures, splits
/// and noise streams all derive from base_seed (texture i uses
/// derive_seed(base, {1, i}); cell (si, ti, rep) uses {2, si, ti, rep} for
/// noise and {3, si, ti, rep} for the train/test split). Solver divergence
/// marks the record failed (converged false, NaN errors) and the run
/// continues.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

struct TTestResult {
    double t = 0.0;
    double p_two_sided = 1.0;
    /// All differences equal and nonzero: t is unbounded, p reported as 0.
    bool degenerate = false;
};

/// Paired two-sided t-test: t = mean(d) / (sd(d)/sqrt(n)) with the n-1
/// sample standard deviation, p from the t distribution with n-1 degrees
/// of freedom via the regularized incomplete beta function.
TTestResult paired_t_test(const std::vector<double>& errors_a, const std::vector<double>& errors_b);

/// Regularized incomplete beta I_x(a, b) (continued-fraction evaluation).
double regularized_incomplete_beta(double a, double b, double x);

// CSV emission: header then one row per record, RFC-4180 quoting, numbers
// at 17 significant digits (value-exact round trip). Fixed column order:
//   snr_db, lambda, train_size, repetition, test_mse, log10_mse,
//   test_mse_clean, noise_floor, clipped_fraction, solver_iterations,
//   converged, train_image_ids
// train_image_ids is a semicolon-joined list; converged is 0/1.
std::string csv_header();
void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path);
std::vector<ExperimentRecord> parse_csv(const std::string& path);

/// Flat key = value config file, one pair per line, '#' comments, lists
/// whitespace- or comma-separated. Keys: image_height, image_width,
/// n_images, snr_db_list, lambda_list, train_sizes, repetitions, base_seed,
/// kernel_height, kernel_width (default: image size), kernel_r_positive,
/// kernel_r_inner, kernel_r_outer, texture_correlation_length,
/// solver_tolerance, solver_max_iterations.
ExperimentConfig parse_config(const std::string& path);

} // namespace sclreg
