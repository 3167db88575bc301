#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sclreg/grid.hpp"
#include "sclreg/spectral.hpp"

namespace sclreg {

using ImagePair = std::pair<ImageGrid, ImageGrid>;
using SpectralPair = std::pair<SpectralField, SpectralField>;

/// Frequency-wise sufficient statistics of a training set: the pair
/// (sum |a_hat_i|^2, sum conj(a_hat_i) b_hat_i) over input/output image
/// pairs, plus the pair count. Together with the regularization weight
/// these fully determine the solution; solve cost does not depend on how
/// many pairs were accumulated.
///
/// Value type; accumulate/merge require exclusive access. Solves on
/// distinct statistics may run fully in parallel.
struct SufficientStatistics {
    std::size_t height = 0, width = 0;
    std::uint64_t n_pairs = 0;
    std::vector<double> aa; // sum |a_hat|^2, elementwise nonnegative
    std::vector<cplx> ab;   // sum conj(a_hat) * b_hat, Hermitian

    SufficientStatistics() = default;
    SufficientStatistics(std::size_t h, std::size_t w);

    /// Folds one input/output pair into the statistics.
    void accumulate(const ImageGrid& input, const ImageGrid& output, const DftPlan& plan);
};

SufficientStatistics merge(const SufficientStatistics& s1, const SufficientStatistics& s2);

// Persistence: a text header at `path` (magic SCLREGSTATS1, n_pairs,
// height, width) plus two FieldFiles at `path`.aa (real) and `path`.ab
// (complex).
void save_stats(const SufficientStatistics& stats, const std::string& path);
SufficientStatistics load_stats(const std::string& path);

struct SolverOptions {
    /// Stop when the relative sup-norm change of a sweep drops to this.
    double tolerance = 1e-10;
    std::size_t max_iterations = 100000;
    /// Ridge added to the closed-form denominator at lambda = 0 where the
    /// input spectrum may vanish. Defaults to 1e-12 * max(aa).
    std::optional<double> epsilon_ridge;
    /// Optional per-sweep relative-change log (diagnostics).
    std::vector<double>* change_log = nullptr;
};

struct KernelEstimate {
    ImageGrid kernel;
    double lambda = 0.0;
    std::size_t iterations = 0;
    double final_residual = 0.0; // relative sup-norm change of the last sweep
    bool converged = false;
};

/// Unregularized spectral division u_hat = ab / (aa + eps), inverted to the
/// spatial kernel. Requires n_pairs >= 1.
KernelEstimate solve_closed_form(const SufficientStatistics& stats, const SolverOptions& opts = {});

/// One simultaneous-update relaxation sweep of the optimality system
///   aa .* u_hat - ab - (lambda/4pi^2) Lap(u_hat) = 0,
/// with the 5-point periodic Laplacian on the frequency grid:
///   u_hat+[ij] = (ab[ij] + lambda/(4pi^2) * (4-neighbor sum))
///                / (aa[ij] + lambda/pi^2 + eps).
/// Hermitian inputs produce Hermitian output, so the iterate stays the
/// transform of a real signal. Non-finite output raises SolverError naming
/// the offending bin.
SpectralField jacobi_step(const SpectralField& u_hat, const SufficientStatistics& stats,
                          double lambda, double eps = 0.0);

/// Iterates jacobi_step from u0 = ab / (aa + lambda/pi^2 + eps) until the
/// relative sup-norm change per sweep reaches opts.tolerance and the
/// optimality residual of the returned iterate is within
/// 10 * tolerance * max|ab|, or max_iterations is exhausted (converged is
/// false then; the estimate is still returned). lambda = 0 takes the
/// closed-form path.
KernelEstimate solve_regularized(const SufficientStatistics& stats, double lambda,
                                 const SolverOptions& opts = {});

/// Sup-norm of aa .* u_hat - ab - (lambda/4pi^2) Lap(u_hat).
double optimality_residual_inf(const SufficientStatistics& stats, const SpectralField& u_hat,
                               double lambda);

/// Empirical objective in the spatial domain:
///   (1/N) sum_i sum_x |(alpha_i (*) u)(x) - beta_i(x)|^2
///     + lambda * sum_x w(x) u(x)^2
/// with w(x) the discrete distance weight (see penalty_weight).
double objective_spatial(const ImageGrid& kernel, const std::vector<ImagePair>& pairs,
                         double lambda);

/// The same objective evaluated on the frequency grid,
///   c_N * [ (1/N) sum_i ||a_hat_i u_hat - b_hat_i||^2
///           + lambda * gradient_energy(u_hat) ],
/// numerically identical to objective_spatial by the Parseval identities.
/// Needs the per-pair spectra; the residual norm is not a function of the
/// sufficient statistics alone.
double objective_spectral(const SpectralField& u_hat, const std::vector<SpectralPair>& pairs,
                          double lambda);
double objective_spectral(const SpectralField& u_hat, const std::vector<ImagePair>& pairs,
                          double lambda, const DftPlan& plan);

/// Note: the optimality system carries no 1/N factor on the data term
/// (the statistics are plain sums), so for fixed lambda the effective
/// penalty-to-data ratio scales as lambda / n_pairs. In terms of the
/// objective above, solve_regularized(stats, lambda) minimizes the
/// configuration with objective weight lambda / (4 pi^2 n_pairs).
double objective_lambda_for_solver(double solver_lambda, std::uint64_t n_pairs);

} // namespace sclreg
