#include "sclreg/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "sclreg/errors.hpp"
#include "sclreg/field_io.hpp"
#include "sclreg/kernels.hpp"

namespace sclreg {
namespace {

void check_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw ArgumentError("regularization weight must be finite and nonnegative, got " +
                            std::to_string(lambda));
}

void check_stats_shape(const SufficientStatistics& stats) {
    if (stats.height == 0 || stats.width == 0)
        throw ArgumentError("statistics have empty shape");
    const std::size_t n = stats.height * stats.width;
    if (stats.aa.size() != n || stats.ab.size() != n)
        throw ArgumentError("statistics payload length does not match " +
                            std::to_string(stats.height) + "x" + std::to_string(stats.width));
}

// Default ridge for denominators that may touch zero: negligible against
// any populated frequency, nonzero even for an all-zero spectrum.
double default_ridge(const std::vector<double>& aa) {
    const double top = kern::active_ops().max_abs(aa.data(), aa.size());
    const double eps = 1e-12 * top;
    return eps > 0.0 ? eps : std::numeric_limits<double>::min();
}

double resolve_ridge(const SufficientStatistics& stats, const SolverOptions& opts) {
    if (opts.epsilon_ridge) {
        const double eps = *opts.epsilon_ridge;
        if (!std::isfinite(eps) || eps < 0.0)
            throw ArgumentError("epsilon_ridge must be finite and nonnegative");
        return eps;
    }
    return default_ridge(stats.aa);
}

// Scans a solver iterate for non-finite bins and names the first offender.
void check_finite_field(const SpectralField& f, const char* what) {
    for (std::size_t i = 0; i < f.height(); ++i)
        for (std::size_t j = 0; j < f.width(); ++j) {
            const cplx z = f.at(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw SolverError(std::string(what) + ": non-finite value at bin (" +
                                  std::to_string(i) + ", " + std::to_string(j) + ")");
        }
}

constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;

} // namespace

SufficientStatistics::SufficientStatistics(std::size_t h, std::size_t w)
    : height(h), width(w), aa(h * w, 0.0), ab(h * w, cplx(0.0, 0.0)) {
    if (h == 0 || w == 0)
        throw ArgumentError("SufficientStatistics: dimensions must be positive");
}

void SufficientStatistics::accumulate(const ImageGrid& input, const ImageGrid& output,
                                      const DftPlan& plan) {
    check_stats_shape(*this);
    if (input.height() != height || input.width() != width)
        throw ArgumentError("accumulate: input is " + std::to_string(input.height()) + "x" +
                            std::to_string(input.width()) + ", statistics are " +
                            std::to_string(height) + "x" + std::to_string(width));
    if (!input.same_shape(output))
        throw ArgumentError("accumulate: input and output shapes differ");
    if (plan.height() != height || plan.width() != width)
        throw ArgumentError("accumulate: plan shape does not match the statistics");
    const SpectralField fa = plan.forward(input);
    const SpectralField fb = plan.forward(output);
    kern::active_ops().accumulate(aa.data(), ab.data(), fa.data(), fb.data(), aa.size());
    ++n_pairs;
}

SufficientStatistics merge(const SufficientStatistics& s1, const SufficientStatistics& s2) {
    check_stats_shape(s1);
    check_stats_shape(s2);
    if (s1.height != s2.height || s1.width != s2.width)
        throw ArgumentError("merge: statistics shapes differ (" + std::to_string(s1.height) + "x" +
                            std::to_string(s1.width) + " vs " + std::to_string(s2.height) + "x" +
                            std::to_string(s2.width) + ")");
    SufficientStatistics out(s1.height, s1.width);
    out.n_pairs = s1.n_pairs + s2.n_pairs;
    for (std::size_t k = 0; k < out.aa.size(); ++k) {
        out.aa[k] = s1.aa[k] + s2.aa[k];
        out.ab[k] = s1.ab[k] + s2.ab[k];
    }
    return out;
}

void save_stats(const SufficientStatistics& stats, const std::string& path) {
    check_stats_shape(stats);
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << "SCLREGSTATS1\n";
    out << "n_pairs " << stats.n_pairs << "\n";
    out << "height " << stats.height << "\n";
    out << "width " << stats.width << "\n";
    out.flush();
    if (!out)
        throw IoError("write to '" + path + "' failed");
    save_field(ImageGrid(stats.height, stats.width, stats.aa), path + ".aa");
    save_field(SpectralField(stats.height, stats.width, stats.ab), path + ".ab");
}

SufficientStatistics load_stats(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::string magic, key;
    unsigned long long n_pairs = 0, height = 0, width = 0;
    in >> magic;
    if (!in || magic != "SCLREGSTATS1")
        throw FormatError("'" + path + "': missing SCLREGSTATS1 header");
    in >> key >> n_pairs;
    if (!in || key != "n_pairs")
        throw FormatError("'" + path + "': expected 'n_pairs <count>'");
    in >> key >> height;
    if (!in || key != "height")
        throw FormatError("'" + path + "': expected 'height <rows>'");
    in >> key >> width;
    if (!in || key != "width")
        throw FormatError("'" + path + "': expected 'width <columns>'");
    if (height == 0 || width == 0)
        throw FormatError("'" + path + "': dimensions must be positive");

    ImageGrid aa = load_field_real(path + ".aa");
    SpectralField ab = load_field_complex(path + ".ab");
    if (aa.height() != height || aa.width() != width)
        throw FormatError("'" + path + ".aa': field is " + std::to_string(aa.height()) + "x" +
                          std::to_string(aa.width()) + " but the header says " +
                          std::to_string(height) + "x" + std::to_string(width));
    if (ab.height() != height || ab.width() != width)
        throw FormatError("'" + path + ".ab': field is " + std::to_string(ab.height()) + "x" +
                          std::to_string(ab.width()) + " but the header says " +
                          std::to_string(height) + "x" + std::to_string(width));
    for (std::size_t k = 0; k < aa.size(); ++k)
        if (aa.data()[k] < 0.0)
            throw FormatError("'" + path + ".aa': negative power at index " + std::to_string(k));

    SufficientStatistics stats(height, width);
    stats.n_pairs = n_pairs;
    stats.aa = aa.values();
    stats.ab = ab.values();
    return stats;
}

KernelEstimate solve_closed_form(const SufficientStatistics& stats, const SolverOptions& opts) {
    check_stats_shape(stats);
    if (stats.n_pairs == 0)
        throw ArgumentError("solve: statistics hold no pairs");
    const double eps = resolve_ridge(stats, opts);
    const std::size_t n = stats.aa.size();
    std::vector<double> weight(n);
    for (std::size_t k = 0; k < n; ++k)
        weight[k] = 1.0 / (stats.aa[k] + eps);
    SpectralField u_hat(stats.height, stats.width);
    kern::active_ops().cscale(u_hat.data(), stats.ab.data(), weight.data(), n);
    check_finite_field(u_hat, "solve_closed_form");
    u_hat.set_hermitian(true);
    const DftPlan plan(stats.height, stats.width);
    KernelEstimate est;
    est.kernel = plan.inverse(u_hat);
    est.lambda = 0.0;
    est.iterations = 0;
    est.final_residual = 0.0;
    est.converged = true;
    return est;
}

SpectralField jacobi_step(const SpectralField& u_hat, const SufficientStatistics& stats,
                          double lambda, double eps) {
    check_stats_shape(stats);
    check_lambda(lambda);
    if (!std::isfinite(eps) || eps < 0.0)
        throw ArgumentError("eps must be finite and nonnegative");
    if (u_hat.height() != stats.height || u_hat.width() != stats.width)
        throw ArgumentError("jacobi_step: field is " + std::to_string(u_hat.height()) + "x" +
                            std::to_string(u_hat.width()) + ", statistics are " +
                            std::to_string(stats.height) + "x" + std::to_string(stats.width));
    const double coef = lambda / four_pi_sq;
    const std::size_t n = stats.aa.size();
    std::vector<double> den(n), rden(n);
    for (std::size_t k = 0; k < n; ++k) {
        den[k] = stats.aa[k] + 4.0 * coef + eps;
        rden[k] = 1.0 / den[k];
    }
    SpectralField next(stats.height, stats.width);
    kern::active_ops().jacobi_sweep(next.data(), u_hat.data(), stats.ab.data(), den.data(),
                                    rden.data(), coef, stats.height, stats.width);
    check_finite_field(next, "jacobi_step");
    next.set_hermitian(u_hat.hermitian());
    return next;
}

KernelEstimate solve_regularized(const SufficientStatistics& stats, double lambda,
                                 const SolverOptions& opts) {
    check_stats_shape(stats);
    check_lambda(lambda);
    if (stats.n_pairs == 0)
        throw ArgumentError("solve: statistics hold no pairs");
    if (!(opts.tolerance > 0.0) || !std::isfinite(opts.tolerance))
        throw ArgumentError("tolerance must be positive and finite");
    if (lambda == 0.0)
        return solve_closed_form(stats, opts);

    const kern::Ops& ops = kern::active_ops();
    const double eps = resolve_ridge(stats, opts);
    const double coef = lambda / four_pi_sq;
    const std::size_t h = stats.height, w = stats.width, n = h * w;

    std::vector<double> den(n), rden(n);
    for (std::size_t k = 0; k < n; ++k) {
        den[k] = stats.aa[k] + 4.0 * coef + eps;
        rden[k] = 1.0 / den[k];
    }

    // Start from the decoupled (Laplacian-free) solution; each sweep then
    // feeds back the smoothing term.
    SpectralField src(h, w), dst(h, w);
    ops.cscale(src.data(), stats.ab.data(), rden.data(), n);

    const double ab_inf = std::sqrt(ops.cmax_abs_sq(stats.ab.data(), n));
    const double residual_limit = 10.0 * opts.tolerance * ab_inf;

    bool converged = false;
    double last_rel = std::numeric_limits<double>::infinity();
    std::size_t sweeps = 0;
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        const kern::SweepResult r = ops.jacobi_sweep(dst.data(), src.data(), stats.ab.data(),
                                                     den.data(), rden.data(), coef, h, w);
        ++sweeps;
        const double value_inf = std::sqrt(r.max_value_sq);
        const double change_inf = std::sqrt(r.max_change_sq);
        double rel = std::numeric_limits<double>::infinity();
        if (value_inf > 0.0)
            rel = change_inf / value_inf;
        else if (change_inf == 0.0)
            rel = 0.0;
        if (opts.change_log != nullptr)
            opts.change_log->push_back(rel);
        last_rel = rel;
        // The sweep residual D*(dst - src) equals (up to sign) the
        // optimality residual of src, so a converged stop certifies the
        // iterate we return without extra work.
        if (rel <= opts.tolerance && std::sqrt(r.max_residual_sq) <= residual_limit) {
            converged = true;
            break;
        }
        std::swap(src, dst);
    }

    check_finite_field(src, "solve_regularized");
    src.set_hermitian(true);
    const DftPlan plan(h, w);
    KernelEstimate est;
    est.kernel = plan.inverse(src);
    est.lambda = lambda;
    est.iterations = sweeps;
    est.final_residual = last_rel;
    est.converged = converged;
    return est;
}

double optimality_residual_inf(const SufficientStatistics& stats, const SpectralField& u_hat,
                               double lambda) {
    check_stats_shape(stats);
    check_lambda(lambda);
    if (u_hat.height() != stats.height || u_hat.width() != stats.width)
        throw ArgumentError("optimality_residual_inf: field shape does not match the statistics");
    const double coef = lambda / four_pi_sq;
    const std::size_t h = stats.height, w = stats.width;
    double worst = 0.0;
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const cplx lap = u_hat.at((i + h - 1) % h, j) + u_hat.at((i + 1) % h, j) +
                             u_hat.at(i, (j + w - 1) % w) + u_hat.at(i, (j + 1) % w) -
                             4.0 * u_hat.at(i, j);
            const cplx r =
                stats.aa[i * w + j] * u_hat.at(i, j) - stats.ab[i * w + j] - coef * lap;
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

double objective_spatial(const ImageGrid& kernel, const std::vector<ImagePair>& pairs,
                         double lambda) {
    check_lambda(lambda);
    if (pairs.empty())
        throw ArgumentError("objective: no image pairs");
    const std::size_t h = kernel.height(), w = kernel.width();
    const DftPlan plan(h, w);
    const kern::Ops& ops = kern::active_ops();
    double data = 0.0;
    for (const ImagePair& p : pairs) {
        if (p.first.height() != h || p.first.width() != w || !p.first.same_shape(p.second))
            throw ArgumentError("objective: image pair shape does not match the kernel");
        const ImageGrid out = circ_convolve(p.first, kernel, plan);
        data += ops.sum_sq_diff(out.data(), p.second.data(), out.size());
    }
    data /= static_cast<double>(pairs.size());
    double penalty = 0.0;
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            const double v = kernel.at(i, j);
            penalty += penalty_weight(i, j, h, w) * v * v;
        }
    return data + lambda * penalty;
}

double objective_spectral(const SpectralField& u_hat, const std::vector<SpectralPair>& pairs,
                          double lambda) {
    check_lambda(lambda);
    if (pairs.empty())
        throw ArgumentError("objective: no spectral pairs");
    const std::size_t h = u_hat.height(), w = u_hat.width();
    const kern::Ops& ops = kern::active_ops();
    double data = 0.0;
    for (const SpectralPair& p : pairs) {
        if (p.first.height() != h || p.first.width() != w || !p.first.same_shape(p.second))
            throw ArgumentError("objective: spectral pair shape does not match the field");
        data += ops.cresidual_sum_sq(p.first.data(), u_hat.data(), p.second.data(), u_hat.size());
    }
    data /= static_cast<double>(pairs.size());
    const double c_n = 1.0 / (static_cast<double>(h) * static_cast<double>(w));
    return c_n * (data + lambda * spectral_gradient_energy(u_hat));
}

double objective_spectral(const SpectralField& u_hat, const std::vector<ImagePair>& pairs,
                          double lambda, const DftPlan& plan) {
    std::vector<SpectralPair> spectra;
    spectra.reserve(pairs.size());
    for (const ImagePair& p : pairs)
        spectra.emplace_back(plan.forward(p.first), plan.forward(p.second));
    return objective_spectral(u_hat, spectra, lambda);
}

double objective_lambda_for_solver(double solver_lambda, std::uint64_t n_pairs) {
    check_lambda(solver_lambda);
    if (n_pairs == 0)
        throw ArgumentError("objective_lambda_for_solver: pair count must be positive");
    return solver_lambda / (four_pi_sq * static_cast<double>(n_pairs));
}

} // namespace sclreg
