#include "sclreg/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sclreg/errors.hpp"
#include "sclreg/rng.hpp"
#include "sclreg/spectral.hpp"

namespace sclreg {
namespace {

// Signed min-image offset of index i on a ring of length n, in [-n/2, n/2].
double wrapped_offset(std::size_t i, std::size_t n) {
    const double x = static_cast<double>(i);
    const double len = static_cast<double>(n);
    return x <= len / 2.0 ? x : x - len;
}

} // namespace

ImageGrid make_zero_sum_kernel(const ZeroSumKernelSpec& spec) {
    if (spec.height == 0 || spec.width == 0)
        throw ArgumentError("kernel spec: dimensions must be positive");
    if (!std::isfinite(spec.r_positive) || !std::isfinite(spec.r_inner) ||
        !std::isfinite(spec.r_outer))
        throw ArgumentError("kernel spec: radii must be finite");
    if (spec.r_positive <= 0.0)
        throw ArgumentError("kernel spec: r_positive must be positive");
    if (spec.r_inner < spec.r_positive)
        throw ArgumentError("kernel spec: r_inner must be >= r_positive");
    if (spec.r_outer <= spec.r_inner)
        throw ArgumentError("kernel spec: r_outer must exceed r_inner");

    const std::size_t h = spec.height, w = spec.width;
    std::vector<char> positive(h * w, 0), negative(h * w, 0);
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < h; ++i) {
        const double di = static_cast<double>(std::min(i, h - i));
        for (std::size_t j = 0; j < w; ++j) {
            const double dj = static_cast<double>(std::min(j, w - j));
            const double d = std::hypot(di, dj);
            if (d <= spec.r_positive) {
                positive[i * w + j] = 1;
                ++n_pos;
            } else if (d > spec.r_inner && d <= spec.r_outer) {
                negative[i * w + j] = 1;
                ++n_neg;
            }
        }
    }
    if (n_pos == 0)
        throw ArgumentError("kernel spec: no pixels fall in the positive disk");
    if (n_neg == 0)
        throw ArgumentError("kernel spec: no pixels fall in the negative annulus");

    const double p = static_cast<double>(n_neg) / static_cast<double>(n_pos);
    ImageGrid kernel(h, w, 0.0);
    for (std::size_t k = 0; k < h * w; ++k) {
        if (positive[k])
            kernel.data()[k] = p;
        else if (negative[k])
            kernel.data()[k] = -1.0;
    }
    return kernel;
}

double snr_to_sigma(const ImageGrid& clean, double snr_db) {
    if (!std::isfinite(snr_db))
        throw ArgumentError("snr_db must be finite");
    const double var = mean_variance(clean).second;
    if (var <= 0.0)
        throw ArgumentError("snr_to_sigma: image is constant, SNR is undefined");
    return std::sqrt(var / std::pow(10.0, snr_db / 10.0));
}

ImageGrid add_noise(const ImageGrid& clean, const NoiseSpec& spec) {
    const double sigma = snr_to_sigma(clean, spec.snr_db);
    Rng rng(spec.seed);
    ImageGrid out(clean.height(), clean.width());
    // Row-major draw order: part of the reproducibility contract.
    for (std::size_t k = 0; k < out.size(); ++k)
        out.data()[k] = clean.data()[k] + sigma * rng.normal();
    return out;
}

Dataset make_dataset_full(const std::vector<ImageGrid>& inputs, const ImageGrid& kernel,
                          const NoiseSpec& spec) {
    if (inputs.empty())
        throw ArgumentError("make_dataset: no input images");
    for (const ImageGrid& img : inputs)
        if (!img.same_shape(kernel))
            throw ArgumentError("make_dataset: input shape " + std::to_string(img.height()) + "x" +
                                std::to_string(img.width()) + " does not match the kernel");
    const DftPlan plan(kernel.height(), kernel.width());
    Dataset out;
    out.pairs.reserve(inputs.size());
    out.clean_outputs.reserve(inputs.size());
    out.sigmas.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        ImageGrid clean = circ_convolve(inputs[i], kernel, plan);
        const NoiseSpec per{spec.snr_db, spec.seed + i};
        out.sigmas.push_back(snr_to_sigma(clean, per.snr_db));
        out.pairs.emplace_back(inputs[i], add_noise(clean, per));
        out.clean_outputs.push_back(std::move(clean));
    }
    return out;
}

std::vector<ImagePair> make_dataset(const std::vector<ImageGrid>& inputs, const ImageGrid& kernel,
                                    const NoiseSpec& spec) {
    return make_dataset_full(inputs, kernel, spec).pairs;
}

ImageGrid make_texture(std::size_t height, std::size_t width, std::uint64_t seed,
                       double correlation_length) {
    if (height == 0 || width == 0)
        throw ArgumentError("make_texture: dimensions must be positive");
    if (height * width < 2)
        throw ArgumentError("make_texture: normalization needs at least two pixels");
    if (!std::isfinite(correlation_length) || correlation_length < 0.0)
        throw ArgumentError("make_texture: correlation_length must be finite and nonnegative");

    Rng rng(seed);
    ImageGrid white(height, width);
    for (std::size_t k = 0; k < white.size(); ++k)
        white.data()[k] = rng.normal();

    const DftPlan plan(height, width);
    SpectralField spectrum = plan.forward(white);
    // Periodic Gaussian smoothing: the transfer of a continuous Gaussian of
    // width ell sampled at the wrapped integer frequencies. Real and even,
    // so conjugate symmetry is preserved.
    const double two_pi_sq = 2.0 * std::numbers::pi * std::numbers::pi;
    const double ell_sq = correlation_length * correlation_length;
    for (std::size_t i = 0; i < height; ++i) {
        const double fi = wrapped_offset(i, height) / static_cast<double>(height);
        for (std::size_t j = 0; j < width; ++j) {
            const double fj = wrapped_offset(j, width) / static_cast<double>(width);
            spectrum.at(i, j) *= std::exp(-two_pi_sq * ell_sq * (fi * fi + fj * fj));
        }
    }
    spectrum.set_hermitian(true);
    ImageGrid smooth = plan.inverse(spectrum);

    const auto [mean, var] = mean_variance(smooth);
    if (var <= 0.0)
        throw Error("make_texture: degenerate sample, cannot normalize");
    const double inv_sd = 1.0 / std::sqrt(var);
    ImageGrid out(height, width);
    for (std::size_t k = 0; k < out.size(); ++k)
        out.data()[k] = (smooth.data()[k] - mean) * inv_sd;
    return out;
}

} // namespace sclreg
