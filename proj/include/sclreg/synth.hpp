#pragma once

#include <cstdint>
#include <vector>

#include "sclreg/estimator.hpp"
#include "sclreg/grid.hpp"

namespace sclreg {

/// Deterministic geometry of a zero-sum test kernel: a positive disk at the
/// origin surrounded by a negative annulus, under the periodic min-image
/// distance. Negative pixels take value -1; positive pixels share the value
/// p = (#negative)/(#positive), so the kernel sums to zero.
struct ZeroSumKernelSpec {
    std::size_t height = 0, width = 0;
    double r_positive = 0.0; // disk: d <= r_positive
    double r_inner = 0.0;    // annulus: r_inner < d <= r_outer, r_inner >= r_positive
    double r_outer = 0.0;
};

struct NoiseSpec {
    double snr_db = 0.0;
    std::uint64_t seed = 0;
};

ImageGrid make_zero_sum_kernel(const ZeroSumKernelSpec& spec);

/// Noise level for a requested SNR: sigma = sqrt(Var(clean) / 10^(snr_db/10)),
/// with Var the per-pixel variance of the clean image. Variance-based signal
/// power keeps the definition insensitive to DC offsets, which the zero-sum
/// kernels remove anyway. Constant images are rejected.
double snr_to_sigma(const ImageGrid& clean, double snr_db);

/// clean + i.i.d. N(0, sigma^2) per pixel; bit-reproducible given the seed.
ImageGrid add_noise(const ImageGrid& clean, const NoiseSpec& spec);

/// Builds (input, output) pairs: output_i = (input_i (*) kernel) + noise_i,
/// with the noise stream of image i seeded by spec.seed + i.
std::vector<ImagePair> make_dataset(const std::vector<ImageGrid>& inputs, const ImageGrid& kernel,
                                    const NoiseSpec& spec);

/// Dataset plus the noiseless outputs and per-image noise sigmas; the
/// harness needs all three.
struct Dataset {
    std::vector<ImagePair> pairs;
    std::vector<ImageGrid> clean_outputs;
    std::vector<double> sigmas;
};
Dataset make_dataset_full(const std::vector<ImageGrid>& inputs, const ImageGrid& kernel,
                          const NoiseSpec& spec);

/// Stationary Gaussian random field: white noise smoothed by a periodic
/// isotropic Gaussian of standard deviation correlation_length pixels, then
/// shifted and scaled to zero sample mean and unit (population) variance.
/// Every nonzero frequency bin is nonvanishing almost surely; the DC bin is
/// rounding-level small after the normalization.
ImageGrid make_texture(std::size_t height, std::size_t width, std::uint64_t seed,
                       double correlation_length);

} // namespace sclreg
