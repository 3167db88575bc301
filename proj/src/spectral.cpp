#include "sclreg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <mutex>
#include <new>
#include <numbers>
#include <string>
#include <vector>

#include "sclreg/errors.hpp"
#include "sclreg/kernels.hpp"

namespace sclreg {
namespace {

// FFTW's planner (create/destroy) is not reentrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// RAII wrapper for fftw_malloc'd complex buffers. Allocating through
// fftw_malloc keeps the alignment compatible with the planned arrays, which
// the new-array execute interface requires.
struct FftwBuffer {
    fftw_complex* p = nullptr;

    explicit FftwBuffer(std::size_t n)
        : p(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (p == nullptr)
            throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(p); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

std::string bin_name(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

constexpr double kSymmetryTolerance = 1e-9;

} // namespace

struct DftPlan::Impl {
    std::size_t h = 0, w = 0;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    ~Impl() {
        const std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd != nullptr)
            fftw_destroy_plan(fwd);
        if (inv != nullptr)
            fftw_destroy_plan(inv);
    }
};

DftPlan::DftPlan(std::size_t height, std::size_t width) : impl_(std::make_unique<Impl>()) {
    if (height == 0 || width == 0)
        throw ArgumentError("DftPlan: dimensions must be positive");
    const std::size_t int_max = static_cast<std::size_t>(std::numeric_limits<int>::max());
    if (height > int_max || width > int_max)
        throw ArgumentError("DftPlan: dimensions exceed the transform backend's range");
    impl_->h = height;
    impl_->w = width;
    FftwBuffer buf(height * width);
    const std::lock_guard<std::mutex> lock(planner_mutex());
    // FFTW_ESTIMATE picks the plan from heuristics alone: deterministic, no
    // trial measurements, never reads the buffer contents.
    impl_->fwd = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), buf.p, buf.p,
                                  FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->inv = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), buf.p, buf.p,
                                  FFTW_BACKWARD, FFTW_ESTIMATE);
    if (impl_->fwd == nullptr || impl_->inv == nullptr)
        throw Error("DftPlan: transform planning failed for " + std::to_string(height) + "x" +
                    std::to_string(width));
}

DftPlan::~DftPlan() = default;
DftPlan::DftPlan(DftPlan&&) noexcept = default;
DftPlan& DftPlan::operator=(DftPlan&&) noexcept = default;

std::size_t DftPlan::height() const { return impl_->h; }
std::size_t DftPlan::width() const { return impl_->w; }

double DftPlan::parseval_constant() const {
    return 1.0 / (static_cast<double>(impl_->h) * static_cast<double>(impl_->w));
}

SpectralField DftPlan::forward(const ImageGrid& grid) const {
    if (grid.height() != impl_->h || grid.width() != impl_->w)
        throw ArgumentError("forward: grid is " + std::to_string(grid.height()) + "x" +
                            std::to_string(grid.width()) + " but the plan is " +
                            std::to_string(impl_->h) + "x" + std::to_string(impl_->w));
    const std::size_t n = impl_->h * impl_->w;
    FftwBuffer buf(n);
    const double* src = grid.data();
    for (std::size_t k = 0; k < n; ++k) {
        buf.p[k][0] = src[k];
        buf.p[k][1] = 0.0;
    }
    fftw_execute_dft(impl_->fwd, buf.p, buf.p);
    SpectralField out(impl_->h, impl_->w);
    cplx* dst = out.data();
    for (std::size_t k = 0; k < n; ++k)
        dst[k] = cplx(buf.p[k][0], buf.p[k][1]);
    out.set_hermitian(true);
    return out;
}

SpectralField DftPlan::inverse_complex(const SpectralField& field) const {
    if (field.height() != impl_->h || field.width() != impl_->w)
        throw ArgumentError("inverse: field is " + std::to_string(field.height()) + "x" +
                            std::to_string(field.width()) + " but the plan is " +
                            std::to_string(impl_->h) + "x" + std::to_string(impl_->w));
    const std::size_t n = impl_->h * impl_->w;
    FftwBuffer buf(n);
    const cplx* src = field.data();
    for (std::size_t k = 0; k < n; ++k) {
        buf.p[k][0] = src[k].real();
        buf.p[k][1] = src[k].imag();
    }
    fftw_execute_dft(impl_->inv, buf.p, buf.p);
    SpectralField out(impl_->h, impl_->w);
    const double norm = 1.0 / static_cast<double>(n);
    cplx* dst = out.data();
    for (std::size_t k = 0; k < n; ++k)
        dst[k] = cplx(buf.p[k][0] * norm, buf.p[k][1] * norm);
    return out;
}

ImageGrid DftPlan::inverse(const SpectralField& field) const {
    const std::size_t h = impl_->h, w = impl_->w;
    if (field.height() != h || field.width() != w)
        throw ArgumentError("inverse: field is " + std::to_string(field.height()) + "x" +
                            std::to_string(field.width()) + " but the plan is " +
                            std::to_string(h) + "x" + std::to_string(w));

    // A real signal's transform is conjugate-symmetric; reject inputs that
    // are not, relative to the field's own magnitude.
    const double scale = max_abs(field);
    double worst = 0.0;
    std::size_t wi = 0, wj = 0;
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const cplx mirrored = field.at((h - i) % h, (w - j) % w);
            const double dev = std::abs(mirrored - std::conj(field.at(i, j)));
            if (dev > worst) {
                worst = dev;
                wi = i;
                wj = j;
            }
        }
    }
    if (worst > kSymmetryTolerance * scale)
        throw SymmetryError("inverse: field is not conjugate-symmetric at bin " +
                            bin_name(wi, wj) + ": deviation " + std::to_string(worst) +
                            " exceeds " + std::to_string(kSymmetryTolerance * scale));

    SpectralField full = inverse_complex(field);

    // The imaginary part should be rounding noise; anything larger means the
    // symmetry check above was fooled (it cannot be, but the invariant is
    // cheap to keep watching).
    double peak = 0.0;
    for (const cplx& z : full.values())
        peak = std::max(peak, std::max(std::abs(z.real()), std::abs(z.imag())));
    double worst_imag = 0.0;
    std::size_t ii = 0, ij = 0;
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const double im = std::abs(full.at(i, j).imag());
            if (im > worst_imag) {
                worst_imag = im;
                ii = i;
                ij = j;
            }
        }
    }
    if (worst_imag > kSymmetryTolerance * peak)
        throw SymmetryError("inverse: imaginary residue " + std::to_string(worst_imag) +
                            " at bin " + bin_name(ii, ij) + " exceeds " +
                            std::to_string(kSymmetryTolerance * peak));

    std::vector<double> real_part(h * w);
    for (std::size_t k = 0; k < h * w; ++k)
        real_part[k] = full.data()[k].real();
    return ImageGrid(h, w, std::move(real_part));
}

SpectralField dft2(const ImageGrid& grid, const DftPlan& plan) { return plan.forward(grid); }

ImageGrid idft2(const SpectralField& field, const DftPlan& plan) { return plan.inverse(field); }

ImageGrid circ_convolve(const ImageGrid& image, const ImageGrid& kernel, const DftPlan& plan) {
    if (!image.same_shape(kernel))
        throw ArgumentError("circ_convolve: image " + std::to_string(image.height()) + "x" +
                            std::to_string(image.width()) + " and kernel " +
                            std::to_string(kernel.height()) + "x" +
                            std::to_string(kernel.width()) + " differ in shape");
    const SpectralField fa = plan.forward(image);
    const SpectralField fu = plan.forward(kernel);
    SpectralField prod(fa.height(), fa.width());
    kern::active_ops().cmul(prod.data(), fa.data(), fu.data(), prod.size());
    prod.set_hermitian(true);
    return plan.inverse(prod);
}

ImageGrid circ_convolve(const ImageGrid& image, const ImageGrid& kernel) {
    const DftPlan plan(image.height(), image.width());
    return circ_convolve(image, kernel, plan);
}

double spectral_gradient_energy(const SpectralField& field) {
    const std::size_t h = field.height(), w = field.width();
    double total = 0.0;
    for (std::size_t i = 0; i < h; ++i) {
        const std::size_t in = (i + 1) % h;
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t jn = (j + 1) % w;
            total += std::norm(field.at(in, j) - field.at(i, j));
            total += std::norm(field.at(i, jn) - field.at(i, j));
        }
    }
    return total;
}

double penalty_weight(std::size_t i, std::size_t j, std::size_t height, std::size_t width) {
    const double si = std::sin(std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(height));
    const double sj = std::sin(std::numbers::pi * static_cast<double>(j) /
                               static_cast<double>(width));
    return 4.0 * si * si + 4.0 * sj * sj;
}

} // namespace sclreg
