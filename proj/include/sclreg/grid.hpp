#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "sclreg/errors.hpp"

namespace sclreg {

using cplx = std::complex<double>;

/// Real-valued 2D field (image or spatial kernel), row-major, double precision.
/// Intensities are in arbitrary linear units; all stored values are finite.
class ImageGrid {
public:
    ImageGrid() = default;

    ImageGrid(std::size_t height, std::size_t width, double fill = 0.0)
        : height_(height), width_(width), data_(check_dims(height, width), fill) {}

    ImageGrid(std::size_t height, std::size_t width, std::vector<double> data)
        : height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != check_dims(height, width))
            throw ArgumentError("ImageGrid: data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(height) + "x" +
                                std::to_string(width));
        for (std::size_t i = 0; i < data_.size(); ++i)
            if (!std::isfinite(data_[i]))
                throw ArgumentError("ImageGrid: non-finite value at index " + std::to_string(i));
    }

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& at(std::size_t i, std::size_t j) { return data_[i * width_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * width_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const ImageGrid& o) const {
        return height_ == o.height_ && width_ == o.width_;
    }

private:
    static std::size_t check_dims(std::size_t h, std::size_t w) {
        if (h == 0 || w == 0)
            throw ArgumentError("ImageGrid: dimensions must be positive");
        return h * w;
    }

    std::size_t height_ = 0, width_ = 0;
    std::vector<double> data_;
};

/// Complex 2D field on the DFT frequency grid, row-major.
/// The hermitian flag marks fields known to be transforms of real signals;
/// hermitian_deviation() measures how well the symmetry actually holds.
class SpectralField {
public:
    SpectralField() = default;

    SpectralField(std::size_t height, std::size_t width, cplx fill = cplx(0.0, 0.0))
        : height_(height), width_(width), data_(check_dims(height, width), fill) {}

    SpectralField(std::size_t height, std::size_t width, std::vector<cplx> data)
        : height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != check_dims(height, width))
            throw ArgumentError("SpectralField: data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(height) + "x" +
                                std::to_string(width));
    }

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    cplx& at(std::size_t i, std::size_t j) { return data_[i * width_ + j]; }
    cplx at(std::size_t i, std::size_t j) const { return data_[i * width_ + j]; }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    const std::vector<cplx>& values() const { return data_; }

    bool same_shape(const SpectralField& o) const {
        return height_ == o.height_ && width_ == o.width_;
    }

    bool hermitian() const { return hermitian_; }
    void set_hermitian(bool h) { hermitian_ = h; }

private:
    static std::size_t check_dims(std::size_t h, std::size_t w) {
        if (h == 0 || w == 0)
            throw ArgumentError("SpectralField: dimensions must be positive");
        return h * w;
    }

    std::size_t height_ = 0, width_ = 0;
    std::vector<cplx> data_;
    bool hermitian_ = false;
};

double max_abs(const ImageGrid& g);
double max_abs(const SpectralField& f);
double min_value(const ImageGrid& g);
double max_value(const ImageGrid& g);

/// Per-pixel mean and variance (population form, divisor height*width).
std::pair<double, double> mean_variance(const ImageGrid& g);

/// Largest absolute deviation from f(-i mod H, -j mod W) == conj(f(i, j)).
/// Zero for the exact transform of a real signal.
double hermitian_deviation(const SpectralField& f);

} // namespace sclreg
