#pragma once

#include <cstddef>
#include <memory>

#include "sclreg/grid.hpp"

namespace sclreg {

/// 2D DFT plan for a fixed grid size.
///
/// Transform convention: the forward transform is the plain (unnormalized)
/// DFT sum, the inverse carries the 1/(H*W) factor, so
///
///   forward(circ_convolve(a, u)) == forward(a) .* forward(u)   exactly, and
///   <u, v>_spatial == c_N * <forward(u), forward(v)>_spectral
///
/// with c_N = parseval_constant() = 1/(H*W). All cross-domain identities in
/// this library are stated through c_N, so the backend is replaceable.
///
/// Plans are immutable after construction and safe to share across threads;
/// forward/inverse are reentrant.
class DftPlan {
public:
    DftPlan(std::size_t height, std::size_t width);
    ~DftPlan();

    DftPlan(const DftPlan&) = delete;
    DftPlan& operator=(const DftPlan&) = delete;
    DftPlan(DftPlan&&) noexcept;
    DftPlan& operator=(DftPlan&&) noexcept;

    std::size_t height() const;
    std::size_t width() const;

    /// c_N such that <u,v>_spatial = c_N * <u_hat,v_hat>_spectral.
    double parseval_constant() const;

    SpectralField forward(const ImageGrid& grid) const;

    /// Inverse transform back to a real field. The input must be Hermitian
    /// within 1e-9 relative (conjugate symmetry of a real signal's
    /// transform); violations raise SymmetryError naming the offending bin.
    ImageGrid inverse(const SpectralField& field) const;

    /// Inverse without the real-signal contract; returns the full complex
    /// result. Used internally and by tests.
    SpectralField inverse_complex(const SpectralField& field) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SpectralField dft2(const ImageGrid& grid, const DftPlan& plan);
ImageGrid idft2(const SpectralField& field, const DftPlan& plan);

/// Circular (periodic) convolution via the DFT product.
ImageGrid circ_convolve(const ImageGrid& image, const ImageGrid& kernel, const DftPlan& plan);
ImageGrid circ_convolve(const ImageGrid& image, const ImageGrid& kernel);

/// Discrete Dirichlet energy of a spectral field: forward differences with
/// periodic wrap, summed over both axes,
///   sum_xi |f(xi+e1)-f(xi)|^2 + |f(xi+e2)-f(xi)|^2.
/// Nonnegative; zero iff the field is constant. For f = dft2(u) this equals
/// H*W * sum_x w(x) u(x)^2 with w(x) = 4 sin^2(pi x1/H) + 4 sin^2(pi x2/W),
/// the exact discrete counterpart of a ||x||^2-weighted spatial penalty.
double spectral_gradient_energy(const SpectralField& field);

/// The spatial penalty weight w(x) above.
double penalty_weight(std::size_t i, std::size_t j, std::size_t height, std::size_t width);

} // namespace sclreg
