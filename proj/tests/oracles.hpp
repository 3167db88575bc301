#pragma once

// Slow, independent reference implementations used to validate the library:
// direct DFT sums, a quadruple-loop wrapped convolution, a dense direct
// solve of the regularized normal equations, and a quadrature evaluation of
// the t-distribution tail. None of them share code with the library paths
// they check.

#include <cstddef>
#include <vector>

#include "sclreg/grid.hpp"

namespace oracle {

// Direct O(n^2) evaluation of the unnormalized forward DFT sum.
sclreg::SpectralField naive_dft2(const sclreg::ImageGrid& grid);

// Direct inverse DFT sum with the 1/(H*W) factor; returns the real part.
sclreg::ImageGrid naive_idft2_real(const sclreg::SpectralField& field);

// Periodic convolution evaluated pointwise: out(x) = sum_y img(x-y) ker(y).
sclreg::ImageGrid naive_convolve(const sclreg::ImageGrid& image, const sclreg::ImageGrid& kernel);

// Dense direct solve of (diag(aa) + (lambda/4pi^2) L) u = ab with L the
// 5-point periodic graph Laplacian (4I - adjacency) on the h x w torus.
// Gaussian elimination with partial pivoting, built from first principles.
std::vector<sclreg::cplx> dense_solve(const std::vector<double>& aa,
                                      const std::vector<sclreg::cplx>& ab, std::size_t h,
                                      std::size_t w, double lambda);

// Two-sided p-value of a t statistic with dof degrees of freedom, by
// composite-Simpson quadrature of the t density over a tangent substitution.
double t_p_value_quadrature(double t, std::size_t dof);

} // namespace oracle
