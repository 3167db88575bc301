#pragma once

#include <complex>
#include <cstddef>

namespace sclreg::kern {

using cplx = std::complex<double>;

/// Reductions carried out of one Jacobi sweep. Squared magnitudes are
/// tracked so the sweep needs no square roots; callers take sqrt once.
struct SweepResult {
    double max_change_sq = 0.0;   // max |dst - src|^2
    double max_value_sq = 0.0;    // max |dst|^2
    double max_residual_sq = 0.0; // max |den * (src - dst)|^2, the optimality residual of src
};

/// One implementation of the arithmetic inner loops. scalar_ops() is the
/// reference; SIMD variants must agree with it (bit-exact for elementwise
/// maps, to rounding for reductions) and are equivalence-tested.
struct Ops {
    const char* name;

    // aa[i] += |a[i]|^2 ; ab[i] += conj(a[i]) * b[i]
    void (*accumulate)(double* aa, cplx* ab, const cplx* a, const cplx* b, std::size_t n);

    // c[i] = a[i] * b[i]
    void (*cmul)(cplx* c, const cplx* a, const cplx* b, std::size_t n);

    // u[i] = ab[i] * w[i] for a real weight array (e.g. reciprocal denominators)
    void (*cscale)(cplx* u, const cplx* ab, const double* w, std::size_t n);

    // One full Jacobi sweep over an h x w grid with periodic wrap:
    //   dst[ij] = (ab[ij] + coef * (src[i+1,j] + src[i-1,j] + src[i,j+1] + src[i,j-1]))
    //             * recip_den[ij]
    // den[ij] and recip_den[ij] = 1/den[ij] are precomputed by the caller.
    SweepResult (*jacobi_sweep)(cplx* dst, const cplx* src, const cplx* ab, const double* den,
                                const double* recip_den, double coef, std::size_t h,
                                std::size_t w);

    double (*sum)(const double* x, std::size_t n);
    double (*sum_sq)(const double* x, std::size_t n);
    double (*sum_sq_diff)(const double* x, const double* y, std::size_t n); // sum (x-y)^2
    double (*max_abs)(const double* x, std::size_t n);
    double (*cmax_abs_sq)(const cplx* z, std::size_t n); // max |z|^2

    // sum over i of |a[i] * u[i] - b[i]|^2 (spectral data term)
    double (*cresidual_sum_sq)(const cplx* a, const cplx* u, const cplx* b, std::size_t n);
};

const Ops& scalar_ops();

bool avx2_supported();

/// AVX2 variants; only callable when avx2_supported().
const Ops& avx2_ops();

/// The implementation selected at startup: AVX2 when the CPU supports it,
/// scalar otherwise. Set SCLREG_ISA=scalar (or =avx2) to force a choice.
const Ops& active_ops();

} // namespace sclreg::kern
