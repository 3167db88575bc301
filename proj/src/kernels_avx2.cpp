#include "sclreg/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

// AVX2 implementations. Each 256-bit vector holds two interleaved complex
// values [re0, im0, re1, im1]. Elementwise kernels perform the same additions
// and multiplications in the same order as the scalar reference, so their
// outputs match bit for bit; only the order of summation inside reductions
// differs. Compiled without FMA so products are never contracted.

namespace sclreg::kern {
namespace {

inline const double* re(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* re(cplx* p) { return reinterpret_cast<double*>(p); }

// Sign mask that negates the imaginary lanes (lanes 1 and 3).
inline __m256d imag_negator() { return _mm256_set_pd(-0.0, 0.0, -0.0, 0.0); }

// Expand two packed doubles [d0, d1] to [d0, d0, d1, d1].
inline __m256d dup_pair(const double* p) {
    const __m128d d = _mm_loadu_pd(p);
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(d), 0x50);
}

// Per-complex squared magnitude of both halves, duplicated within each lane:
// [n0, n0, n1, n1] where nk = re_k^2 + im_k^2.
inline __m256d norm_sq_pair(__m256d v) {
    const __m256d sq = _mm256_mul_pd(v, v);
    return _mm256_hadd_pd(sq, sq);
}

inline double horizontal_max(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return std::max(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
}

inline double horizontal_sum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

// Product of two complex pairs: [re0*, im0*, re1*, im1*].
inline __m256d cmul_pair(__m256d a, __m256d b) {
    const __m256d t1 = _mm256_mul_pd(a, _mm256_xor_pd(b, imag_negator()));
    const __m256d t2 = _mm256_mul_pd(a, _mm256_permute_pd(b, 0x5));
    return _mm256_hadd_pd(t1, t2);
}

// Product conj(a) * b for two complex pairs.
inline __m256d conj_mul_pair(__m256d a, __m256d b) {
    const __m256d t1 = _mm256_mul_pd(a, b);
    const __m256d swapped = _mm256_permute_pd(b, 0x5);
    const __m256d t2 = _mm256_mul_pd(a, _mm256_xor_pd(swapped, imag_negator()));
    return _mm256_hadd_pd(t1, t2);
}

void accumulate_avx2(double* aa, cplx* ab, const cplx* a, const cplx* b, std::size_t n) {
    const double* ap = re(a);
    const double* bp = re(b);
    double* abp = re(ab);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d av = _mm256_loadu_pd(ap + 2 * i);
        const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
        const __m256d nv = norm_sq_pair(av);
        const __m128d pair = _mm_unpacklo_pd(_mm256_castpd256_pd128(nv), _mm256_extractf128_pd(nv, 1));
        _mm_storeu_pd(aa + i, _mm_add_pd(_mm_loadu_pd(aa + i), pair));
        const __m256d prod = conj_mul_pair(av, bv);
        _mm256_storeu_pd(abp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(abp + 2 * i), prod));
    }
    for (; i < n; ++i) {
        const double ar = ap[2 * i], ai = ap[2 * i + 1];
        const double br = bp[2 * i], bi = bp[2 * i + 1];
        aa[i] += ar * ar + ai * ai;
        abp[2 * i] += ar * br + ai * bi;
        abp[2 * i + 1] += ar * bi - ai * br;
    }
}

void cmul_avx2(cplx* c, const cplx* a, const cplx* b, std::size_t n) {
    const double* ap = re(a);
    const double* bp = re(b);
    double* cp = re(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d av = _mm256_loadu_pd(ap + 2 * i);
        const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
        _mm256_storeu_pd(cp + 2 * i, cmul_pair(av, bv));
    }
    for (; i < n; ++i) {
        const double ar = ap[2 * i], ai = ap[2 * i + 1];
        const double br = bp[2 * i], bi = bp[2 * i + 1];
        cp[2 * i] = ar * br - ai * bi;
        cp[2 * i + 1] = ar * bi + ai * br;
    }
}

void cscale_avx2(cplx* u, const cplx* ab, const double* w, std::size_t n) {
    const double* ap = re(ab);
    double* up = re(u);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d av = _mm256_loadu_pd(ap + 2 * i);
        _mm256_storeu_pd(up + 2 * i, _mm256_mul_pd(av, dup_pair(w + i)));
    }
    for (; i < n; ++i) {
        up[2 * i] = ap[2 * i] * w[i];
        up[2 * i + 1] = ap[2 * i + 1] * w[i];
    }
}

SweepResult jacobi_sweep_avx2(cplx* dstc, const cplx* srcc, const cplx* abc, const double* den,
                              const double* rden, double coef, std::size_t h, std::size_t w) {
    SweepResult res;
    const double* src = re(srcc);
    const double* ab = re(abc);
    double* dst = re(dstc);
    const __m256d coefv = _mm256_set1_pd(coef);
    __m256d mx_change = _mm256_setzero_pd();
    __m256d mx_value = _mm256_setzero_pd();
    __m256d mx_resid = _mm256_setzero_pd();
    for (std::size_t i = 0; i < h; ++i) {
        const double* up = src + 2 * w * ((i + h - 1) % h);
        const double* dn = src + 2 * w * ((i + 1) % h);
        const double* cur = src + 2 * w * i;
        const double* abr = ab + 2 * w * i;
        const double* dr = den + w * i;
        const double* rr = rden + w * i;
        double* out = dst + 2 * w * i;
        std::size_t j = 0;
        // Interior columns two complexes at a time; wrapped edges go scalar.
        if (w >= 4) {
            for (j = 1; j + 2 < w; j += 2) {
                const __m256d sum = _mm256_add_pd(
                    _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(up + 2 * j),
                                                _mm256_loadu_pd(dn + 2 * j)),
                                  _mm256_loadu_pd(cur + 2 * j - 2)),
                    _mm256_loadu_pd(cur + 2 * j + 2));
                const __m256d num =
                    _mm256_add_pd(_mm256_loadu_pd(abr + 2 * j), _mm256_mul_pd(coefv, sum));
                const __m256d v = _mm256_mul_pd(num, dup_pair(rr + j));
                _mm256_storeu_pd(out + 2 * j, v);
                const __m256d change = _mm256_sub_pd(v, _mm256_loadu_pd(cur + 2 * j));
                mx_change = _mm256_max_pd(mx_change, norm_sq_pair(change));
                mx_value = _mm256_max_pd(mx_value, norm_sq_pair(v));
                const __m256d q = _mm256_mul_pd(dup_pair(dr + j), change);
                mx_resid = _mm256_max_pd(mx_resid, norm_sq_pair(q));
            }
        }
        auto scalar_col = [&](std::size_t jj) {
            const std::size_t jl = 2 * ((jj + w - 1) % w);
            const std::size_t jrt = 2 * ((jj + 1) % w);
            const double sr = ((up[2 * jj] + dn[2 * jj]) + cur[jl]) + cur[jrt];
            const double si = ((up[2 * jj + 1] + dn[2 * jj + 1]) + cur[jl + 1]) + cur[jrt + 1];
            const double vr = (abr[2 * jj] + coef * sr) * rr[jj];
            const double vi = (abr[2 * jj + 1] + coef * si) * rr[jj];
            out[2 * jj] = vr;
            out[2 * jj + 1] = vi;
            const double cr = vr - cur[2 * jj];
            const double ci = vi - cur[2 * jj + 1];
            res.max_change_sq = std::max(res.max_change_sq, cr * cr + ci * ci);
            res.max_value_sq = std::max(res.max_value_sq, vr * vr + vi * vi);
            const double qr = dr[jj] * cr;
            const double qi = dr[jj] * ci;
            res.max_residual_sq = std::max(res.max_residual_sq, qr * qr + qi * qi);
        };
        scalar_col(0);
        for (std::size_t jj = (w >= 4 ? j : 1); jj < w; ++jj)
            scalar_col(jj);
    }
    res.max_change_sq = std::max(res.max_change_sq, horizontal_max(mx_change));
    res.max_value_sq = std::max(res.max_value_sq, horizontal_max(mx_value));
    res.max_residual_sq = std::max(res.max_residual_sq, horizontal_max(mx_resid));
    return res;
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = horizontal_sum(acc);
    for (; i < n; ++i)
        s += x[i];
    return s;
}

double sum_sq_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    double s = horizontal_sum(acc);
    for (; i < n; ++i)
        s += x[i] * x[i];
    return s;
}

double sum_sq_diff_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = horizontal_sum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

double max_abs_avx2(const double* x, std::size_t n) {
    const __m256d mask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(mask, _mm256_loadu_pd(x + i)));
    double m = horizontal_max(acc);
    for (; i < n; ++i)
        m = std::max(m, std::abs(x[i]));
    return m;
}

double cmax_abs_sq_avx2(const cplx* z, std::size_t n) {
    const double* p = re(z);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = _mm256_max_pd(acc, norm_sq_pair(_mm256_loadu_pd(p + 2 * i)));
    double m = horizontal_max(acc);
    for (; i < n; ++i) {
        const double r = p[2 * i], im = p[2 * i + 1];
        m = std::max(m, r * r + im * im);
    }
    return m;
}

double cresidual_sum_sq_avx2(const cplx* a, const cplx* u, const cplx* b, std::size_t n) {
    const double* ap = re(a);
    const double* upv = re(u);
    const double* bp = re(b);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d av = _mm256_loadu_pd(ap + 2 * i);
        const __m256d uv = _mm256_loadu_pd(upv + 2 * i);
        const __m256d d = _mm256_sub_pd(cmul_pair(av, uv), _mm256_loadu_pd(bp + 2 * i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = horizontal_sum(acc);
    for (; i < n; ++i) {
        const double ar = ap[2 * i], ai = ap[2 * i + 1];
        const double ur = upv[2 * i], ui = upv[2 * i + 1];
        const double dr = (ar * ur - ai * ui) - bp[2 * i];
        const double di = (ar * ui + ai * ur) - bp[2 * i + 1];
        s += dr * dr + di * di;
    }
    return s;
}

} // namespace

const Ops& avx2_ops() {
    static const Ops ops = {
        "avx2",           accumulate_avx2,  cmul_avx2,
        cscale_avx2,      jacobi_sweep_avx2, sum_avx2,
        sum_sq_avx2,      sum_sq_diff_avx2, max_abs_avx2,
        cmax_abs_sq_avx2, cresidual_sum_sq_avx2,
    };
    return ops;
}

} // namespace sclreg::kern
