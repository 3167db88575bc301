#include "sclreg/kernels.hpp"

#include <algorithm>
#include <cmath>

// Reference implementations. All complex arithmetic is spelled out on the
// interleaved re,im representation in a fixed operation order; the SIMD
// variants replicate that order so elementwise results are bit-identical.

namespace sclreg::kern {
namespace {

inline const double* re(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* re(cplx* p) { return reinterpret_cast<double*>(p); }

void accumulate_scalar(double* aa, cplx* ab, const cplx* a, const cplx* b, std::size_t n) {
    const double* ap = re(a);
    const double* bp = re(b);
    double* abp = re(ab);
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = ap[2 * i], ai = ap[2 * i + 1];
        const double br = bp[2 * i], bi = bp[2 * i + 1];
        aa[i] += ar * ar + ai * ai;
        abp[2 * i] += ar * br + ai * bi;
        abp[2 * i + 1] += ar * bi - ai * br;
    }
}

void cmul_scalar(cplx* c, const cplx* a, const cplx* b, std::size_t n) {
    const double* ap = re(a);
    const double* bp = re(b);
    double* cp = re(c);
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = ap[2 * i], ai = ap[2 * i + 1];
        const double br = bp[2 * i], bi = bp[2 * i + 1];
        cp[2 * i] = ar * br - ai * bi;
        cp[2 * i + 1] = ar * bi + ai * br;
    }
}

void cscale_scalar(cplx* u, const cplx* ab, const double* w, std::size_t n) {
    const double* ap = re(ab);
    double* up = re(u);
    for (std::size_t i = 0; i < n; ++i) {
        up[2 * i] = ap[2 * i] * w[i];
        up[2 * i + 1] = ap[2 * i + 1] * w[i];
    }
}

SweepResult jacobi_sweep_scalar(cplx* dstc, const cplx* srcc, const cplx* abc, const double* den,
                                const double* rden, double coef, std::size_t h, std::size_t w) {
    SweepResult res;
    const double* src = re(srcc);
    const double* ab = re(abc);
    double* dst = re(dstc);
    for (std::size_t i = 0; i < h; ++i) {
        const double* up = src + 2 * w * ((i + h - 1) % h);
        const double* dn = src + 2 * w * ((i + 1) % h);
        const double* cur = src + 2 * w * i;
        const double* abr = ab + 2 * w * i;
        const double* dr = den + w * i;
        const double* rr = rden + w * i;
        double* out = dst + 2 * w * i;
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t jl = 2 * ((j + w - 1) % w);
            const std::size_t jr = 2 * ((j + 1) % w);
            const double sr = ((up[2 * j] + dn[2 * j]) + cur[jl]) + cur[jr];
            const double si = ((up[2 * j + 1] + dn[2 * j + 1]) + cur[jl + 1]) + cur[jr + 1];
            const double vr = (abr[2 * j] + coef * sr) * rr[j];
            const double vi = (abr[2 * j + 1] + coef * si) * rr[j];
            out[2 * j] = vr;
            out[2 * j + 1] = vi;
            const double cr = vr - cur[2 * j];
            const double ci = vi - cur[2 * j + 1];
            res.max_change_sq = std::max(res.max_change_sq, cr * cr + ci * ci);
            res.max_value_sq = std::max(res.max_value_sq, vr * vr + vi * vi);
            const double qr = dr[j] * cr;
            const double qi = dr[j] * ci;
            res.max_residual_sq = std::max(res.max_residual_sq, qr * qr + qi * qi);
        }
    }
    return res;
}

double sum_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += x[i];
    return s;
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += x[i] * x[i];
    return s;
}

double sum_sq_diff_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, std::abs(x[i]));
    return m;
}

double cmax_abs_sq_scalar(const cplx* z, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(z);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = p[2 * i], im = p[2 * i + 1];
        m = std::max(m, r * r + im * im);
    }
    return m;
}

double cresidual_sum_sq_scalar(const cplx* a, const cplx* u, const cplx* b, std::size_t n) {
    const double* ap = reinterpret_cast<const double*>(a);
    const double* up = reinterpret_cast<const double*>(u);
    const double* bp = reinterpret_cast<const double*>(b);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = ap[2 * i], ai = ap[2 * i + 1];
        const double ur = up[2 * i], ui = up[2 * i + 1];
        const double dr = (ar * ur - ai * ui) - bp[2 * i];
        const double di = (ar * ui + ai * ur) - bp[2 * i + 1];
        s += dr * dr + di * di;
    }
    return s;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops = {
        "scalar",          accumulate_scalar,  cmul_scalar,
        cscale_scalar,     jacobi_sweep_scalar, sum_scalar,
        sum_sq_scalar,     sum_sq_diff_scalar, max_abs_scalar,
        cmax_abs_sq_scalar, cresidual_sum_sq_scalar,
    };
    return ops;
}

} // namespace sclreg::kern
