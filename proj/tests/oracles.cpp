#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oracle {

using sclreg::cplx;
using sclreg::ImageGrid;
using sclreg::SpectralField;

SpectralField naive_dft2(const ImageGrid& grid) {
    const std::size_t h = grid.height(), w = grid.width();
    SpectralField out(h, w);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < h; ++k) {
        for (std::size_t l = 0; l < w; ++l) {
            cplx acc(0.0, 0.0);
            for (std::size_t x = 0; x < h; ++x) {
                for (std::size_t y = 0; y < w; ++y) {
                    // k*x and l*y reduced by periodicity to keep the phase
                    // argument small and sin/cos fully accurate.
                    const double phase =
                        -two_pi * (static_cast<double>((k * x) % h) / static_cast<double>(h) +
                                   static_cast<double>((l * y) % w) / static_cast<double>(w));
                    acc += grid.at(x, y) * std::polar(1.0, phase);
                }
            }
            out.at(k, l) = acc;
        }
    }
    return out;
}

ImageGrid naive_idft2_real(const SpectralField& field) {
    const std::size_t h = field.height(), w = field.width();
    ImageGrid out(h, w);
    const double two_pi = 2.0 * std::numbers::pi;
    const double norm = 1.0 / static_cast<double>(h * w);
    for (std::size_t x = 0; x < h; ++x) {
        for (std::size_t y = 0; y < w; ++y) {
            cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k < h; ++k) {
                for (std::size_t l = 0; l < w; ++l) {
                    const double phase =
                        two_pi * (static_cast<double>((k * x) % h) / static_cast<double>(h) +
                                  static_cast<double>((l * y) % w) / static_cast<double>(w));
                    acc += field.at(k, l) * std::polar(1.0, phase);
                }
            }
            out.at(x, y) = acc.real() * norm;
        }
    }
    return out;
}

ImageGrid naive_convolve(const ImageGrid& image, const ImageGrid& kernel) {
    const std::size_t h = image.height(), w = image.width();
    ImageGrid out(h, w);
    for (std::size_t x = 0; x < h; ++x) {
        for (std::size_t y = 0; y < w; ++y) {
            double acc = 0.0;
            for (std::size_t i = 0; i < h; ++i) {
                for (std::size_t j = 0; j < w; ++j) {
                    acc += image.at((x + h - i) % h, (y + w - j) % w) * kernel.at(i, j);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

std::vector<cplx> dense_solve(const std::vector<double>& aa, const std::vector<cplx>& ab,
                              std::size_t h, std::size_t w, double lambda) {
    const std::size_t n = h * w;
    if (aa.size() != n || ab.size() != n)
        throw std::invalid_argument("dense_solve: payload length mismatch");
    const double coef = lambda / (4.0 * std::numbers::pi * std::numbers::pi);

    std::vector<cplx> m(n * n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t r = i * w + j;
            m[r * n + r] += aa[r] + 4.0 * coef;
            const std::size_t nbs[4] = {((i + h - 1) % h) * w + j, ((i + 1) % h) * w + j,
                                        i * w + (j + w - 1) % w, i * w + (j + 1) % w};
            for (std::size_t nb : nbs)
                m[r * n + nb] -= coef;
        }
    }

    std::vector<cplx> x(ab);
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(m[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double mag = std::abs(m[r * n + col]);
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best < 1e-300)
            throw std::runtime_error("dense_solve: singular system at column " +
                                     std::to_string(col));
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c)
                std::swap(m[col * n + c], m[pivot * n + c]);
            std::swap(x[col], x[pivot]);
        }
        const cplx inv_p = 1.0 / m[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx factor = m[r * n + col] * inv_p;
            if (factor == cplx(0.0, 0.0))
                continue;
            for (std::size_t c = col; c < n; ++c)
                m[r * n + c] -= factor * m[col * n + c];
            x[r] -= factor * x[col];
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        cplx acc = x[col];
        for (std::size_t c = col + 1; c < n; ++c)
            acc -= m[col * n + c] * x[c];
        x[col] = acc / m[col * n + col];
    }
    return x;
}

double t_p_value_quadrature(double t, std::size_t dof) {
    if (dof == 0)
        throw std::invalid_argument("t_p_value_quadrature: dof must be positive");
    const double nu = static_cast<double>(dof);
    const double log_norm = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                            0.5 * std::log(nu * std::numbers::pi);
    const auto density = [&](double s) {
        return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(s * s / nu));
    };
    // P(T > |t|) = integral of the density over (|t|, inf); substituting
    // s = tan(theta) maps it to a finite interval with a bounded integrand.
    const double lo = std::atan(std::abs(t));
    const double hi = std::numbers::pi / 2.0;
    const auto integrand = [&](double theta) {
        const double c = std::cos(theta);
        if (c <= 0.0)
            return 0.0;
        const double s = std::sin(theta) / c;
        return density(s) / (c * c);
    };
    const std::size_t steps = 20000; // even
    const double dx = (hi - lo) / static_cast<double>(steps);
    double acc = integrand(lo) + integrand(hi);
    for (std::size_t k = 1; k < steps; ++k)
        acc += integrand(lo + dx * static_cast<double>(k)) * (k % 2 == 1 ? 4.0 : 2.0);
    const double tail = acc * dx / 3.0;
    return std::min(1.0, 2.0 * tail);
}

} // namespace oracle
