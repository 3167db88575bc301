#include "sclreg/grid.hpp"

#include <algorithm>
#include <cmath>

namespace sclreg {

double max_abs(const ImageGrid& g) {
    double m = 0.0;
    for (double v : g.values())
        m = std::max(m, std::abs(v));
    return m;
}

double max_abs(const SpectralField& f) {
    double m = 0.0;
    for (const cplx& z : f.values())
        m = std::max(m, std::norm(z));
    return std::sqrt(m);
}

double min_value(const ImageGrid& g) {
    return *std::min_element(g.values().begin(), g.values().end());
}

double max_value(const ImageGrid& g) {
    return *std::max_element(g.values().begin(), g.values().end());
}

std::pair<double, double> mean_variance(const ImageGrid& g) {
    const double n = static_cast<double>(g.size());
    double s = 0.0;
    for (double v : g.values())
        s += v;
    const double mean = s / n;
    double ss = 0.0;
    for (double v : g.values()) {
        const double d = v - mean;
        ss += d * d;
    }
    return {mean, ss / n};
}

double hermitian_deviation(const SpectralField& f) {
    const std::size_t h = f.height(), w = f.width();
    double worst = 0.0;
    for (std::size_t i = 0; i < h; ++i) {
        const std::size_t im = (h - i) % h;
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t jm = (w - j) % w;
            worst = std::max(worst, std::abs(f.at(im, jm) - std::conj(f.at(i, j))));
        }
    }
    return worst;
}

} // namespace sclreg
