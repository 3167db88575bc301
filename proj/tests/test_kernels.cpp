#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "sclreg/kernels.hpp"
#include "sclreg/rng.hpp"

using namespace sclreg;
using kern::cplx;

namespace {

std::vector<cplx> random_cvec(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> v(n);
    for (auto& z : v)
        z = cplx(rng.normal(), rng.normal());
    return v;
}

std::vector<double> random_rvec(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v)
        x = rng.normal();
    return v;
}

bool bit_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    REQUIRE(a.size() == b.size());
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

// The odd lengths exercise the scalar tails of the vector loops.
const std::size_t kLengths[] = {1, 2, 3, 4, 5, 7, 8, 9, 16, 31, 64, 257};

} // namespace

TEST_CASE("scalar accumulate matches the direct formula") {
    const auto& ops = kern::scalar_ops();
    const auto a = random_cvec(9, 1);
    const auto b = random_cvec(9, 2);
    std::vector<double> aa(9, 0.5);
    std::vector<cplx> ab(9, cplx(1.0, -1.0));
    ops.accumulate(aa.data(), ab.data(), a.data(), b.data(), 9);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(aa[i] == doctest::Approx(0.5 + std::norm(a[i])).epsilon(1e-15));
        const cplx want = cplx(1.0, -1.0) + std::conj(a[i]) * b[i];
        CHECK(std::abs(ab[i] - want) <= 1e-14);
    }
}

TEST_CASE("scalar reductions match naive loops") {
    const auto& ops = kern::scalar_ops();
    const auto x = random_rvec(33, 3);
    const auto y = random_rvec(33, 4);
    double s = 0, sq = 0, sqd = 0, mx = 0;
    for (std::size_t i = 0; i < 33; ++i) {
        s += x[i];
        sq += x[i] * x[i];
        sqd += (x[i] - y[i]) * (x[i] - y[i]);
        mx = std::max(mx, std::abs(x[i]));
    }
    CHECK(ops.sum(x.data(), 33) == doctest::Approx(s).epsilon(1e-14));
    CHECK(ops.sum_sq(x.data(), 33) == doctest::Approx(sq).epsilon(1e-14));
    CHECK(ops.sum_sq_diff(x.data(), y.data(), 33) == doctest::Approx(sqd).epsilon(1e-14));
    CHECK(ops.max_abs(x.data(), 33) == mx);

    const auto z = random_cvec(17, 5);
    double mz = 0, res = 0;
    const auto u = random_cvec(17, 6);
    const auto bb = random_cvec(17, 7);
    for (std::size_t i = 0; i < 17; ++i) {
        mz = std::max(mz, std::norm(z[i]));
        res += std::norm(z[i] * u[i] - bb[i]);
    }
    CHECK(ops.cmax_abs_sq(z.data(), 17) == mz);
    CHECK(ops.cresidual_sum_sq(z.data(), u.data(), bb.data(), 17) ==
          doctest::Approx(res).epsilon(1e-13));
}

TEST_CASE("avx2 elementwise maps are bit-exact against scalar") {
    if (!kern::avx2_supported())
        return;
    const auto& s = kern::scalar_ops();
    const auto& v = kern::avx2_ops();
    for (std::size_t n : kLengths) {
        const auto a = random_cvec(n, 10 + n);
        const auto b = random_cvec(n, 20 + n);
        const auto w = random_rvec(n, 30 + n);

        auto c1 = random_cvec(n, 40);
        auto c2 = c1;
        s.cmul(c1.data(), a.data(), b.data(), n);
        v.cmul(c2.data(), a.data(), b.data(), n);
        CHECK(bit_equal(c1, c2));

        s.cscale(c1.data(), a.data(), w.data(), n);
        v.cscale(c2.data(), a.data(), w.data(), n);
        CHECK(bit_equal(c1, c2));

        auto aa1 = random_rvec(n, 50 + n);
        auto aa2 = aa1;
        auto ab1 = random_cvec(n, 60 + n);
        auto ab2 = ab1;
        s.accumulate(aa1.data(), ab1.data(), a.data(), b.data(), n);
        v.accumulate(aa2.data(), ab2.data(), a.data(), b.data(), n);
        CHECK(std::memcmp(aa1.data(), aa2.data(), n * sizeof(double)) == 0);
        CHECK(bit_equal(ab1, ab2));
    }
}

TEST_CASE("avx2 max reductions are bit-exact, sums agree to rounding") {
    if (!kern::avx2_supported())
        return;
    const auto& s = kern::scalar_ops();
    const auto& v = kern::avx2_ops();
    for (std::size_t n : kLengths) {
        const auto x = random_rvec(n, 100 + n);
        const auto y = random_rvec(n, 200 + n);
        const auto z = random_cvec(n, 300 + n);
        const auto u = random_cvec(n, 400 + n);
        const auto b = random_cvec(n, 500 + n);

        CHECK(s.max_abs(x.data(), n) == v.max_abs(x.data(), n));
        CHECK(s.cmax_abs_sq(z.data(), n) == v.cmax_abs_sq(z.data(), n));

        CHECK(v.sum(x.data(), n) == doctest::Approx(s.sum(x.data(), n)).epsilon(1e-13));
        CHECK(v.sum_sq(x.data(), n) == doctest::Approx(s.sum_sq(x.data(), n)).epsilon(1e-13));
        CHECK(v.sum_sq_diff(x.data(), y.data(), n) ==
              doctest::Approx(s.sum_sq_diff(x.data(), y.data(), n)).epsilon(1e-13));
        CHECK(v.cresidual_sum_sq(z.data(), u.data(), b.data(), n) ==
              doctest::Approx(s.cresidual_sum_sq(z.data(), u.data(), b.data(), n)).epsilon(1e-13));
    }
}

TEST_CASE("avx2 jacobi sweep is bit-exact against scalar, including results") {
    if (!kern::avx2_supported())
        return;
    const auto& s = kern::scalar_ops();
    const auto& v = kern::avx2_ops();
    const std::pair<std::size_t, std::size_t> shapes[] = {
        {1, 1}, {1, 5}, {5, 1}, {2, 2}, {3, 3}, {3, 4}, {4, 7}, {5, 8}, {8, 8}, {7, 9}, {6, 13}};
    for (auto [h, w] : shapes) {
        const std::size_t n = h * w;
        const auto src = random_cvec(n, 1000 + n);
        const auto ab = random_cvec(n, 2000 + n);
        auto den = random_rvec(n, 3000 + n);
        std::vector<double> rden(n);
        for (std::size_t i = 0; i < n; ++i) {
            den[i] = 1.0 + den[i] * den[i]; // positive denominators, as in the solver
            rden[i] = 1.0 / den[i];
        }
        std::vector<cplx> d1(n), d2(n);
        const auto r1 = s.jacobi_sweep(d1.data(), src.data(), ab.data(), den.data(), rden.data(),
                                       0.37, h, w);
        const auto r2 = v.jacobi_sweep(d2.data(), src.data(), ab.data(), den.data(), rden.data(),
                                       0.37, h, w);
        CHECK(bit_equal(d1, d2));
        CHECK(r1.max_change_sq == r2.max_change_sq);
        CHECK(r1.max_value_sq == r2.max_value_sq);
        CHECK(r1.max_residual_sq == r2.max_residual_sq);
    }
}

TEST_CASE("scalar jacobi sweep applies the periodic five-point update") {
    const auto& ops = kern::scalar_ops();
    const std::size_t h = 3, w = 4, n = h * w;
    const auto src = random_cvec(n, 71);
    const auto ab = random_cvec(n, 72);
    std::vector<double> den(n), rden(n);
    for (std::size_t i = 0; i < n; ++i) {
        den[i] = 2.0 + 0.1 * static_cast<double>(i);
        rden[i] = 1.0 / den[i];
    }
    const double coef = 0.25;
    std::vector<cplx> dst(n);
    const auto r = ops.jacobi_sweep(dst.data(), src.data(), ab.data(), den.data(), rden.data(),
                                    coef, h, w);
    double want_change = 0, want_value = 0, want_res = 0;
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const auto at = [&](std::size_t r_, std::size_t c_) { return src[r_ * w + c_]; };
            const cplx nb = at((i + 1) % h, j) + at((i + h - 1) % h, j) + at(i, (j + 1) % w) +
                            at(i, (j + w - 1) % w);
            const cplx want = (ab[i * w + j] + coef * nb) * rden[i * w + j];
            CHECK(std::abs(dst[i * w + j] - want) <= 1e-14);
            want_change = std::max(want_change, std::norm(dst[i * w + j] - src[i * w + j]));
            want_value = std::max(want_value, std::norm(dst[i * w + j]));
            want_res = std::max(want_res,
                                std::norm(den[i * w + j] * (src[i * w + j] - dst[i * w + j])));
        }
    }
    CHECK(r.max_change_sq == doctest::Approx(want_change).epsilon(1e-13));
    CHECK(r.max_value_sq == doctest::Approx(want_value).epsilon(1e-13));
    CHECK(r.max_residual_sq == doctest::Approx(want_res).epsilon(1e-13));
}

TEST_CASE("active_ops reports a known implementation") {
    const std::string name = kern::active_ops().name;
    CHECK((name == "scalar" || name == "avx2"));
    if (!kern::avx2_supported())
        CHECK(name == "scalar");
}
