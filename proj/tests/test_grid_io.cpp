#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "sclreg/errors.hpp"
#include "sclreg/field_io.hpp"
#include "sclreg/grid.hpp"
#include "sclreg/rng.hpp"

using namespace sclreg;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() /
                     ("sclreg_gridio_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ImageGrid random_grid(std::size_t h, std::size_t w, std::uint64_t seed) {
    Rng rng(seed);
    ImageGrid g(h, w);
    for (std::size_t k = 0; k < g.size(); ++k)
        g.data()[k] = rng.normal();
    return g;
}

} // namespace

TEST_CASE("ImageGrid constructor enforces the invariants") {
    CHECK_THROWS_AS(ImageGrid(0, 4), ArgumentError);
    CHECK_THROWS_AS(ImageGrid(4, 0), ArgumentError);
    CHECK_THROWS_AS(ImageGrid(2, 2, std::vector<double>{1.0, 2.0, 3.0}), ArgumentError);
    CHECK_THROWS_AS(
        ImageGrid(1, 2, std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}),
        ArgumentError);
    const ImageGrid g(2, 3, 1.5);
    CHECK(g.height() == 2);
    CHECK(g.width() == 3);
    CHECK(g.at(1, 2) == 1.5);
}

TEST_CASE("SpectralField constructor enforces shape") {
    CHECK_THROWS_AS(SpectralField(0, 1), ArgumentError);
    CHECK_THROWS_AS(SpectralField(2, 2, std::vector<cplx>(3)), ArgumentError);
}

TEST_CASE("mean_variance and value queries") {
    const ImageGrid g(2, 2, std::vector<double>{1.0, 2.0, 3.0, 4.0});
    const auto [mean, var] = mean_variance(g);
    CHECK(mean == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(var == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(min_value(g) == 1.0);
    CHECK(max_value(g) == 4.0);
    const ImageGrid h(1, 2, std::vector<double>{-3.0, 2.0});
    CHECK(max_abs(h) == 3.0);
}

TEST_CASE("hermitian_deviation is zero for symmetrized fields and sees perturbations") {
    Rng rng(7);
    SpectralField raw(4, 4);
    for (std::size_t k = 0; k < raw.size(); ++k)
        raw.data()[k] = cplx(rng.normal(), rng.normal());
    SpectralField sym(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            sym.at(i, j) = 0.5 * (raw.at(i, j) + std::conj(raw.at((4 - i) % 4, (4 - j) % 4)));
    CHECK(hermitian_deviation(sym) == 0.0);
    sym.at(1, 2) += cplx(0.0, 1e-3);
    CHECK(hermitian_deviation(sym) == doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("FieldFile round trips are bit-exact") {
    const fs::path path = test_dir() / "real.field";
    const ImageGrid g = random_grid(5, 7, 11);
    save_field(g, path.string());
    const ImageGrid back = load_field_real(path.string());
    REQUIRE(back.same_shape(g));
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(back.data()[k] == g.data()[k]);

    const fs::path cpath = test_dir() / "cplx.field";
    Rng rng(3);
    SpectralField f(3, 4);
    for (std::size_t k = 0; k < f.size(); ++k)
        f.data()[k] = cplx(rng.normal(), rng.normal());
    save_field(f, cpath.string());
    const SpectralField fback = load_field_complex(cpath.string());
    REQUIRE(fback.same_shape(f));
    for (std::size_t k = 0; k < f.size(); ++k)
        CHECK(fback.data()[k] == f.data()[k]);
}

TEST_CASE("FieldFile load rejects bad magic, kind mismatch and truncation") {
    const fs::path path = test_dir() / "broken.field";
    save_field(ImageGrid(2, 2, 1.0), path.string());
    std::string bytes = slurp(path);

    std::string bad_magic = bytes;
    bad_magic[0] = 'W';
    spit(path, bad_magic);
    CHECK_THROWS_AS(load_field_real(path.string()), FormatError);

    spit(path, bytes);
    CHECK_THROWS_AS(load_field_complex(path.string()), FormatError); // kind mismatch

    spit(path, bytes.substr(0, bytes.size() - 1));
    CHECK_THROWS_AS(load_field_real(path.string()), FormatError); // short payload

    spit(path, bytes + "x");
    CHECK_THROWS_AS(load_field_real(path.string()), FormatError); // trailing bytes

    CHECK_THROWS_AS(load_field_real((test_dir() / "no_such.field").string()), IoError);
}

TEST_CASE("load_pgm reads P5 and P2, 8- and 16-bit") {
    const fs::path p5 = test_dir() / "a.pgm";
    spit(p5, std::string("P5\n2 2\n255\n") + '\0' + '\xff' + '\x80' + '\x40');
    const ImageGrid g = load_pgm(p5.string());
    REQUIRE(g.height() == 2);
    REQUIRE(g.width() == 2);
    CHECK(g.at(0, 0) == 0.0);
    CHECK(g.at(0, 1) == 1.0);
    CHECK(g.at(1, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
    CHECK(g.at(1, 1) == doctest::Approx(64.0 / 255.0).epsilon(1e-15));

    const fs::path p2 = test_dir() / "b.pgm";
    spit(p2, "P2\n# a comment\n2 2\n255\n0 255\n128 64\n");
    const ImageGrid g2 = load_pgm(p2.string());
    REQUIRE(g2.same_shape(g));
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(g2.data()[k] == g.data()[k]);

    const fs::path p16 = test_dir() / "c.pgm";
    spit(p16, std::string("P5\n1 1\n65535\n") + '\xff' + '\xff');
    const ImageGrid g3 = load_pgm(p16.string());
    CHECK(g3.at(0, 0) == 1.0);

    // 16-bit samples are big-endian: 0x0100 = 256.
    const fs::path p16b = test_dir() / "d.pgm";
    spit(p16b, std::string("P5\n1 1\n65535\n") + '\x01' + '\0');
    CHECK(load_pgm(p16b.string()).at(0, 0) == doctest::Approx(256.0 / 65535.0).epsilon(1e-15));
}

TEST_CASE("load_pgm error paths carry byte offsets") {
    const fs::path path = test_dir() / "bad.pgm";

    spit(path, std::string("P5\n2 2\n255\n") + '\0' + '\1' + '\2'); // 3 of 4 samples
    CHECK_THROWS_AS(load_pgm(path.string()), FormatError);

    spit(path, "P2\n2 2\n255\n0 1 2\n");
    CHECK_THROWS_AS(load_pgm(path.string()), FormatError);

    spit(path, "P2\n1 1\n0\n0\n"); // maxval 0
    CHECK_THROWS_AS(load_pgm(path.string()), FormatError);

    spit(path, "P2\n1 1\n70000\n0\n"); // maxval too large
    CHECK_THROWS_AS(load_pgm(path.string()), FormatError);

    spit(path, "P2\n1 1\n255\n256\n"); // sample above maxval
    CHECK_THROWS_AS(load_pgm(path.string()), FormatError);

    spit(path, "P3\n1 1\n255\n0\n"); // not a graymap
    CHECK_THROWS_AS(load_pgm(path.string()), FormatError);

    try {
        spit(path, std::string("P5\n2 2\n255\n") + '\0');
        load_pgm(path.string());
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
}

TEST_CASE("load_pgm output lies in [0,1]") {
    const fs::path path = test_dir() / "range.pgm";
    std::string payload = "P2\n4 2\n200\n";
    for (int v : {0, 13, 200, 57, 199, 1, 100, 42})
        payload += std::to_string(v) + "\n";
    spit(path, payload);
    const ImageGrid g = load_pgm(path.string());
    for (double v : g.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("save_pgm quantization and clipping examples") {
    const fs::path path = test_dir() / "q.pgm";
    const ImageGrid g(1, 3, std::vector<double>{-2.0, 0.0, 2.0});
    save_pgm(g, path.string(), -1.0, 1.0);
    const std::string bytes = slurp(path);
    const std::string header = "P5\n3 1\n255\n";
    REQUIRE(bytes.substr(0, header.size()) == header);
    REQUIRE(bytes.size() == header.size() + 3);
    CHECK(static_cast<unsigned char>(bytes[header.size() + 0]) == 0);
    CHECK(static_cast<unsigned char>(bytes[header.size() + 1]) == 127);
    CHECK(static_cast<unsigned char>(bytes[header.size() + 2]) == 255);
    CHECK(clipped_fraction(g, -1.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    // Values exactly at the bounds do not count as clipped.
    const ImageGrid lo(2, 2, -1.0);
    const fs::path lop = test_dir() / "lo.pgm";
    save_pgm(lo, lop.string(), -1.0, 1.0);
    const std::string lob = slurp(lop);
    for (std::size_t k = lob.size() - 4; k < lob.size(); ++k)
        CHECK(static_cast<unsigned char>(lob[k]) == 0);
    CHECK(clipped_fraction(lo, -1.0, 1.0) == 0.0);

    const ImageGrid in_range(1, 4, std::vector<double>{-0.5, 0.0, 0.3, 1.0});
    CHECK(clipped_fraction(in_range, -1.0, 1.0) == 0.0);

    CHECK_THROWS_AS(save_pgm(g, path.string(), 1.0, -1.0), ArgumentError);
    CHECK_THROWS_AS(save_pgm(g, "/no/such/dir/x.pgm", -1.0, 1.0), IoError);
}

TEST_CASE("pgm save/load round trip stays within quantization error") {
    const fs::path path = test_dir() / "rt.pgm";
    Rng rng(23);
    ImageGrid g(6, 5);
    for (std::size_t k = 0; k < g.size(); ++k)
        g.data()[k] = rng.uniform01();
    save_pgm(g, path.string(), 0.0, 1.0);
    const ImageGrid back = load_pgm(path.string());
    REQUIRE(back.same_shape(g));
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(std::abs(back.data()[k] - g.data()[k]) <= 1.0 / 255.0 + 1e-12);
}

TEST_CASE("center_crop follows the half-shift convention") {
    // Full-size crop is exactly the half-period shift.
    ImageGrid g(4, 4);
    for (std::size_t k = 0; k < 16; ++k)
        g.data()[k] = static_cast<double>(k);
    const ImageGrid full = center_crop(g, 4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(full.at(i, j) == g.at((i + 2) % 4, (j + 2) % 4));

    // 2x2 crop picks the wrapped {-1,0} x {-1,0} block around the origin.
    const ImageGrid c2 = center_crop(g, 2, 2);
    CHECK(c2.at(0, 0) == g.at(3, 3));
    CHECK(c2.at(0, 1) == g.at(3, 0));
    CHECK(c2.at(1, 0) == g.at(0, 3));
    CHECK(c2.at(1, 1) == g.at(0, 0));

    // A delta at the origin lands at the crop center.
    ImageGrid delta(8, 8, 0.0);
    delta.at(0, 0) = 1.0;
    const ImageGrid c3 = center_crop(delta, 3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(c3.at(i, j) == (i == 1 && j == 1 ? 1.0 : 0.0));

    CHECK_THROWS_AS(center_crop(g, 0, 2), ArgumentError);
    CHECK_THROWS_AS(center_crop(g, 5, 2), ArgumentError);
}
