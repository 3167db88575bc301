#include "sclreg/field_io.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

namespace sclreg {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'L', 'R', 'E', 'G', 'F', '1'};
constexpr std::size_t kHeaderSize = 25;

void put_u64le(std::uint64_t v, std::ostream& os) {
    std::array<unsigned char, 8> b;
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    os.write(reinterpret_cast<const char*>(b.data()), 8);
}

void put_f64le(double v, std::ostream& os) {
    put_u64le(std::bit_cast<std::uint64_t>(v), os);
}

std::uint64_t get_u64le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | p[i];
    return v;
}

double get_f64le(const unsigned char* p) {
    return std::bit_cast<double>(get_u64le(p));
}

std::vector<unsigned char> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    in.seekg(0, std::ios::end);
    const auto len = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> buf(static_cast<std::size_t>(len));
    if (len > 0)
        in.read(reinterpret_cast<char*>(buf.data()), len);
    if (!in)
        throw IoError("cannot read " + path);
    return buf;
}

struct FieldHeader {
    int kind;
    std::size_t height, width;
};

FieldHeader parse_field_header(const std::vector<unsigned char>& buf, const std::string& path) {
    if (buf.size() < kHeaderSize)
        throw FormatError(path + ": truncated header", buf.size());
    if (std::memcmp(buf.data(), kMagic, 8) != 0)
        throw FormatError(path + ": bad magic", 0);
    const int kind = buf[8];
    if (kind != 0 && kind != 1)
        throw FormatError(path + ": unknown kind " + std::to_string(kind), 8);
    const std::uint64_t h = get_u64le(buf.data() + 9);
    const std::uint64_t w = get_u64le(buf.data() + 17);
    if (h == 0 || w == 0)
        throw FormatError(path + ": zero dimension", 9);
    const std::uint64_t values = h * w * (kind == 1 ? 2 : 1);
    const std::uint64_t expect = kHeaderSize + values * 8;
    if (buf.size() != expect)
        throw FormatError(path + ": payload size " + std::to_string(buf.size() - kHeaderSize) +
                              " does not match " + std::to_string(expect - kHeaderSize),
                          std::min<std::size_t>(buf.size(), expect));
    return {kind, static_cast<std::size_t>(h), static_cast<std::size_t>(w)};
}

void write_field_header(std::ostream& os, int kind, std::size_t h, std::size_t w) {
    os.write(kMagic, 8);
    const char k = static_cast<char>(kind);
    os.write(&k, 1);
    put_u64le(h, os);
    put_u64le(w, os);
}

} // namespace

void save_field(const ImageGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    write_field_header(out, 0, grid.height(), grid.width());
    for (double v : grid.values())
        put_f64le(v, out);
    if (!out)
        throw IoError("write failed: " + path);
}

void save_field(const SpectralField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    write_field_header(out, 1, field.height(), field.width());
    for (const cplx& z : field.values()) {
        put_f64le(z.real(), out);
        put_f64le(z.imag(), out);
    }
    if (!out)
        throw IoError("write failed: " + path);
}

ImageGrid load_field_real(const std::string& path) {
    const auto buf = read_all(path);
    const FieldHeader hd = parse_field_header(buf, path);
    if (hd.kind != 0)
        throw FormatError(path + ": kind mismatch, file holds a complex field", 8);
    std::vector<double> data(hd.height * hd.width);
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = get_f64le(buf.data() + kHeaderSize + 8 * i);
        if (!std::isfinite(data[i]))
            throw FormatError(path + ": non-finite value", kHeaderSize + 8 * i);
    }
    return ImageGrid(hd.height, hd.width, std::move(data));
}

SpectralField load_field_complex(const std::string& path) {
    const auto buf = read_all(path);
    const FieldHeader hd = parse_field_header(buf, path);
    if (hd.kind != 1)
        throw FormatError(path + ": kind mismatch, file holds a real field", 8);
    std::vector<cplx> data(hd.height * hd.width);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double re = get_f64le(buf.data() + kHeaderSize + 16 * i);
        const double im = get_f64le(buf.data() + kHeaderSize + 16 * i + 8);
        data[i] = cplx(re, im);
    }
    return SpectralField(hd.height, hd.width, std::move(data));
}

// ---------------------------------------------------------------------------
// PGM

namespace {

// Token scanner over the header region; keeps a byte offset for errors.
struct PgmScanner {
    const std::vector<unsigned char>& buf;
    const std::string& path;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < buf.size()) {
            if (std::isspace(buf[pos])) {
                ++pos;
            } else if (buf[pos] == '#') {
                while (pos < buf.size() && buf[pos] != '\n')
                    ++pos;
            } else {
                break;
            }
        }
    }

    std::uint64_t next_uint(const char* what) {
        skip_space_and_comments();
        if (pos >= buf.size() || !std::isdigit(buf[pos]))
            throw FormatError(path + ": expected " + std::string(what), pos);
        std::uint64_t v = 0;
        while (pos < buf.size() && std::isdigit(buf[pos])) {
            v = v * 10 + (buf[pos] - '0');
            if (v > 0xFFFFFFFFull)
                throw FormatError(path + ": " + std::string(what) + " out of range", pos);
            ++pos;
        }
        return v;
    }
};

} // namespace

ImageGrid load_pgm(const std::string& path) {
    const auto buf = read_all(path);
    if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '2' && buf[1] != '5'))
        throw FormatError(path + ": not a P2/P5 graymap", 0);
    const bool binary = buf[1] == '5';
    PgmScanner sc{buf, path, 2};
    const std::uint64_t width = sc.next_uint("width");
    const std::uint64_t height = sc.next_uint("height");
    const std::uint64_t maxval = sc.next_uint("maxval");
    if (width == 0 || height == 0)
        throw FormatError(path + ": zero dimension", sc.pos);
    if (maxval == 0 || maxval > 65535)
        throw FormatError(path + ": unsupported maxval " + std::to_string(maxval), sc.pos);

    const std::size_t npix = static_cast<std::size_t>(width * height);
    std::vector<double> data(npix);
    const double scale = 1.0 / static_cast<double>(maxval);

    if (binary) {
        // exactly one whitespace byte separates maxval from the payload
        if (sc.pos >= buf.size() || !std::isspace(buf[sc.pos]))
            throw FormatError(path + ": missing separator after maxval", sc.pos);
        std::size_t p = sc.pos + 1;
        const std::size_t bytes_per = maxval > 255 ? 2 : 1;
        if (buf.size() - p < npix * bytes_per)
            throw FormatError(path + ": truncated payload, have " + std::to_string(buf.size() - p) +
                                  " of " + std::to_string(npix * bytes_per) + " bytes",
                              buf.size());
        for (std::size_t i = 0; i < npix; ++i) {
            std::uint64_t v;
            if (bytes_per == 1) {
                v = buf[p + i];
            } else {
                v = (static_cast<std::uint64_t>(buf[p + 2 * i]) << 8) | buf[p + 2 * i + 1];
            }
            if (v > maxval)
                throw FormatError(path + ": sample " + std::to_string(v) + " exceeds maxval",
                                  p + i * bytes_per);
            data[i] = static_cast<double>(v) * scale;
        }
    } else {
        for (std::size_t i = 0; i < npix; ++i) {
            sc.skip_space_and_comments();
            if (sc.pos >= buf.size())
                throw FormatError(path + ": truncated payload, have " + std::to_string(i) + " of " +
                                      std::to_string(npix) + " samples",
                                  sc.pos);
            const std::uint64_t v = sc.next_uint("sample");
            if (v > maxval)
                throw FormatError(path + ": sample " + std::to_string(v) + " exceeds maxval",
                                  sc.pos);
            data[i] = static_cast<double>(v) * scale;
        }
    }
    return ImageGrid(static_cast<std::size_t>(height), static_cast<std::size_t>(width),
                     std::move(data));
}

void save_pgm(const ImageGrid& grid, const std::string& path, double clip_lo, double clip_hi) {
    if (!(clip_lo < clip_hi))
        throw ArgumentError("save_pgm: clip_lo must be below clip_hi");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << "P5\n" << grid.width() << " " << grid.height() << "\n255\n";
    const double span = clip_hi - clip_lo;
    for (double v : grid.values()) {
        const double c = std::min(clip_hi, std::max(clip_lo, v));
        const double t = (c - clip_lo) / span;
        const int byte = std::min(255, static_cast<int>(std::floor(t * 255.0)));
        const unsigned char b = static_cast<unsigned char>(byte);
        out.write(reinterpret_cast<const char*>(&b), 1);
    }
    if (!out)
        throw IoError("write failed: " + path);
}

double clipped_fraction(const ImageGrid& grid, double lo, double hi) {
    if (!(lo < hi))
        throw ArgumentError("clipped_fraction: lo must be below hi");
    std::size_t n = 0;
    for (double v : grid.values())
        if (v < lo || v > hi)
            ++n;
    return static_cast<double>(n) / static_cast<double>(grid.size());
}

ImageGrid center_crop(const ImageGrid& grid, std::size_t h, std::size_t w) {
    const std::size_t H = grid.height(), W = grid.width();
    if (h < 1 || h > H || w < 1 || w > W)
        throw ArgumentError("center_crop: requested " + std::to_string(h) + "x" +
                            std::to_string(w) + " from " + std::to_string(H) + "x" +
                            std::to_string(W));
    // After the half-period shift the origin sits at (H/2, W/2); the crop
    // window is centered there, so crop index (h/2, w/2) is the origin.
    ImageGrid out(h, w);
    const std::size_t ci = H / 2, cj = W / 2;
    for (std::size_t i = 0; i < h; ++i) {
        const std::size_t si = (ci - h / 2 + i + H) % H; // shifted row
        const std::size_t oi = (si + H - H / 2) % H;     // original row
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t sj = (cj - w / 2 + j + W) % W;
            const std::size_t oj = (sj + W - W / 2) % W;
            out.at(i, j) = grid.at(oi, oj);
        }
    }
    return out;
}

} // namespace sclreg
