#pragma once

#include <string>

#include "sclreg/grid.hpp"

namespace sclreg {

// Binary field container ("FieldFile"), the interchange format for images,
// kernels and statistics payloads:
//
//   offset  size  contents
//   0       8     magic "SCLREGF1"
//   8       1     kind: 0 = real, 1 = complex
//   9       8     height, unsigned little-endian
//   17      8     width, unsigned little-endian
//   25      -     row-major IEEE-754 binary64 little-endian payload;
//                 real: height*width values, complex: re,im interleaved
//
// The file size must match the header exactly; save/load round-trips are
// bit-exact.

void save_field(const ImageGrid& grid, const std::string& path);
void save_field(const SpectralField& field, const std::string& path);
ImageGrid load_field_real(const std::string& path);
SpectralField load_field_complex(const std::string& path);

/// Reads an 8- or 16-bit portable graymap (P2 ASCII or P5 binary) and maps
/// intensities to [0,1] by dividing by maxval.
ImageGrid load_pgm(const std::string& path);

/// Clamps to [clip_lo, clip_hi], affinely maps that range to 0..255 with
/// byte = floor(t * 255), and writes an 8-bit binary (P5) graymap.
void save_pgm(const ImageGrid& grid, const std::string& path, double clip_lo, double clip_hi);

/// Companion query to save_pgm: fraction of pixels strictly outside
/// [lo, hi] (values exactly at the bounds are not clipped).
double clipped_fraction(const ImageGrid& grid, double lo, double hi);

/// Extracts the h x w window centered on the kernel origin. The origin
/// convention places the kernel center at index (0,0); the crop first
/// applies the half-period circular shift (origin to (H/2, W/2)) and then
/// takes the centered window, so the origin lands at (h/2, w/2) of the crop.
ImageGrid center_crop(const ImageGrid& grid, std::size_t h, std::size_t w);

} // namespace sclreg
