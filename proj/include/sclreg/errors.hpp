#pragma once

#include <stdexcept>
#include <string>

namespace sclreg {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument: dimension mismatch, out-of-range parameter, empty input.
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

/// Malformed file contents. Carries the byte offset where parsing failed
/// when one is known (offset npos otherwise).
class FormatError : public Error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    FormatError(const std::string& msg, std::size_t byte_offset = npos)
        : Error(byte_offset == npos ? msg
                                    : msg + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::size_t byte_offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Filesystem-level failure (open/read/write).
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// A spectral field violated the conjugate symmetry required of transforms
/// of real signals. Signals solver or data corruption.
class SymmetryError : public Error {
public:
    explicit SymmetryError(const std::string& msg) : Error(msg) {}
};

/// Solver produced a non-finite value.
class SolverError : public Error {
public:
    explicit SolverError(const std::string& msg) : Error(msg) {}
};

} // namespace sclreg
