#pragma once

#include <stdexcept>
#include <string>

namespace floodsar {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file contents. Messages carry the byte offset where decoding failed.
struct FormatError : Error {
    using Error::Error;
};

// File ended before the declared payload was complete.
struct TruncationError : FormatError {
    using FormatError::FormatError;
};

// Filesystem problems: unreadable, unwritable, missing.
struct IoError : Error {
    using Error::Error;
};

// Two rasters that must share a grid (size + transform + CRS) do not.
struct GridMismatchError : Error {
    using Error::Error;
};

// Bad configuration, manifest, or network-spec input.
struct ConfigError : Error {
    using Error::Error;
};

// Statistical operation cannot proceed: empty reference, too few samples,
// rank-deficient design, missing calibration class.
struct StatError : Error {
    using Error::Error;
};

}  // namespace floodsar
