// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace layoutkit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Zero-area denominator in iou / containment_fraction.
struct GeometryError : Error {
    using Error::Error;
};

struct EmptyInputError : Error {
    using Error::Error;
};

// String does not name one of the 17 canonical labels.
struct UnknownLabelError : Error {
    using Error::Error;
};

// Malformed JSON; carries the byte offset reported by the parser.
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t byte_offset)
        : Error(what), byte(byte_offset) {}
    std::size_t byte = 0;
};

// Cross-file reference to an id that does not exist.
struct IntegrityError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

// Requested overlay source not available on the page.
struct MissingSourceError : Error {
    using Error::Error;
};

struct EmptyDatasetError : Error {
    using Error::Error;
};

// docling-eval: every sample was skipped by the count-mismatch rule.
struct AllSamplesSkippedError : Error {
    using Error::Error;
};

}  // namespace layoutkit
