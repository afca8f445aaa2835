#ifndef TDGAT_ERRORS_HPP
#define TDGAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tdgat {

// Malformed input data (bad CoNLL-U/JSONL/GloVe/model files).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric checks that did not hold (gradcheck over tolerance, etc.).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tdgat

#endif
