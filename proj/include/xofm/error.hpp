#pragma once

#include <stdexcept>
#include <string>

namespace xofm {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid input data (CSV cells, labels, shapes).
class data_error : public error {
  public:
    using error::error;
};

/// Training cannot proceed (e.g. no ordered pairs in the training set).
class training_error : public error {
  public:
    using error::error;
};

/// Model or report document is malformed or has an unsupported version.
class format_error : public error {
  public:
    using error::error;
};

/// A query the model cannot answer (empty score cache, zero κ denominator, ...).
class inference_error : public error {
  public:
    using error::error;
};

}  // namespace xofm
