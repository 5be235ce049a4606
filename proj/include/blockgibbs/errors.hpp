#pragma once

#include <stdexcept>
#include <string>

namespace blockgibbs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidData : Error {
  using Error::Error;
};

struct DegenerateColumn : Error {
  explicit DegenerateColumn(std::size_t index)
      : Error("degenerate (constant) column at index " + std::to_string(index)),
        index(index) {}
  std::size_t index;
};

struct InvalidTau : Error {
  using Error::Error;
};

struct InvalidParameter : Error {
  using Error::Error;
};

struct NumericalFailure : Error {
  using Error::Error;
};

struct DegenerateTrace : Error {
  using Error::Error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

struct ChainUnstable : Error {
  using Error::Error;
};

}  // namespace blockgibbs
