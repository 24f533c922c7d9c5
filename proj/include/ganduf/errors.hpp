#pragma once

#include <stdexcept>
#include <string>

namespace ganduf {

// Base for everything the library throws deliberately.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor shapes not conformable for an op.
struct ShapeError : Error {
  using Error::Error;
};

// A documented precondition was violated by the caller.
struct ContractError : Error {
  using Error::Error;
};

// Degenerate or invalid geometry (zero-width bounding box, bad motif params, ...).
struct GeometryError : Error {
  using Error::Error;
};

// File/container problems: bad magic, version mismatch, truncation, checksum.
struct IoError : Error {
  using Error::Error;
};

// Numerical failure (non-finite loss, non-PD kernel matrix after escalation, ...).
struct NumericError : Error {
  using Error::Error;
};

}  // namespace ganduf
