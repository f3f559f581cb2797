#pragma once

#include <stdexcept>
#include <string>

namespace hyperid {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Pochhammer factor or gamma argument hit a nonpositive integer.
struct PoleError : Error {
  using Error::Error;
};

// A nonterminating sum cannot meet its tolerance (divergent or budget blown).
struct ConvergenceError : Error {
  using Error::Error;
};

// A derived quantity vanished or its defining denominator vanished.
struct DegenerateParams : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

// Rejection sampling failed to find an admissible assignment.
struct SamplerExhausted : Error {
  using Error::Error;
};

struct UnknownIdentity : Error {
  using Error::Error;
};

} // namespace hyperid
