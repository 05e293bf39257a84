#pragma once

#include <stdexcept>
#include <string>

namespace nilcount {

enum class Errc {
  invalid_argument = 1,
  dimension_mismatch,
  singular,
  domain,
  budget,
  overflow,
  convergence,
  schema,
  io,
  assertion,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace nilcount
