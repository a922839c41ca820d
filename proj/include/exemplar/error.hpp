#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace exemplar {

enum class Errc {
  dimension_mismatch,
  empty_ground_set,
  invalid_data,
  index_out_of_range,
  shared_memory_overflow,
  empty_evaluation_set,
  out_of_memory,
  budget_exceeds_ground_set,
  instance_too_large,
  incomparable_records,
  invalid_argument,
  io_error,
  format_error,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::empty_ground_set: return "empty ground set";
    case Errc::invalid_data: return "invalid data";
    case Errc::index_out_of_range: return "index out of range";
    case Errc::shared_memory_overflow: return "shared memory overflow";
    case Errc::empty_evaluation_set: return "empty evaluation set";
    case Errc::out_of_memory: return "out of memory";
    case Errc::budget_exceeds_ground_set: return "budget exceeds ground set";
    case Errc::instance_too_large: return "instance too large";
    case Errc::incomparable_records: return "incomparable records";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::io_error: return "i/o error";
    case Errc::format_error: return "format error";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace exemplar
