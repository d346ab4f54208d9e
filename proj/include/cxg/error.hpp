#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cxg {

enum class Errc {
  io,
  config,
  empty_corpus,
  empty_plan,
  tagset_violation,
  undefined_association,
  precondition,
  shape,
  training,
  evaluation,
  insufficient_data,
  reference,
  degenerate_field,
  undefined_statistic,
  format,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure raised by the library. The CLI maps Errc::io to exit status 2
// and everything else to exit status 1.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace cxg
