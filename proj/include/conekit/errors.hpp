#pragma once

#include <stdexcept>
#include <string>

namespace conekit {

enum class errc {
  zero_vector,
  overflow,
  not_square,
  rank_mismatch,
  not_simplicial,
  not_smooth,
  not_strongly_convex,
  not_a_fan,
  not_contained,
  unstable_center,
  unstable_ray,
  groupoid_blowup,
  dual_rank_cap,
  ill_posed,
  no_certificate,
  unsupported_coefficient,
  parse_error,
  invalid_complex,
  internal,
};

const char* errc_name(errc c);

// Exit-code class used by the C API and the CLI:
//   1 = domain error, 2 = usage, 3 = overflow / resource cap.
int errc_exit_class(errc c);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw error(code, msg); }

}  // namespace conekit
