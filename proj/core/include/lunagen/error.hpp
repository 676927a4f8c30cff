// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lunagen {

/// Error categories surfaced by the toolkit. Callers that care about the
/// failure mode (tests, the CLI exit-code mapping) switch on the code; the
/// message carries the human-readable detail.
enum class Errc {
  invalid_argument,
  behind_camera,
  invalid_depth,
  out_of_range,
  dimension_mismatch,
  io_error,
  bad_format,
  unobservable_frame,
  no_signal,
  validation_failure,
  stage_failure,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace lunagen
