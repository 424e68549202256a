// Property suite run by `qsl verify`: every invariant of the library checked
// on randomized and protocol inputs, with the worst residual reported.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsl/protocols.hpp"

namespace qsl {

struct VerifyOptions {
  double omega = 1.0;
  double gamma = 2.0;
  double lambda0 = 1e4;
  std::optional<double> step;               // forced RK4 step; default rule otherwise
  std::optional<ProtocolKind> protocol;     // restrict protocol checks to one kind
  std::uint64_t seed = 0x5eed2013u;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst residual observed
  double tolerance = 0.0;
  std::string detail;
};

std::vector<PropertyResult> run_verification(const VerifyOptions& options);

}  // namespace qsl
