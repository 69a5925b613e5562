#pragma once

#include "chb/constitutive.hpp"

#include <string>
#include <vector>

namespace chb {

/// existence: assumptions (A1)..(A7); continuity: (B1)..(B4) on top of (A1), (A3), (A5), (A6).
enum class ExperimentMode { existence, continuity };

struct Violation {
  std::string assumption;  ///< e.g. "(A2*)"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> errors;
  std::vector<Violation> warnings;
  bool ok() const { return errors.empty(); }
  /// Throws ValidationError naming the first violated assumption; lists all of them in the message.
  void raise_if_failed() const;
};

ValidationReport validate_assumptions(const MaterialParams& params, const SourceTerms& sources,
                                      ExperimentMode mode);

}  // namespace chb
