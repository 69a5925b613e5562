#pragma once

#include <functional>
#include <string>
#include <vector>

namespace chb {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::string preset_dir = "presets";
  int threads = 1;
  std::vector<int> only;  ///< empty: all criteria
};

/// One line: "PASS [n] title: detail (x.xs)".
std::string format_result(const CriterionResult& r);

/// Run the acceptance criteria in order, reporting each as it finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

CriterionResult criterion_basis();
CriterionResult criterion_variational_derivatives();
CriterionResult criterion_energy_dissipation(const std::string& preset_dir, int threads);
CriterionResult criterion_conservation(const std::string& preset_dir);
CriterionResult criterion_spd_structure();
CriterionResult criterion_energy_lower_bounds();
CriterionResult criterion_continuous_dependence(const std::string& preset_dir, int threads);
CriterionResult criterion_dual_norm();
CriterionResult criterion_reproducibility(const std::string& preset_dir);

}  // namespace chb
