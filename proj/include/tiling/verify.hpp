#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tiling/io.hpp"

namespace tiling::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  bool skipped = false;
  std::string detail;     // one line, key=value pairs
  io::json metrics = io::json::object();
  double seconds = 0;
};

struct VerifyOptions {
  uint64_t seed = 1;
  int threads = 1;
  double budget_minutes = std::numeric_limits<double>::infinity();
  // Progress messages (not results); may be empty.
  std::function<void(const std::string&)> log;
};

// The eight acceptance criteria with their sample sizes and tolerances fixed
// in the implementation. Criteria 1-4 form the planar suite, 5-8 the curved one.
CriterionResult oracle_exactness(const VerifyOptions& opt);
CriterionResult ust_dimer_law(const VerifyOptions& opt);
CriterionResult walk_mechanics(const VerifyOptions& opt);
CriterionResult clt_isotropy(const VerifyOptions& opt);
CriterionResult construction_quality(const VerifyOptions& opt);
CriterionResult cut_fidelity(const VerifyOptions& opt);
CriterionResult fluctuations(const VerifyOptions& opt);
CriterionResult measure_comparison(const VerifyOptions& opt);

// suite: "planar", "curved" or "all". Criteria starting after the budget is
// spent are reported as skipped. on_result is called as each one finishes.
std::vector<CriterionResult> run_suite(const std::string& suite, const VerifyOptions& opt,
                                       const std::function<void(const CriterionResult&)>& on_result = {});

// "criterion 3 walk-mechanics: PASS  key=value ..."
std::string format_line(const CriterionResult& r);

}  // namespace tiling::verify
