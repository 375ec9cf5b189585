#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gpsabb/balance.hpp"
#include "gpsabb/types.hpp"

namespace gpsabb {

struct ContrastRecord {
  int j = 0;
  int k = 0;
  Estimand estimand = Estimand::risk_difference;
  double point = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::string method;
  int Q = 0;
  int M = 0;
  std::uint64_t seed = 0;
};

struct EstimateReport {
  std::vector<ContrastRecord> records;
  std::map<std::string, std::string> metadata;  // label map, n_excluded, flags
  BalanceReport balance_before;
  BalanceReport balance_after;
};

// load -> fit GPS -> trim to common support -> (ABB | matching | IPW) ->
// pooled estimates for every pair contrast and requested estimand.
EstimateReport run_estimate(const Dataset& data, const RunConfig& config);

}  // namespace gpsabb
