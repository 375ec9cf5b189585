#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gpsabb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutcomeKind { binary, ordinal };

enum class Estimand { risk_difference, log_odds_ratio, log_risk_ratio, mean_difference };

enum class Method { abb, matching, ipw };

std::string to_string(Estimand e);
std::string to_string(Method m);
Estimand estimand_from_string(const std::string& s);

/// Observational input: covariates X (n x P), treatment labels W in 1..Z,
/// outcome Y (binary {0,1} or ordinal {1..L}).
struct Dataset {
  Eigen::MatrixXd X;
  std::vector<int> W;
  Eigen::VectorXd Y;
  OutcomeKind outcome_kind = OutcomeKind::binary;
  int levels = 2;  // L for ordinal outcomes
  int Z = 0;

  int n() const { return static_cast<int>(W.size()); }
  int P() const { return static_cast<int>(X.cols()); }
  int group_size(int w) const;

  // Throws Error if any invariant is violated.
  void validate() const;
};

struct RunConfig {
  int reference = 0;  // 0: choose largest group
  std::vector<Estimand> estimands = {Estimand::risk_difference};
  int Q = 5;
  int M = 25;
  std::uint64_t seed = 0;
  Method method = Method::abb;
  bool rubin_correction = false;
  double ridge = 0.0;
  bool refit_after_trim = false;
  int match_L = 1;
  bool match_with_replacement = true;

  void validate(int Z) const;
};

// Keep only rows where mask[i] is true; W labels are preserved as-is.
Dataset filter_dataset(const Dataset& data, const std::vector<bool>& mask);

}  // namespace gpsabb
