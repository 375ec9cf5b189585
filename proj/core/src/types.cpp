#include "gpsabb/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gpsabb {

std::string to_string(Estimand e) {
  switch (e) {
    case Estimand::risk_difference: return "risk_difference";
    case Estimand::log_odds_ratio: return "log_odds_ratio";
    case Estimand::log_risk_ratio: return "log_risk_ratio";
    case Estimand::mean_difference: return "mean_difference";
  }
  return "unknown";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::abb: return "abb";
    case Method::matching: return "matching";
    case Method::ipw: return "ipw";
  }
  return "unknown";
}

Estimand estimand_from_string(const std::string& s) {
  if (s == "risk_difference") return Estimand::risk_difference;
  if (s == "log_odds_ratio") return Estimand::log_odds_ratio;
  if (s == "log_risk_ratio") return Estimand::log_risk_ratio;
  if (s == "mean_difference") return Estimand::mean_difference;
  throw Error("unknown estimand: " + s);
}

int Dataset::group_size(int w) const {
  return static_cast<int>(std::count(W.begin(), W.end(), w));
}

void Dataset::validate() const {
  const int nn = n();
  if (X.rows() != nn || Y.size() != nn)
    throw Error("Dataset: X, W, Y must agree on the number of units");
  if (Z < 1) throw Error("Dataset: Z must be >= 1");
  std::vector<int> counts(static_cast<std::size_t>(Z), 0);
  for (int i = 0; i < nn; ++i) {
    if (W[i] < 1 || W[i] > Z) {
      std::ostringstream msg;
      msg << "Dataset: unknown treatment label " << W[i] << " at row " << i
          << " (expected 1.." << Z << ")";
      throw Error(msg.str());
    }
    counts[static_cast<std::size_t>(W[i] - 1)]++;
  }
  for (int w = 1; w <= Z; ++w)
    if (counts[static_cast<std::size_t>(w - 1)] == 0) {
      std::ostringstream msg;
      msg << "Dataset: treatment group " << w << " is empty";
      throw Error(msg.str());
    }
  if (!X.allFinite()) throw Error("Dataset: non-finite covariate entry");
  for (int i = 0; i < nn; ++i) {
    const double y = Y[i];
    bool ok;
    if (outcome_kind == OutcomeKind::binary) {
      ok = (y == 0.0 || y == 1.0);
    } else {
      ok = (y == std::floor(y)) && y >= 1.0 && y <= levels;
    }
    if (!ok) {
      std::ostringstream msg;
      msg << "Dataset: outcome value " << y << " at row " << i
          << " outside the declared domain";
      throw Error(msg.str());
    }
  }
}

void RunConfig::validate(int Z) const {
  if (reference < 0 || reference > Z) throw Error("RunConfig: reference out of range");
  if (M < 2) throw Error("RunConfig: M must be >= 2");
  if (Q < 1) throw Error("RunConfig: Q must be >= 1");
}

Dataset filter_dataset(const Dataset& data, const std::vector<bool>& mask) {
  if (static_cast<int>(mask.size()) != data.n())
    throw Error("filter_dataset: mask length mismatch");
  const auto kept = std::count(mask.begin(), mask.end(), true);
  Dataset out;
  out.outcome_kind = data.outcome_kind;
  out.levels = data.levels;
  out.Z = data.Z;
  out.X.resize(kept, data.P());
  out.Y.resize(kept);
  out.W.reserve(static_cast<std::size_t>(kept));
  Eigen::Index r = 0;
  for (int i = 0; i < data.n(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    out.X.row(r) = data.X.row(i);
    out.Y[r] = data.Y[i];
    out.W.push_back(data.W[static_cast<std::size_t>(i)]);
    ++r;
  }
  return out;
}

}  // namespace gpsabb
