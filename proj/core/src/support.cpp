#include "gpsabb/support.hpp"

#include <limits>
#include <sstream>

namespace gpsabb {

SupportRegion common_support(const GpsMatrix& gps, const std::vector<int>& W, int Z) {
  const auto n = static_cast<int>(W.size());
  if (gps.R.rows() != n) throw Error("common_support: W length does not match GPS rows");

  SupportRegion region;
  region.r_min = Eigen::VectorXd::Constant(Z, -std::numeric_limits<double>::infinity());
  region.r_max = Eigen::VectorXd::Constant(Z, std::numeric_limits<double>::infinity());

  // r_min[w] = max over groups of within-group minima; r_max[w] symmetric.
  for (int w = 0; w < Z; ++w) {
    for (int z = 1; z <= Z; ++z) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      bool seen = false;
      for (int i = 0; i < n; ++i) {
        if (W[i] != z) continue;
        seen = true;
        lo = std::min(lo, gps.R(i, w));
        hi = std::max(hi, gps.R(i, w));
      }
      if (!seen) {
        std::ostringstream msg;
        msg << "common_support: treatment group " << z << " is empty";
        throw Error(msg.str());
      }
      region.r_min[w] = std::max(region.r_min[w], lo);
      region.r_max[w] = std::min(region.r_max[w], hi);
    }
  }

  region.eligible.assign(n, true);
  for (int i = 0; i < n; ++i) {
    for (int w = 0; w < Z; ++w) {
      if (!(gps.R(i, w) > region.r_min[w] && gps.R(i, w) < region.r_max[w])) {
        region.eligible[i] = false;
        break;
      }
    }
  }
  region.n_excluded = n - static_cast<int>(std::count(region.eligible.begin(),
                                                      region.eligible.end(), true));
  if (region.n_excluded == n) {
    int worst = 0;
    double width = region.r_max[0] - region.r_min[0];
    for (int w = 1; w < Z; ++w) {
      if (region.r_max[w] - region.r_min[w] < width) {
        width = region.r_max[w] - region.r_min[w];
        worst = w;
      }
    }
    std::ostringstream msg;
    msg << "common_support: degenerate region, no unit eligible (tightest coordinate: "
        << "treatment " << worst + 1 << ", interval (" << region.r_min[worst] << ", "
        << region.r_max[worst] << "))";
    throw Error(msg.str());
  }
  return region;
}

GpsMatrix filter_gps(const GpsMatrix& gps, const std::vector<bool>& mask) {
  const auto n = gps.R.rows();
  if (static_cast<Eigen::Index>(mask.size()) != n)
    throw Error("filter_gps: mask length mismatch");
  const auto kept = std::count(mask.begin(), mask.end(), true);
  GpsMatrix out;
  out.R.resize(kept, gps.R.cols());
  out.logitR.resize(kept, gps.R.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    out.R.row(r) = gps.R.row(i);
    out.logitR.row(r) = gps.logitR.row(i);
    ++r;
  }
  return out;
}

}  // namespace gpsabb
