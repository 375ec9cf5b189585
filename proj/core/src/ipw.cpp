#include "gpsabb/ipw.hpp"

namespace gpsabb {

namespace {

struct ArmMean {
  double mean = 0.0;
  double var = 0.0;  // linearized, weights treated as fixed
};

ArmMean weighted_arm(const Dataset& data, const GpsMatrix& gps, int t, int w) {
  double sw = 0.0, swy = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    if (data.W[i] != w) continue;
    const double u = gps.R(i, t - 1) / gps.R(i, w - 1);
    sw += u;
    swy += u * data.Y[i];
  }
  if (sw <= 0.0) throw Error("ipw_att: zero total weight in an arm");
  ArmMean out;
  out.mean = swy / sw;
  double acc = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    if (data.W[i] != w) continue;
    const double u = gps.R(i, t - 1) / gps.R(i, w - 1);
    const double e = data.Y[i] - out.mean;
    acc += u * u * e * e;
  }
  out.var = acc / (sw * sw);
  return out;
}

}  // namespace

ContrastEstimate ipw_att(const Dataset& data, const GpsMatrix& gps, int t, int j, int k) {
  if (data.group_size(j) == 0 || data.group_size(k) == 0)
    throw Error("ipw_att: empty treatment group");
  ContrastEstimate est;
  est.j = j;
  est.k = k;
  est.estimand = Estimand::risk_difference;
  if (j == k) return est;
  const ArmMean aj = weighted_arm(data, gps, t, j);
  const ArmMean ak = weighted_arm(data, gps, t, k);
  est.tau_hat = aj.mean - ak.mean;
  est.v_hat = aj.var + ak.var;
  return est;
}

}  // namespace gpsabb
