#pragma once

#include "gpsabb/estimands.hpp"
#include "gpsabb/gps.hpp"

namespace gpsabb {

// Ratio-weighted ATT: each arm's mean is a weighted mean of observed outcomes
// with weights r(t,X)/r(w,X); variance by linearization with fixed weights.
ContrastEstimate ipw_att(const Dataset& data, const GpsMatrix& gps, int t, int j, int k);

}  // namespace gpsabb
