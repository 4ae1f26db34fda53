#pragma once

#include "npf/rng.hpp"

namespace npf {

/// Standard normal CDF.
double normal_cdf(double z);

/// Draw from N(mean, var) restricted to the open interval (lo, hi).
///
/// Plain rejection from the untruncated normal is used while the interval
/// holds at least 1% of the mass. Below that the draw comes from the
/// inverse CDF, evaluated on the tail nearest the interval; intervals so far
/// out that the tail probability underflows use exponential-proposal
/// rejection (Robert, 1995) or, for very narrow intervals, a uniform
/// proposal. Throws ContractViolation unless var > 0 and lo < hi.
double sample_truncated_normal(double mean, double var, double lo, double hi, Rng& rng);

}  // namespace npf
