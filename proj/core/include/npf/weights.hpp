#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "npf/rng.hpp"

namespace npf {

/// log(sum(exp(v))) with max subtraction; -inf if every entry is -inf.
double log_sum_exp(std::span<const double> log_values) noexcept;

/// Normalised weights w_i proportional to exp(log_w_i). Throws
/// DegenerateWeightsError (carrying `step`) when no entry is finite.
std::vector<double> normalize_log_weights(std::span<const double> log_w, std::size_t step = 0);

/// `count` i.i.d. categorical draws with probabilities proportional to
/// exp(log_w). Throws DegenerateWeightsError when no entry is finite.
std::vector<std::size_t> multinomial_indices(std::span<const double> log_w, std::size_t count,
                                             Rng& rng, std::size_t step = 0);

}  // namespace npf
