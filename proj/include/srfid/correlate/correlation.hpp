#pragma once

#include <span>
#include <vector>

namespace srfid::correlate {

/// 1-based fractional ranks; ties share the mean of their positions.
/// Infinities order naturally (+inf above every finite value, tied with
/// each other). Throws ArgumentError on NaN.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws ArgumentError for unequal
/// lengths or n < 3 and DegenerateInputError when either series has a
/// single rank.
double srcc(std::span<const double> x, std::span<const double> y);

/// Two-pass Pearson product-moment correlation on raw values. Throws
/// ArgumentError for unequal lengths, n < 3 or non-finite input and
/// DegenerateInputError on zero variance.
double plcc(std::span<const double> x, std::span<const double> y);

}  // namespace srfid::correlate
