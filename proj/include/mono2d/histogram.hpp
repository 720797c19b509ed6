// Pooled intensity histograms over [0,1] and the 1D Wasserstein distance
// between them, used for the domain-shift divergence report.
#pragma once

#include <vector>

#include "mono2d/field.hpp"

namespace mono2d {

// Normalized histogram of all pixels in the set; values clamped into [0,1].
std::vector<double> intensity_histogram(const std::vector<const RealField*>& images, int bins = 64);

// W1 between two normalized histograms of equal bin count, in intensity
// units (CDF difference integrated over [0,1]).
double wasserstein1(const std::vector<double>& hist_a, const std::vector<double>& hist_b);

} // namespace mono2d
