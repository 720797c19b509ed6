// Frequency-domain kernels: Butterworth low-pass, log-Gabor bandpass with
// analytic parameter derivatives, and the combined Riesz kernel.
#pragma once

#include <memory>
#include <utility>

#include "mono2d/spectral.hpp"

namespace mono2d {

struct LowPassSpec {
    double cutoff = 0.5; // cycles/pixel, 0 < cutoff <= 0.5
    int order = 10;      // >= 1

    void validate() const;
};

struct LogGaborSpec {
    double f0 = 0.1;     // center frequency, cycles/pixel, > 0
    double sigma_r = 0.5; // relative bandwidth, 0 < sigma_r < 1

    void validate() const;
};

// Pointwise gains. The grid functions evaluate these on the radial frequency.
double butterworth_gain(double f, const LowPassSpec& spec);

// Log-Gabor gain; G(0) := 0 so the bandpass has exactly zero mean response.
double log_gabor_gain(double f, const LogGaborSpec& spec);

struct LogGaborGainDerivatives {
    double df0 = 0.0;
    double dsigma_r = 0.0;
};

// Pointwise dG/df0 and dG/dsigma_r; both zero at f = 0.
LogGaborGainDerivatives log_gabor_gain_derivatives(double f, const LogGaborSpec& spec);

RealField butterworth(const FrequencyGrid& grid, const LowPassSpec& spec);
RealField log_gabor(const FrequencyGrid& grid, const LogGaborSpec& spec);
std::pair<RealField, RealField> log_gabor_derivatives(const FrequencyGrid& grid, const LogGaborSpec& spec);

// Combined Riesz kernel (i*fx - fy)/sqrt(fx^2 + fy^2); DC bin = 0. On even
// grids the unpairable Nyquist frequency of each dimension contributes no
// odd component (a real odd filter has zero response there), so those rows
// and columns carry only the other dimension's term; every fully pairable
// non-DC bin has unit magnitude.
ComplexField riesz(const FrequencyGrid& grid);

// Shared immutable kernels for pieces that never change during training.
// Entries are built once per key under a lock; readers get stable snapshots.
std::shared_ptr<const RealField> cached_butterworth(int height, int width, const LowPassSpec& spec);
std::shared_ptr<const ComplexField> cached_riesz(int height, int width);
std::shared_ptr<const FrequencyGrid> cached_grid(int height, int width);

} // namespace mono2d
