// Frequency-grid construction and the 2D DFT pair used by the filtering
// pipeline. Frequencies are normalized to cycles/pixel with Nyquist at 0.5,
// laid out in unshifted DFT index order so kernels multiply spectra directly.
#pragma once

#include "mono2d/field.hpp"

namespace mono2d {

// Per-pixel normalized spatial frequencies for an H x W image. fx and fy lie
// in [-0.5, 0.5); f = sqrt(fx^2 + fy^2) is zero exactly at the DC index (0,0).
struct FrequencyGrid {
    int height = 0;
    int width = 0;
    RealField fx;
    RealField fy;
    RealField f;
};

// Builds the grid for a shape. Index k in a dimension of size N maps to
// frequency k/N for k < ceil(N/2) and (k - N)/N otherwise.
FrequencyGrid make_grid(int height, int width);

// Unnormalized forward DFT of a real image. Throws InvalidInputError on
// non-finite values.
ComplexField fft2(const RealField& image);

// Inverse DFT scaled by 1/(H*W); returns the real part. For Hermitian inputs
// the discarded imaginary residue is at floating-point noise level.
RealField ifft2(const ComplexField& spectrum);

// Inverse DFT keeping the complex result (Riesz-filtered spectra are not
// Hermitian, so their inverse transform is genuinely complex).
ComplexField ifft2_complex(const ComplexField& spectrum);

// Definitionally correct O(N^4) DFT by explicit double summation. Test
// oracle only; throws OracleSizeError when H*W > 4096.
ComplexField direct_dft2(const RealField& image);

} // namespace mono2d
