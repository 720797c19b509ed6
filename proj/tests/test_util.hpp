// Shared helpers for the test suites: random fields, affine remaps, and a
// spatial-domain circular-convolution oracle that is independent of the
// spectral pipeline it checks.
#pragma once

#include <complex>
#include <random>

#include "mono2d/field.hpp"

namespace mono2d::testutil {

inline RealField random_field(int height, int width, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    RealField f(height, width);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (auto& v : f.values()) v = dist(rng);
    return f;
}

inline RealField affine(const RealField& f, double a, double b) {
    RealField out(f.height(), f.width());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = a * f[i] + b;
    return out;
}

// Circular (periodic) convolution of an image with a spatial kernel given as
// a full H x W field whose origin sits at index (0,0), matching the inverse
// DFT of a frequency-domain kernel. O(N^4); for small shapes only.
inline RealField circular_convolve(const RealField& image, const RealField& kernel) {
    const int h = image.height(), w = image.width();
    RealField out(h, w, 0.0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int kr = 0; kr < h; ++kr)
                for (int kc = 0; kc < w; ++kc) {
                    const int sr = (r - kr + h) % h;
                    const int sc = (c - kc + w) % w;
                    acc += kernel(kr, kc) * image(sr, sc);
                }
            out(r, c) = acc;
        }
    return out;
}

// Complex-kernel variant: returns the complex response field.
inline ComplexField circular_convolve(const RealField& image, const ComplexField& kernel) {
    const int h = image.height(), w = image.width();
    ComplexField out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            std::complex<double> acc{0.0, 0.0};
            for (int kr = 0; kr < h; ++kr)
                for (int kc = 0; kc < w; ++kc) {
                    const int sr = (r - kr + h) % h;
                    const int sc = (c - kc + w) % w;
                    acc += kernel(kr, kc) * image(sr, sc);
                }
            out(r, c) = acc;
        }
    return out;
}

} // namespace mono2d::testutil
