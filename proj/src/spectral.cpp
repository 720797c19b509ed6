#include "mono2d/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace mono2d {

FrequencyGrid make_grid(int height, int width) {
    detail::check_dims(height, width);
    FrequencyGrid g;
    g.height = height;
    g.width = width;
    g.fx = RealField(height, width);
    g.fy = RealField(height, width);
    g.f = RealField(height, width);
    // Frequencies as exact ratios of small integers; two constructions for the
    // same shape are bit-identical.
    for (int r = 0; r < height; ++r) {
        const int ky = (2 * r < height) ? r : r - height;
        const double vy = static_cast<double>(ky) / height;
        for (int c = 0; c < width; ++c) {
            const int kx = (2 * c < width) ? c : c - width;
            const double vx = static_cast<double>(kx) / width;
            g.fx(r, c) = vx;
            g.fy(r, c) = vy;
            g.f(r, c) = std::sqrt(vx * vx + vy * vy);
        }
    }
    return g;
}

namespace {

// FFTW plan pair per shape. Plans are created once under a lock and then only
// read; fftw_execute_dft on distinct buffers is thread-safe. FFTW_ESTIMATE
// keeps planning deterministic, FFTW_UNALIGNED lets plans run on any buffer.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

PlanPair& plans_for(int height, int width) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(height, width);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> scratch_in(static_cast<std::size_t>(height) * width);
    std::vector<std::complex<double>> scratch_out(scratch_in.size());
    auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
    auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.forward = fftw_plan_dft_2d(height, width, in, out, FFTW_FORWARD, flags);
    p.backward = fftw_plan_dft_2d(height, width, in, out, FFTW_BACKWARD, flags);
    return cache.emplace(key, p).first->second;
}

void execute(fftw_plan plan, const ComplexField& in, ComplexField& out) {
    // FFTW does not write through the input pointer for out-of-place c2c
    // transforms; the const_cast is confined here.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan, src, dst);
}

void check_consistent(const ComplexField& spectrum) {
    if (spectrum.height() < 2 || spectrum.width() < 2 ||
        spectrum.size() != static_cast<std::size_t>(spectrum.height()) * spectrum.width()) {
        throw InvalidShapeError("spectrum shape is inconsistent with its data");
    }
}

} // namespace

ComplexField fft2(const RealField& image) {
    if (!all_finite(image)) throw InvalidInputError("fft2: input contains non-finite values");
    const int h = image.height(), w = image.width();
    ComplexField in(h, w);
    for (std::size_t i = 0; i < image.size(); ++i) in[i] = image[i];
    ComplexField out(h, w);
    execute(plans_for(h, w).forward, in, out);
    return out;
}

ComplexField ifft2_complex(const ComplexField& spectrum) {
    check_consistent(spectrum);
    const int h = spectrum.height(), w = spectrum.width();
    ComplexField out(h, w);
    execute(plans_for(h, w).backward, spectrum, out);
    const double scale = 1.0 / (static_cast<double>(h) * w);
    for (auto& v : out.values()) v *= scale;
    return out;
}

RealField ifft2(const ComplexField& spectrum) {
    ComplexField full = ifft2_complex(spectrum);
    RealField out(full.height(), full.width());
    for (std::size_t i = 0; i < full.size(); ++i) out[i] = full[i].real();
    return out;
}

ComplexField direct_dft2(const RealField& image) {
    const int h = image.height(), w = image.width();
    if (static_cast<long long>(h) * w > 4096) {
        throw OracleSizeError("direct_dft2: oracle limited to H*W <= 4096");
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    ComplexField out(h, w);
    for (int k = 0; k < h; ++k) {
        for (int l = 0; l < w; ++l) {
            std::complex<double> acc{0.0, 0.0};
            for (int r = 0; r < h; ++r) {
                // Reduce the phase index exactly in integers before forming
                // the angle so large products do not lose precision.
                const long long row_term = static_cast<long long>(k) * r % h;
                for (int c = 0; c < w; ++c) {
                    const long long col_term = static_cast<long long>(l) * c % w;
                    const double angle =
                        -two_pi * (static_cast<double>(row_term) / h + static_cast<double>(col_term) / w);
                    acc += image(r, c) * std::complex<double>(std::cos(angle), std::sin(angle));
                }
            }
            out(k, l) = acc;
        }
    }
    return out;
}

} // namespace mono2d
