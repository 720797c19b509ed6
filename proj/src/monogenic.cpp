#include "mono2d/monogenic.hpp"

#include <cmath>

namespace mono2d {

CompiledFilters compile_filters(int height, int width, const FilterBank& bank, const LowPassSpec& lpf,
                                bool with_derivatives) {
    auto grid = cached_grid(height, width);
    auto lowpass = cached_butterworth(height, width, lpf);
    CompiledFilters out;
    out.height = height;
    out.width = width;
    out.n_scales = bank.n_scales();
    out.riesz_kernel = cached_riesz(height, width);
    out.sum_bandpass = RealField(height, width, 0.0);
    if (with_derivatives) {
        out.d_f0_star.assign(out.n_scales, RealField(height, width, 0.0));
        out.d_sigma_r_star.assign(out.n_scales, RealField(height, width, 0.0));
    }
    for (int i = 0; i < out.n_scales; ++i) {
        const LogGaborSpec spec = bank.spec(i);
        const BoundGradients chain = bank.chain(i);
        for (std::size_t p = 0; p < out.sum_bandpass.size(); ++p) {
            const double f = grid->f[p];
            const double lp = (*lowpass)[p];
            out.sum_bandpass[p] += lp * log_gabor_gain(f, spec);
            if (with_derivatives) {
                const auto d = log_gabor_gain_derivatives(f, spec);
                out.d_f0_star[i][p] = lp * d.df0 * chain.df0_df0_star;
                out.d_sigma_r_star[i][p] = lp * d.dsigma_r * chain.dsigma_r_dsigma_r_star;
            }
        }
    }
    return out;
}

namespace {

ComplexField apply_real_kernel(const ComplexField& spectrum, const RealField& kernel) {
    ComplexField out(spectrum.height(), spectrum.width());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spectrum[i] * kernel[i];
    return out;
}

ComplexField apply_complex_kernel(const ComplexField& spectrum, const ComplexField& kernel) {
    ComplexField out(spectrum.height(), spectrum.width());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spectrum[i] * kernel[i];
    return out;
}

} // namespace

MonogenicTriplet monogenic_triplet(const ComplexField& spectrum, const CompiledFilters& filters) {
    if (!spectrum.same_shape(filters.sum_bandpass))
        throw InvalidShapeError("spectrum shape does not match compiled filters");
    MonogenicTriplet t;
    const ComplexField band = apply_real_kernel(spectrum, filters.sum_bandpass);
    t.i_f = ifft2(band);
    const ComplexField odd = ifft2_complex(apply_complex_kernel(band, *filters.riesz_kernel));
    t.r1 = RealField(odd.height(), odd.width());
    t.r2 = RealField(odd.height(), odd.width());
    for (std::size_t i = 0; i < odd.size(); ++i) {
        t.r1[i] = odd[i].real();
        t.r2[i] = odd[i].imag();
    }
    return t;
}

MonogenicTriplet monogenic_triplet(const RealField& image, const FilterBank& bank, const LowPassSpec& lpf) {
    const CompiledFilters filters = compile_filters(image.height(), image.width(), bank, lpf, false);
    return monogenic_triplet(fft2(image), filters);
}

RealField local_phase(const MonogenicTriplet& triplet, double /*epsilon*/) {
    RealField out(triplet.i_f.height(), triplet.i_f.width());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double oddnorm = std::sqrt(triplet.r1[i] * triplet.r1[i] + triplet.r2[i] * triplet.r2[i]);
        out[i] = std::atan2(triplet.i_f[i], oddnorm);
    }
    return out;
}

RealField phase_asymmetry(const MonogenicTriplet& triplet, double epsilon) {
    RealField out(triplet.i_f.height(), triplet.i_f.width());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double e = triplet.i_f[i];
        const double odd2 = triplet.r1[i] * triplet.r1[i] + triplet.r2[i] * triplet.r2[i];
        const double num = std::max(std::sqrt(odd2) - std::abs(e), 0.0);
        out[i] = num / (std::sqrt(e * e + odd2) + epsilon);
    }
    return out;
}

RealField minmax_rescale(const RealField& field) {
    const auto [lo, hi] = min_max(field);
    return rescale_with_stats(field, lo, hi);
}

RealField rescale_with_stats(const RealField& field, double lo, double hi) {
    RealField out(field.height(), field.width(), 0.0);
    const double range = hi - lo;
    if (range <= 1e-12) return out;
    for (std::size_t i = 0; i < field.size(); ++i) out[i] = (field[i] - lo) / range;
    return out;
}

PhaseFeatures features_from_triplet(const MonogenicTriplet& t, const ForwardOptions& options) {
    PhaseFeatures out;
    out.mode = options.mode;
    const double peak = std::max({max_abs(t.i_f), max_abs(t.r1), max_abs(t.r2)});
    if (peak <= kTripletFlushThreshold) {
        // Constant input: the bandpass response is numerical noise only.
        out.flushed = true;
        out.raw_phase = RealField(t.i_f.height(), t.i_f.width(), 0.0);
        out.raw_asym = RealField(t.i_f.height(), t.i_f.width(), 0.0);
    } else {
        out.raw_phase = local_phase(t, options.epsilon);
        out.raw_asym = phase_asymmetry(t, options.epsilon);
    }
    std::tie(out.phase_lo, out.phase_hi) = min_max(out.raw_phase);
    std::tie(out.asym_lo, out.asym_hi) = min_max(out.raw_asym);
    if (out.has_phase()) out.phase = rescale_with_stats(out.raw_phase, out.phase_lo, out.phase_hi);
    if (out.has_asym()) out.asym = rescale_with_stats(out.raw_asym, out.asym_lo, out.asym_hi);
    return out;
}

PhaseFeatures forward(const ComplexField& spectrum, const CompiledFilters& filters,
                      const ForwardOptions& options) {
    return features_from_triplet(monogenic_triplet(spectrum, filters), options);
}

PhaseFeatures forward(const RealField& image, const FilterBank& bank, const ForwardOptions& options) {
    if (!all_finite(image)) throw InvalidInputError("forward: image contains non-finite values");
    const CompiledFilters filters = compile_filters(image.height(), image.width(), bank, options.lpf, false);
    return forward(fft2(image), filters, options);
}

} // namespace mono2d
