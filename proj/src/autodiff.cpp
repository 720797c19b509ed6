#include "mono2d/autodiff.hpp"

#include <cmath>

#include "mono2d/parallel.hpp"

namespace mono2d {

void TangentBundle::set_ranges(double phase_range, double asym_range) {
    inv_phase_range_ = (mode_ != ChannelMode::Asym && phase_range > 1e-12) ? 1.0 / phase_range : 0.0;
    inv_asym_range_ = (mode_ != ChannelMode::Phase && asym_range > 1e-12) ? 1.0 / asym_range : 0.0;
}

namespace {

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Differentiates phase = atan2(I_f, |R|) and the rectified asymmetry ratio
// for one parameter's triplet tangent. epsilon enters only under square roots
// and in denominators, keeping the tangents finite at vanishing energy.
void derive_feature_tangents(const MonogenicTriplet& t, const ParameterTangent& in, double epsilon,
                             RealField& d_phase, RealField& d_asym) {
    const std::size_t n = t.i_f.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double e = t.i_f[i], r1 = t.r1[i], r2 = t.r2[i];
        const double de = in.d_if[i], dr1 = in.d_r1[i], dr2 = in.d_r2[i];
        const double odd2 = r1 * r1 + r2 * r2;
        const double odd = std::sqrt(odd2);
        const double odd_reg = std::sqrt(odd2 + epsilon);
        const double d_odd = (r1 * dr1 + r2 * dr2) / odd_reg;
        d_phase[i] = (odd * de - e * d_odd) / (e * e + odd2 + epsilon);

        const double num = odd - std::abs(e);
        if (num > 0.0) {
            const double e3 = std::sqrt(e * e + odd2);
            const double e3_reg = std::sqrt(e * e + odd2 + epsilon);
            const double den = e3 + epsilon;
            const double d_num = d_odd - sign_of(e) * de;
            const double d_e3 = (e * de + r1 * dr1 + r2 * dr2) / e3_reg;
            d_asym[i] = d_num / den - num * d_e3 / (den * den);
        } else {
            // Rectifier clamps the numerator; no gradient flows.
            d_asym[i] = 0.0;
        }
    }
}

} // namespace

std::pair<PhaseFeatures, TangentBundle> forward_with_tangents(const RealField& image, const FilterBank& bank,
                                                              const ForwardOptions& options) {
    if (!all_finite(image)) throw InvalidInputError("forward_with_tangents: non-finite input");
    const CompiledFilters filters = compile_filters(image.height(), image.width(), bank, options.lpf, true);
    return forward_with_tangents(fft2(image), filters, options);
}

std::pair<PhaseFeatures, TangentBundle> forward_with_tangents(const ComplexField& spectrum,
                                                              const CompiledFilters& filters,
                                                              const ForwardOptions& options) {
    if (filters.d_f0_star.empty() && filters.n_scales > 0)
        throw InvalidInputError("forward_with_tangents: filters compiled without derivatives");
    const int h = filters.height, w = filters.width;
    const MonogenicTriplet triplet = monogenic_triplet(spectrum, filters);
    PhaseFeatures features = features_from_triplet(triplet, options);

    const int n = filters.n_scales;
    std::vector<ParameterTangent> tangents(2 * n);
    parallel_for(static_cast<std::size_t>(2 * n), [&](std::size_t p) {
        const int scale = static_cast<int>(p) % n;
        const RealField& kernel =
            (static_cast<int>(p) < n) ? filters.d_f0_star[scale] : filters.d_sigma_r_star[scale];
        ParameterTangent& out = tangents[p];
        if (features.flushed) {
            out.d_if = RealField(h, w, 0.0);
            out.d_r1 = RealField(h, w, 0.0);
            out.d_r2 = RealField(h, w, 0.0);
            out.d_phase_raw = RealField(h, w, 0.0);
            out.d_asym_raw = RealField(h, w, 0.0);
            return;
        }
        ComplexField dband(h, w);
        for (std::size_t i = 0; i < dband.size(); ++i) dband[i] = spectrum[i] * kernel[i];
        out.d_if = ifft2(dband);
        for (std::size_t i = 0; i < dband.size(); ++i) dband[i] *= (*filters.riesz_kernel)[i];
        const ComplexField d_odd = ifft2_complex(dband);
        out.d_r1 = RealField(h, w);
        out.d_r2 = RealField(h, w);
        for (std::size_t i = 0; i < d_odd.size(); ++i) {
            out.d_r1[i] = d_odd[i].real();
            out.d_r2[i] = d_odd[i].imag();
        }
        out.d_phase_raw = RealField(h, w);
        out.d_asym_raw = RealField(h, w);
        derive_feature_tangents(triplet, out, options.epsilon, out.d_phase_raw, out.d_asym_raw);
    });

    TangentBundle bundle(n, options.mode, std::move(tangents));
    bundle.set_ranges(features.phase_hi - features.phase_lo, features.asym_hi - features.asym_lo);
    return {std::move(features), std::move(bundle)};
}

std::vector<double> grad_of_scalar(const TangentBundle& bundle, const RealField* d_phase_channel,
                                   const RealField* d_asym_channel) {
    if (d_phase_channel && bundle.mode() == ChannelMode::Asym)
        throw InvalidShapeError("grad_of_scalar: phase gradient supplied but mode emits no phase channel");
    if (d_asym_channel && bundle.mode() == ChannelMode::Phase)
        throw InvalidShapeError("grad_of_scalar: asym gradient supplied but mode emits no asym channel");
    std::vector<double> grads(bundle.parameter_count(), 0.0);
    for (int p = 0; p < bundle.parameter_count(); ++p) {
        const ParameterTangent& t = bundle.tangent(p);
        double g = 0.0;
        if (d_phase_channel) {
            if (!d_phase_channel->same_shape(t.d_phase_raw))
                throw InvalidShapeError("grad_of_scalar: phase gradient shape mismatch");
            double acc = 0.0;
            for (std::size_t i = 0; i < t.d_phase_raw.size(); ++i)
                acc += (*d_phase_channel)[i] * t.d_phase_raw[i];
            g += acc * bundle.inv_phase_range();
        }
        if (d_asym_channel) {
            if (!d_asym_channel->same_shape(t.d_asym_raw))
                throw InvalidShapeError("grad_of_scalar: asym gradient shape mismatch");
            double acc = 0.0;
            for (std::size_t i = 0; i < t.d_asym_raw.size(); ++i)
                acc += (*d_asym_channel)[i] * t.d_asym_raw[i];
            g += acc * bundle.inv_asym_range();
        }
        grads[p] = g;
    }
    return grads;
}

double fd_oracle(const RealField& image, const FilterBank& bank, const ForwardOptions& options,
                 const std::function<double(const PhaseFeatures&)>& loss_fn, int param_index, double step) {
    if (!(step > 0.0)) throw InvalidInputError("fd_oracle: step must be positive");
    FilterBank shifted = bank;
    const double base = bank.parameter(param_index);
    shifted.set_parameter(param_index, base + step);
    const double plus = loss_fn(forward(image, shifted, options));
    shifted.set_parameter(param_index, base - step);
    const double minus = loss_fn(forward(image, shifted, options));
    return (plus - minus) / (2.0 * step);
}

std::function<double(const PhaseFeatures&)> mean_raw_phase_loss() {
    return [](const PhaseFeatures& f) { return field_mean(f.raw_phase); };
}

std::function<double(const PhaseFeatures&)> mean_raw_asym_loss() {
    return [](const PhaseFeatures& f) { return field_mean(f.raw_asym); };
}

std::function<double(const PhaseFeatures&)> frozen_channel_mean_loss(const PhaseFeatures& base,
                                                                     bool phase_channel) {
    const double lo = phase_channel ? base.phase_lo : base.asym_lo;
    const double hi = phase_channel ? base.phase_hi : base.asym_hi;
    const double range = hi - lo;
    return [lo, range, phase_channel](const PhaseFeatures& f) {
        if (range <= 1e-12) return 0.0;
        const RealField& raw = phase_channel ? f.raw_phase : f.raw_asym;
        return (field_mean(raw) - lo) / range;
    };
}

} // namespace mono2d
