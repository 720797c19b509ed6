// The forward pass: bandpass + Riesz filtering in the frequency domain,
// summed over scales, followed by local phase and phase asymmetry and a
// per-channel min-max rescale to [0,1].
#pragma once

#include "mono2d/compiled.hpp"

namespace mono2d {

enum class ChannelMode { Phase, Asym, Both };

// Per-scale-summed even (I_f) and odd (R1, R2) responses.
struct MonogenicTriplet {
    RealField i_f;
    RealField r1;
    RealField r2;
};

struct ForwardOptions {
    LowPassSpec lpf;
    ChannelMode mode = ChannelMode::Both;
    double epsilon = 1e-12;
};

struct PhaseFeatures {
    ChannelMode mode = ChannelMode::Both;
    // Pre-rescale fields; these carry the contrast/intensity invariance.
    RealField raw_phase;
    RealField raw_asym;
    // Rescaled output channels; a channel not requested by mode stays empty.
    RealField phase;
    RealField asym;
    // Min-max statistics consumed by the rescale (stop-gradient in training).
    double phase_lo = 0.0, phase_hi = 0.0;
    double asym_lo = 0.0, asym_hi = 0.0;
    // True when the triplet was all-zero (constant input) and the raw fields
    // were flushed to zero.
    bool flushed = false;
    bool has_phase() const { return mode != ChannelMode::Asym; }
    bool has_asym() const { return mode != ChannelMode::Phase; }
};

MonogenicTriplet monogenic_triplet(const RealField& image, const FilterBank& bank, const LowPassSpec& lpf);
MonogenicTriplet monogenic_triplet(const ComplexField& spectrum, const CompiledFilters& filters);

// phase = atan2(I_f, sqrt(R1^2 + R2^2)), range (-pi/2, pi/2]. epsilon only
// stabilizes gradients elsewhere; the value path does not use it.
RealField local_phase(const MonogenicTriplet& triplet, double epsilon);

// asym = max(sqrt(R1^2+R2^2) - |I_f|, 0) / (sqrt(I_f^2+R1^2+R2^2) + epsilon),
// range [0, 1).
RealField phase_asymmetry(const MonogenicTriplet& triplet, double epsilon);

// (x - min)/(max - min); all-zero when max - min <= 1e-12.
RealField minmax_rescale(const RealField& field);

// Rescale with externally supplied statistics (per-batch mode).
RealField rescale_with_stats(const RealField& field, double lo, double hi);

PhaseFeatures forward(const RealField& image, const FilterBank& bank, const ForwardOptions& options);
PhaseFeatures forward(const ComplexField& spectrum, const CompiledFilters& filters, const ForwardOptions& options);
PhaseFeatures features_from_triplet(const MonogenicTriplet& triplet, const ForwardOptions& options);

// A triplet is treated as all-zero (constant input) when every component is
// below this magnitude; features and tangents flush to zero there.
inline constexpr double kTripletFlushThreshold = 1e-12;

} // namespace mono2d
