// Analytic gradients of the layer outputs with respect to the 2n unbounded
// trainable parameters, computed as forward-mode tangent fields. One tangent
// per parameter; the min-max rescale statistics are treated as constants
// (stop-gradient), so the channel tangent is the raw tangent scaled by
// 1/(max - min).
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "mono2d/monogenic.hpp"

namespace mono2d {

struct ParameterTangent {
    RealField d_if;
    RealField d_r1;
    RealField d_r2;
    RealField d_phase_raw;
    RealField d_asym_raw;
};

class TangentBundle {
public:
    TangentBundle() = default;
    TangentBundle(int n_scales, ChannelMode mode, std::vector<ParameterTangent> tangents)
        : n_scales_(n_scales), mode_(mode), tangents_(std::move(tangents)) {}

    int n_scales() const { return n_scales_; }
    int parameter_count() const { return static_cast<int>(tangents_.size()); }
    ChannelMode mode() const { return mode_; }
    const ParameterTangent& tangent(int param_index) const { return tangents_[param_index]; }

    // Rescale factors applied to raw tangents when contracting against
    // channel-space gradients. Degenerate ranges give a zero factor.
    void set_ranges(double phase_range, double asym_range);
    double inv_phase_range() const { return inv_phase_range_; }
    double inv_asym_range() const { return inv_asym_range_; }

private:
    int n_scales_ = 0;
    ChannelMode mode_ = ChannelMode::Both;
    std::vector<ParameterTangent> tangents_;
    double inv_phase_range_ = 0.0;
    double inv_asym_range_ = 0.0;
};

// Forward pass plus one tangent per parameter, ordered
// (f0_star[0..n), sigma_r_star[0..n)).
std::pair<PhaseFeatures, TangentBundle> forward_with_tangents(const RealField& image, const FilterBank& bank,
                                                              const ForwardOptions& options);

// Same, against a precompiled kernel snapshot (must have been built with
// derivatives); lets a batch share one compilation.
std::pair<PhaseFeatures, TangentBundle> forward_with_tangents(const ComplexField& spectrum,
                                                              const CompiledFilters& filters,
                                                              const ForwardOptions& options);

// Contracts channel-space downstream gradients against the bundle:
// g[p] = sum_pixels downstream * dchannel/dp. Pass nullptr for a channel the
// mode does not emit.
std::vector<double> grad_of_scalar(const TangentBundle& bundle, const RealField* d_phase_channel,
                                   const RealField* d_asym_channel);

// Central finite difference of an arbitrary scalar loss over one unbounded
// parameter, with full forward recomputation at the shifted points.
double fd_oracle(const RealField& image, const FilterBank& bank, const ForwardOptions& options,
                 const std::function<double(const PhaseFeatures&)>& loss_fn, int param_index, double step);

// Mean of a pre-rescale field; a smooth loss for oracle checks.
std::function<double(const PhaseFeatures&)> mean_raw_phase_loss();
std::function<double(const PhaseFeatures&)> mean_raw_asym_loss();

// Mean of a rescaled channel with the min-max statistics frozen at the base
// features, matching the stop-gradient semantics of the analytic path.
std::function<double(const PhaseFeatures&)> frozen_channel_mean_loss(const PhaseFeatures& base,
                                                                     bool phase_channel);

} // namespace mono2d
