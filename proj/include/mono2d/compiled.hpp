// Immutable per-(shape, bank) kernel snapshot. Built once per forward pass or
// optimizer step and shared read-only across batch workers.
#pragma once

#include <memory>
#include <vector>

#include "mono2d/params.hpp"

namespace mono2d {

struct CompiledFilters {
    int height = 0;
    int width = 0;
    int n_scales = 0;
    // Scale responses are summed before the phase equations, so the primal
    // pass needs only the summed bandpass kernel sum_i LPF * G_i.
    RealField sum_bandpass;
    std::shared_ptr<const ComplexField> riesz_kernel;
    // Per-parameter kernels LPF * dG_i/d(theta) * d(theta)/d(theta_star),
    // present only when built with derivatives.
    std::vector<RealField> d_f0_star;
    std::vector<RealField> d_sigma_r_star;
};

CompiledFilters compile_filters(int height, int width, const FilterBank& bank, const LowPassSpec& lpf,
                                bool with_derivatives);

} // namespace mono2d
