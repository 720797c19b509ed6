// Trainable filter parameters. The optimizer only ever sees unbounded values;
// the bounded center frequency and bandwidth are derived views that stay
// strictly inside their valid ranges for any finite unbounded input.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mono2d/filters.hpp"
#include "mono2d/kvtext.hpp"

namespace mono2d {

// Numerically stable logistic; never overflows, output clamped to the open
// interval (0, 1) in floating point.
double stable_sigmoid(double x);

// f0 = f0_min + sigmoid(f0_star) * (f0_max - f0_min), strictly inside
// (f0_min, f0_max).
double bound_f0(double f0_star, double f0_min, double f0_max);

// sigma_r = sigmoid(sigma_r_star), strictly inside (0, 1).
double bound_sigma_r(double sigma_r_star);

struct BoundGradients {
    double df0_df0_star = 0.0;
    double dsigma_r_dsigma_r_star = 0.0;
};

// Chain factors d(bounded)/d(unbounded) at the given unbounded values.
BoundGradients bound_gradients(double f0_star, double sigma_r_star, double f0_min, double f0_max);

// n scales of unbounded trainable parameters plus the frequency bounds they
// map into. Bounded values are recomputed on access, never stored.
class FilterBank {
public:
    FilterBank() = default;

    // f0_star[i] ~ N(0,1), sigma_r_star[i] ~ N(0, 0.05); f0_min = 1/max(H,W),
    // f0_max = 0.5. Deterministic given the seed.
    static FilterBank init(int n_scales, int height, int width, std::uint64_t seed);

    int n_scales() const { return static_cast<int>(f0_star_.size()); }
    double f0_min() const { return f0_min_; }
    double f0_max() const { return f0_max_; }

    double f0_star(int i) const { return f0_star_[i]; }
    double sigma_r_star(int i) const { return sigma_r_star_[i]; }
    void set_f0_star(int i, double v) { f0_star_[i] = v; }
    void set_sigma_r_star(int i, double v) { sigma_r_star_[i] = v; }

    double f0(int i) const { return bound_f0(f0_star_[i], f0_min_, f0_max_); }
    double sigma_r(int i) const { return bound_sigma_r(sigma_r_star_[i]); }
    LogGaborSpec spec(int i) const { return LogGaborSpec{f0(i), sigma_r(i)}; }
    BoundGradients chain(int i) const {
        return bound_gradients(f0_star_[i], sigma_r_star_[i], f0_min_, f0_max_);
    }

    // Flat parameter vector ordered (f0_star[0..n), sigma_r_star[0..n)).
    int parameter_count() const { return 2 * n_scales(); }
    double parameter(int index) const;
    void set_parameter(int index, double value);

    void save(std::ostream& out, const std::string& prefix = "bank.") const;
    static FilterBank load(std::istream& in, const std::string& prefix = "bank.");
    static FilterBank from_kv(const kvtext::Map& kv, const std::string& prefix = "bank.");

    bool operator==(const FilterBank& other) const = default;

private:
    std::vector<double> f0_star_;
    std::vector<double> sigma_r_star_;
    double f0_min_ = 0.0;
    double f0_max_ = 0.5;
};

} // namespace mono2d
