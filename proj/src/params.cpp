#include "mono2d/params.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "mono2d/kvtext.hpp"

namespace mono2d {

double stable_sigmoid(double x) {
    double s;
    if (x >= 0.0) {
        const double e = std::exp(-x);
        s = 1.0 / (1.0 + e);
    } else {
        const double e = std::exp(x);
        s = e / (1.0 + e);
    }
    // Keep the output strictly inside (0, 1) even where exp underflows.
    const double hi = std::nextafter(1.0, 0.0);
    const double lo = std::numeric_limits<double>::min();
    return std::min(std::max(s, lo), hi);
}

double bound_f0(double f0_star, double f0_min, double f0_max) {
    const double f0 = f0_min + stable_sigmoid(f0_star) * (f0_max - f0_min);
    // Rounding at extreme arguments can land on a bound; nudge back inside.
    const double lo = std::nextafter(f0_min, f0_max);
    const double hi = std::nextafter(f0_max, f0_min);
    return std::min(std::max(f0, lo), hi);
}

double bound_sigma_r(double sigma_r_star) { return stable_sigmoid(sigma_r_star); }

BoundGradients bound_gradients(double f0_star, double sigma_r_star, double f0_min, double f0_max) {
    BoundGradients g;
    const double s = stable_sigmoid(f0_star);
    g.df0_df0_star = s * (1.0 - s) * (f0_max - f0_min);
    const double t = stable_sigmoid(sigma_r_star);
    g.dsigma_r_dsigma_r_star = t * (1.0 - t);
    return g;
}

FilterBank FilterBank::init(int n_scales, int height, int width, std::uint64_t seed) {
    if (n_scales < 1) throw ConfigError("n_scales must be >= 1, got " + std::to_string(n_scales));
    detail::check_dims(height, width);
    FilterBank bank;
    bank.f0_min_ = 1.0 / std::max(height, width);
    bank.f0_max_ = 0.5;
    bank.f0_star_.resize(n_scales);
    bank.sigma_r_star_.resize(n_scales);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> std_normal(0.0, 1.0);
    std::normal_distribution<double> narrow(0.0, 0.05);
    for (int i = 0; i < n_scales; ++i) bank.f0_star_[i] = std_normal(rng);
    for (int i = 0; i < n_scales; ++i) bank.sigma_r_star_[i] = narrow(rng);
    return bank;
}

double FilterBank::parameter(int index) const {
    const int n = n_scales();
    return index < n ? f0_star_[index] : sigma_r_star_[index - n];
}

void FilterBank::set_parameter(int index, double value) {
    const int n = n_scales();
    if (index < n)
        f0_star_[index] = value;
    else
        sigma_r_star_[index - n] = value;
}

void FilterBank::save(std::ostream& out, const std::string& prefix) const {
    using kvtext::format_double;
    out << prefix << "n_scales " << n_scales() << "\n";
    out << prefix << "f0_min " << format_double(f0_min_) << "\n";
    out << prefix << "f0_max " << format_double(f0_max_) << "\n";
    for (int i = 0; i < n_scales(); ++i)
        out << prefix << "f0_star." << i << " " << format_double(f0_star_[i]) << "\n";
    for (int i = 0; i < n_scales(); ++i)
        out << prefix << "sigma_r_star." << i << " " << format_double(sigma_r_star_[i]) << "\n";
}

FilterBank FilterBank::load(std::istream& in, const std::string& prefix) {
    return from_kv(kvtext::parse(in), prefix);
}

FilterBank FilterBank::from_kv(const kvtext::Map& kv, const std::string& prefix) {
    FilterBank bank;
    const long n = kvtext::require_long(kv, prefix + "n_scales");
    if (n < 1) throw CheckpointError("checkpoint has invalid n_scales");
    bank.f0_min_ = kvtext::require_double(kv, prefix + "f0_min");
    bank.f0_max_ = kvtext::require_double(kv, prefix + "f0_max");
    if (!(bank.f0_min_ > 0.0 && bank.f0_min_ < bank.f0_max_ && bank.f0_max_ <= 0.5))
        throw CheckpointError("checkpoint has inconsistent frequency bounds");
    bank.f0_star_.resize(n);
    bank.sigma_r_star_.resize(n);
    for (long i = 0; i < n; ++i) {
        bank.f0_star_[i] = kvtext::require_double(kv, prefix + "f0_star." + std::to_string(i));
        bank.sigma_r_star_[i] = kvtext::require_double(kv, prefix + "sigma_r_star." + std::to_string(i));
    }
    return bank;
}

} // namespace mono2d
