#include "mono2d/filters.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace mono2d {

void LowPassSpec::validate() const {
    if (!(cutoff > 0.0 && cutoff <= 0.5))
        throw ConfigError("low-pass cutoff must be in (0, 0.5], got " + std::to_string(cutoff));
    if (order < 1) throw ConfigError("low-pass order must be >= 1, got " + std::to_string(order));
}

void LogGaborSpec::validate() const {
    if (!(f0 > 0.0)) throw ConfigError("log-Gabor f0 must be positive, got " + std::to_string(f0));
    if (!(sigma_r > 0.0 && sigma_r < 1.0))
        throw ConfigError("log-Gabor sigma_r must be in (0, 1), got " + std::to_string(sigma_r));
}

double butterworth_gain(double f, const LowPassSpec& spec) {
    return 1.0 / (1.0 + std::pow(f / spec.cutoff, 2.0 * spec.order));
}

double log_gabor_gain(double f, const LogGaborSpec& spec) {
    if (f <= 0.0) return 0.0;
    const double lr = std::log(f / spec.f0);
    const double ls = std::log(spec.sigma_r);
    return std::exp(-(lr * lr) / (2.0 * ls * ls));
}

LogGaborGainDerivatives log_gabor_gain_derivatives(double f, const LogGaborSpec& spec) {
    LogGaborGainDerivatives d;
    if (f <= 0.0) return d;
    const double lr = std::log(f / spec.f0);
    const double ls = std::log(spec.sigma_r);
    const double g = std::exp(-(lr * lr) / (2.0 * ls * ls));
    d.df0 = g * lr / (spec.f0 * ls * ls);
    d.dsigma_r = g * lr * lr / (spec.sigma_r * ls * ls * ls);
    return d;
}

RealField butterworth(const FrequencyGrid& grid, const LowPassSpec& spec) {
    spec.validate();
    RealField out(grid.height, grid.width);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = butterworth_gain(grid.f[i], spec);
    return out;
}

RealField log_gabor(const FrequencyGrid& grid, const LogGaborSpec& spec) {
    spec.validate();
    RealField out(grid.height, grid.width);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = log_gabor_gain(grid.f[i], spec);
    return out;
}

std::pair<RealField, RealField> log_gabor_derivatives(const FrequencyGrid& grid, const LogGaborSpec& spec) {
    spec.validate();
    RealField df0(grid.height, grid.width);
    RealField dsr(grid.height, grid.width);
    for (std::size_t i = 0; i < df0.size(); ++i) {
        const auto d = log_gabor_gain_derivatives(grid.f[i], spec);
        df0[i] = d.df0;
        dsr[i] = d.dsigma_r;
    }
    return {std::move(df0), std::move(dsr)};
}

ComplexField riesz(const FrequencyGrid& grid) {
    const int h = grid.height, w = grid.width;
    ComplexField out(h, w);
    for (int r = 0; r < h; ++r) {
        // A real odd filter needs K at the mirrored bin to equal -conj(K).
        // The Nyquist frequency of an even dimension is its own mirror, so
        // the component that lives on it must vanish (as at DC).
        const bool y_unpairable = (h - r) % h == r;
        for (int c = 0; c < w; ++c) {
            const bool x_unpairable = (w - c) % w == c;
            const double f = grid.f(r, c);
            const double fx = x_unpairable ? 0.0 : grid.fx(r, c);
            const double fy = y_unpairable ? 0.0 : grid.fy(r, c);
            out(r, c) = f == 0.0 ? std::complex<double>(0.0, 0.0)
                                 : std::complex<double>(-fy / f, fx / f);
        }
    }
    return out;
}

namespace {
std::mutex cache_mutex;
} // namespace

std::shared_ptr<const FrequencyGrid> cached_grid(int height, int width) {
    static std::map<std::pair<int, int>, std::shared_ptr<const FrequencyGrid>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto key = std::make_pair(height, width);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto grid = std::make_shared<FrequencyGrid>(make_grid(height, width));
    cache.emplace(key, grid);
    return grid;
}

std::shared_ptr<const RealField> cached_butterworth(int height, int width, const LowPassSpec& spec) {
    static std::map<std::tuple<int, int, double, int>, std::shared_ptr<const RealField>> cache;
    auto grid = cached_grid(height, width);
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto key = std::make_tuple(height, width, spec.cutoff, spec.order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto kernel = std::make_shared<const RealField>(butterworth(*grid, spec));
    cache.emplace(key, kernel);
    return kernel;
}

std::shared_ptr<const ComplexField> cached_riesz(int height, int width) {
    static std::map<std::pair<int, int>, std::shared_ptr<const ComplexField>> cache;
    auto grid = cached_grid(height, width);
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto key = std::make_pair(height, width);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto kernel = std::make_shared<const ComplexField>(riesz(*grid));
    cache.emplace(key, kernel);
    return kernel;
}

} // namespace mono2d
