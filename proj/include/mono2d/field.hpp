// Dense row-major 2D value containers used throughout the pipeline.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "mono2d/errors.hpp"

namespace mono2d {

namespace detail {
inline void check_dims(int height, int width) {
    if (height < 2 || width < 2) {
        throw InvalidShapeError("field dimensions must be at least 2x2, got " +
                                std::to_string(height) + "x" + std::to_string(width));
    }
}
} // namespace detail

template <typename T>
class Field {
public:
    Field() = default;
    Field(int height, int width, T fill = T{})
        : height_(height), width_(width), values_(static_cast<std::size_t>(height) * width, fill) {
        detail::check_dims(height, width);
    }

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    T operator()(int r, int c) const { return values_[static_cast<std::size_t>(r) * width_ + c]; }
    T& operator()(int r, int c) { return values_[static_cast<std::size_t>(r) * width_ + c]; }
    T operator[](std::size_t i) const { return values_[i]; }
    T& operator[](std::size_t i) { return values_[i]; }

    const std::vector<T>& values() const { return values_; }
    std::vector<T>& values() { return values_; }
    const T* data() const { return values_.data(); }
    T* data() { return values_.data(); }

    bool same_shape(int h, int w) const { return height_ == h && width_ == w; }
    template <typename U>
    bool same_shape(const Field<U>& other) const {
        return same_shape(other.height(), other.width());
    }

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<T> values_;
};

using RealField = Field<double>;
using ComplexField = Field<std::complex<double>>;

inline bool all_finite(const RealField& f) {
    for (double v : f.values())
        if (!std::isfinite(v)) return false;
    return true;
}

inline double max_abs(const RealField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs(const ComplexField& f) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(const RealField& a, const RealField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const ComplexField& a, const ComplexField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline std::pair<double, double> min_max(const RealField& f) {
    double lo = f[0], hi = f[0];
    for (double v : f.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

inline double field_sum(const RealField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s;
}

inline double field_mean(const RealField& f) { return field_sum(f) / static_cast<double>(f.size()); }

} // namespace mono2d
