#include "mono2d/histogram.hpp"

#include <algorithm>
#include <cmath>

namespace mono2d {

std::vector<double> intensity_histogram(const std::vector<const RealField*>& images, int bins) {
    if (bins < 1) throw InvalidInputError("histogram needs at least one bin");
    if (images.empty()) throw InvalidInputError("histogram needs at least one image");
    std::vector<double> hist(bins, 0.0);
    std::size_t total = 0;
    for (const RealField* img : images) {
        for (double v : img->values()) {
            const double c = std::min(std::max(v, 0.0), 1.0);
            const int b = std::min(bins - 1, static_cast<int>(c * bins));
            hist[b] += 1.0;
        }
        total += img->size();
    }
    for (double& h : hist) h /= static_cast<double>(total);
    return hist;
}

double wasserstein1(const std::vector<double>& hist_a, const std::vector<double>& hist_b) {
    if (hist_a.size() != hist_b.size() || hist_a.empty())
        throw InvalidShapeError("wasserstein1: histograms must have the same nonzero bin count");
    const double bin_width = 1.0 / static_cast<double>(hist_a.size());
    double cdf_a = 0.0, cdf_b = 0.0, dist = 0.0;
    for (std::size_t i = 0; i < hist_a.size(); ++i) {
        cdf_a += hist_a[i];
        cdf_b += hist_b[i];
        dist += std::abs(cdf_a - cdf_b) * bin_width;
    }
    return dist;
}

} // namespace mono2d
