#include <doctest.h>

#include <cmath>

#include "mono2d/spectral.hpp"
#include "test_util.hpp"

using namespace mono2d;
using testutil::random_field;

TEST_CASE("make_grid frequency mapping") {
    const FrequencyGrid g = make_grid(4, 4);
    CHECK(g.f(0, 0) == 0.0);
    CHECK(g.fx(0, 0) == 0.0);
    CHECK(g.fy(0, 0) == 0.0);
    // index (2,0): k=2, N=4 -> (2-4)/4 = -0.5
    CHECK(g.fy(2, 0) == -0.5);
    CHECK(g.fx(2, 0) == 0.0);
    CHECK(g.f(2, 0) == 0.5);
    // positive half: k=1 -> 0.25
    CHECK(g.fx(0, 1) == 0.25);
    CHECK(g.fy(1, 0) == 0.25);
}

TEST_CASE("make_grid 256x256 extreme attainable frequency") {
    const FrequencyGrid g = make_grid(256, 256);
    double max_fx = -1.0;
    for (int c = 0; c < 256; ++c) max_fx = std::max(max_fx, g.fx(0, c));
    CHECK(max_fx == 127.0 / 256.0);
    CHECK(max_fx == 0.49609375);
    // half-open interval: -0.5 occurs, +0.5 never does
    double min_fx = 1.0;
    for (int c = 0; c < 256; ++c) min_fx = std::min(min_fx, g.fx(0, c));
    CHECK(min_fx == -0.5);
}

TEST_CASE("make_grid bounds and DC uniqueness") {
    for (auto [h, w] : {std::pair{4, 4}, {5, 7}, {8, 3}}) {
        const FrequencyGrid g = make_grid(h, w);
        int zero_count = 0;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                CHECK(g.fx(r, c) >= -0.5);
                CHECK(g.fx(r, c) < 0.5);
                CHECK(g.fy(r, c) >= -0.5);
                CHECK(g.fy(r, c) < 0.5);
                if (g.f(r, c) == 0.0) ++zero_count;
            }
        CHECK(zero_count == 1);
        CHECK(g.f(0, 0) == 0.0);
    }
}

TEST_CASE("make_grid is a pure function of shape") {
    const FrequencyGrid a = make_grid(17, 9);
    const FrequencyGrid b = make_grid(17, 9);
    CHECK(a.fx.values() == b.fx.values());
    CHECK(a.fy.values() == b.fy.values());
    CHECK(a.f.values() == b.f.values());
}

TEST_CASE("make_grid rejects degenerate shapes") {
    CHECK_THROWS_AS(make_grid(1, 4), InvalidShapeError);
    CHECK_THROWS_AS(make_grid(4, 0), InvalidShapeError);
}

TEST_CASE("fft2 of a constant image is DC-only") {
    for (double c : {1.0, -2.5, 0.125}) {
        const RealField img(8, 8, c);
        const ComplexField spec = fft2(img);
        CHECK(std::abs(spec(0, 0) - std::complex<double>(64.0 * c, 0.0)) < 1e-12);
        double off_dc = 0.0;
        for (std::size_t i = 1; i < spec.size(); ++i) off_dc = std::max(off_dc, std::abs(spec[i]));
        CHECK(off_dc < 1e-12);
    }
}

TEST_CASE("fft2 of a unit impulse is flat") {
    RealField img(8, 8, 0.0);
    img(0, 0) = 1.0;
    const ComplexField spec = fft2(img);
    for (const auto& v : spec.values()) CHECK(std::abs(v - std::complex<double>(1.0, 0.0)) < 1e-12);
}

TEST_CASE("fft2 rejects non-finite input") {
    RealField img(4, 4, 0.0);
    img(2, 1) = std::nan("");
    CHECK_THROWS_AS(fft2(img), InvalidInputError);
    img(2, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(fft2(img), InvalidInputError);
}

TEST_CASE("fft2 matches the direct DFT oracle") {
    int seed = 0;
    for (auto [h, w] : {std::pair{16, 16}, {8, 16}, {16, 8}, {5, 7}, {12, 9}}) {
        const RealField img = random_field(h, w, 100 + seed++);
        CHECK(max_abs_diff(fft2(img), direct_dft2(img)) < 1e-10);
    }
}

TEST_CASE("ifft2 round trip") {
    for (auto [h, w] : {std::pair{16, 16}, {3, 5}, {17, 31}, {64, 100}}) {
        const RealField img = random_field(h, w, h * 1000 + w);
        CHECK(max_abs_diff(ifft2(fft2(img)), img) < 1e-10);
    }
}

TEST_CASE("ifft2 round trip at large and prime sizes") {
    for (auto [h, w] : {std::pair{257, 129}, {512, 512}}) {
        const RealField img = random_field(h, w, h + w);
        CHECK(max_abs_diff(ifft2(fft2(img)), img) < 1e-10);
    }
}

TEST_CASE("ifft2 of the zero spectrum is zero") {
    const ComplexField zero(6, 6);
    CHECK(max_abs(ifft2(zero)) == 0.0);
}

TEST_CASE("Hermitian cosine-grating spectrum inverts to a real grating") {
    // X(k0) = X(-k0)* = A*HW/2 gives cos(2*pi*k0*x/W) with amplitude A.
    const int h = 16, w = 16, k0 = 3;
    const double amp = 0.7;
    ComplexField spec(h, w);
    spec(0, k0) = std::complex<double>(amp * h * w / 2.0, 0.0);
    spec(0, w - k0) = std::complex<double>(amp * h * w / 2.0, 0.0);
    const ComplexField back = ifft2_complex(spec);
    double max_im = 0.0, max_re = 0.0;
    for (const auto& v : back.values()) {
        max_im = std::max(max_im, std::abs(v.imag()));
        max_re = std::max(max_re, std::abs(v.real()));
    }
    CHECK(max_im <= 1e-10 * max_re);
    for (int c = 0; c < w; ++c) {
        const double expect = amp * std::cos(2.0 * M_PI * k0 * c / w);
        CHECK(back(5, c).real() == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("fft2 linearity") {
    const RealField x = random_field(12, 10, 7);
    const RealField y = random_field(12, 10, 8);
    const double a = 1.7, b = -0.6;
    RealField combo(12, 10);
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * x[i] + b * y[i];
    const ComplexField lhs = fft2(combo);
    const ComplexField fx = fft2(x), fy = fft2(y);
    double err = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i)
        err = std::max(err, std::abs(lhs[i] - (a * fx[i] + b * fy[i])));
    CHECK(err < 1e-10);
}

TEST_CASE("direct_dft2 basics and size guard") {
    RealField impulse(4, 4, 0.0);
    impulse(0, 0) = 1.0;
    const ComplexField spec = direct_dft2(impulse);
    for (const auto& v : spec.values()) CHECK(std::abs(v - std::complex<double>(1.0, 0.0)) < 1e-12);

    const RealField flat(4, 4, 2.0);
    const ComplexField spec2 = direct_dft2(flat);
    CHECK(std::abs(spec2(0, 0) - std::complex<double>(32.0, 0.0)) < 1e-12);
    for (std::size_t i = 1; i < spec2.size(); ++i) CHECK(std::abs(spec2[i]) < 1e-12);

    const RealField rnd = random_field(8, 8, 3);
    CHECK(max_abs_diff(direct_dft2(rnd), fft2(rnd)) < 1e-10);

    CHECK_THROWS_AS(direct_dft2(RealField(65, 64, 0.0)), OracleSizeError);
}
