#include <doctest.h>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <vector>

#include "bandflow/bessel.hpp"
#include "bandflow/errors.hpp"

using namespace bandflow;

namespace {

// Power series in ~130 significant digits: enough headroom that the
// cancellation at z = 200 (terms near 1e86) still leaves double accuracy.
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<130>>;

struct BigPair {
    double j0, j1, y0, y1;
};

BigPair reference(double zd) {
    const Big z(zd);
    const Big q = z * z / 4;
    const Big pi = boost::math::constants::pi<Big>();
    const Big gamma = boost::math::constants::euler<Big>();
    const Big log_half_z = log(z / 2);

    Big t0 = 1;       // (-q)^k / (k!)^2
    Big t1 = z / 2;   // (z/2) (-q)^k / (k! (k+1)!)
    Big j0 = t0, j1 = t1;
    Big h = 0;        // H_k
    Big h1 = 1;       // H_{k+1}
    Big s0 = 0;       // sum (-1)^{k+1} H_k q^k/(k!)^2
    Big s1 = t1 * (-2 * gamma + h + h1);
    const Big eps = Big("1e-60");
    for (int k = 1; k < 2000; ++k) {
        t0 *= -q / (Big(k) * k);
        t1 *= -q / (Big(k) * (k + 1));
        h += Big(1) / k;
        h1 += Big(1) / (k + 1);
        j0 += t0;
        j1 += t1;
        s0 -= h * t0;
        s1 += t1 * (-2 * gamma + h + h1);
        if (k > zd && abs(t0) < eps && abs(t1) < eps) break;
    }
    const Big y0 = 2 / pi * ((log_half_z + gamma) * j0 + s0);
    const Big y1 = -2 / (pi * z) + 2 / pi * log_half_z * j1 - s1 / pi;
    return {static_cast<double>(j0), static_cast<double>(j1), static_cast<double>(y0), static_cast<double>(y1)};
}

std::vector<double> sample_points() {
    std::vector<double> z{1e-6, 1e-3, 0.1, 0.5, 1.0, 2.404825557695773, 3.0, 5.5, 7.9, 8.0, 8.1,
                          10.0, 11.99, 12.0, 12.01, 13.5, 20.0, 35.7, 50.0, 99.9, 150.0, 200.0};
    for (int i = 1; i <= 60; ++i) z.push_back(0.37 * i);
    return z;
}

} // namespace

TEST_CASE("values at the origin") {
    CHECK(bessel_j0(0.0) == 1.0);
    CHECK(bessel_j1(0.0) == 0.0);
    CHECK_THROWS_AS(bessel_y0(0.0), InputError);
    CHECK_THROWS_AS(bessel_y1(0.0), InputError);
    CHECK_THROWS_AS(bessel_j0(-1.0), InputError);
    CHECK_THROWS_AS(bessel_j0(std::nan("")), InputError);
}

TEST_CASE("first zero of J0") {
    CHECK(std::abs(bessel_j0(2.404825557695773)) < 1e-9);
}

TEST_CASE("agreement with a high-precision series") {
    for (double z : sample_points()) {
        const BigPair ref = reference(z);
        INFO("z = " << z);
        CHECK(std::abs(bessel_j0(z) - ref.j0) < 1e-10);
        CHECK(std::abs(bessel_j1(z) - ref.j1) < 1e-10);
        // Y0, Y1 diverge at the origin; there the contract is relative.
        CHECK(std::abs(bessel_y0(z) - ref.y0) < 1e-10 * std::max(1.0, std::abs(ref.y0)));
        CHECK(std::abs(bessel_y1(z) - ref.y1) < 1e-10 * std::max(1.0, std::abs(ref.y1)));
    }
}

TEST_CASE("agreement with the standard library") {
    for (double z = 0.05; z <= 200.0; z += 0.731) {
        INFO("z = " << z);
        CHECK(std::abs(bessel_j0(z) - std::cyl_bessel_j(0.0, z)) < 1e-10);
        CHECK(std::abs(bessel_j1(z) - std::cyl_bessel_j(1.0, z)) < 1e-10);
        CHECK(std::abs(bessel_y0(z) - std::cyl_neumann(0.0, z)) < 1e-10 * std::max(1.0, std::abs(bessel_y0(z))));
        CHECK(std::abs(bessel_y1(z) - std::cyl_neumann(1.0, z)) < 1e-10 * std::max(1.0, std::abs(bessel_y1(z))));
    }
}

TEST_CASE("Wronskian J1 Y0 - J0 Y1 = 2 / (pi z)") {
    for (double z = 0.2; z < 200.0; z *= 1.3) {
        const double w = bessel_j1(z) * bessel_y0(z) - bessel_j0(z) * bessel_y1(z);
        CHECK(w * z * 3.141592653589793 / 2.0 == doctest::Approx(1.0).epsilon(1e-9));
    }
}
