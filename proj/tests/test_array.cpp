#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coopradar/array.hpp"

using namespace coopradar;

namespace {
const double kLambda = 0.0125;
}

TEST_CASE("element count follows 1 + (p-1) 2^b") {
    CHECK(ArrayGeometry(33, 32, kLambda / 2.0, kLambda).size() == 1025);
    CHECK(ArrayGeometry(1, 8, kLambda / 2.0, kLambda).size() == 1);
    CHECK(ArrayGeometry(9, 16, kLambda / 2.0, kLambda).size() == 129);
}

TEST_CASE("constructor rejects ambiguous spacings") {
    CHECK_THROWS_AS(ArrayGeometry(4, 8, kLambda, kLambda), PhaseAmbiguity);
    // few elements per layer -> large in-layer gap at the outer rings
    CHECK_THROWS_AS(ArrayGeometry(4, 2, kLambda / 2.0, kLambda), PhaseAmbiguity);
    CHECK_THROWS_AS(ArrayGeometry(4, 12, kLambda / 2.0, kLambda), ValidationError);
    CHECK_THROWS_AS(ArrayGeometry(0, 8, kLambda / 2.0, kLambda), ValidationError);
}

TEST_CASE("element positions sit on concentric rings") {
    const ArrayGeometry geom(5, 8, kLambda / 2.0, kLambda);
    CHECK(geom.element_position(0, 0).norm() == 0.0);
    for (int m = 1; m < 5; ++m)
        for (int n = 0; n < 8; ++n)
            CHECK(geom.element_position(m, n).norm() ==
                  doctest::Approx(m * kLambda / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(geom.element_position(0, 1), IndexOutOfRange);
    CHECK_THROWS_AS(geom.element_position(5, 0), IndexOutOfRange);
}

TEST_CASE("steering vector has unit-modulus entries, PFA first") {
    const ArrayGeometry geom(5, 8, kLambda / 2.0, kLambda);
    const Eigen::VectorXcd a = steering_vector(geom, Direction{deg2rad(60.0), deg2rad(45.0)});
    REQUIRE(a.size() == geom.size());
    CHECK(a(0) == Complex(1.0, 0.0));
    for (Eigen::Index i = 0; i < a.size(); ++i)
        CHECK(std::abs(a(i)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("broadside wave arrives in phase everywhere") {
    const ArrayGeometry geom(5, 8, kLambda / 2.0, kLambda);
    const Eigen::VectorXcd a = steering_vector(geom, Direction{0.7, 0.0});
    for (Eigen::Index i = 0; i < a.size(); ++i)
        CHECK(std::abs(a(i) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("matched filter peaks at the steered direction") {
    const ArrayGeometry geom(9, 16, kLambda / 2.0, kLambda);
    const Direction look{deg2rad(60.0), deg2rad(45.0)};
    const Eigen::VectorXcd w = steering_vector(geom, look) / geom.size();
    std::vector<Direction> dirs{look};
    for (double off : {5.0, 10.0, 20.0})
        dirs.push_back(Direction{look.phi + deg2rad(off), look.theta});
    const Eigen::VectorXd mag = array_response(w, geom, dirs).cwiseAbs();
    CHECK(mag(0) == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index i = 1; i < mag.size(); ++i) CHECK(mag(i) < mag(0));
}

TEST_CASE("response input validation") {
    const ArrayGeometry geom(3, 8, kLambda / 2.0, kLambda);
    CHECK_THROWS_AS(steering_matrix(geom, {}), EmptyDirections);
    CHECK_THROWS_AS(array_response(Eigen::VectorXcd::Ones(5), geom, {Direction{}}),
                    DimensionMismatch);
}
