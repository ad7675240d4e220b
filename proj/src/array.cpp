#include "coopradar/array.hpp"

#include <cmath>
#include <string>

namespace coopradar {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

} // namespace

ArrayGeometry::ArrayGeometry(int layers_p, int per_layer, double spacing_d, double wavelength)
    : layers_p_(layers_p), per_layer_(per_layer), spacing_d_(spacing_d), wavelength_(wavelength) {
    if (layers_p < 1) throw ValidationError("layer count must be >= 1");
    if (!is_power_of_two(per_layer)) throw ValidationError("elements per layer must be a power of two");
    if (!(spacing_d > 0.0) || !(wavelength > 0.0))
        throw ValidationError("spacing and wavelength must be positive");
    if (spacing_d > wavelength / 2.0 + 1e-15)
        throw PhaseAmbiguity("layer spacing d exceeds lambda/2 (d = " + std::to_string(spacing_d) +
                             ", lambda = " + std::to_string(wavelength) + ")");
    const double ring_gap = 2.0 * spacing_d * std::sin(kPi / per_layer);
    if (ring_gap > wavelength / 2.0 + 1e-15)
        throw PhaseAmbiguity("in-layer element gap 2 d sin(pi/2^b) = " + std::to_string(ring_gap) +
                             " exceeds lambda/2");
}

Eigen::Vector2d ArrayGeometry::element_position(int m, int n) const {
    if (m < 0 || m >= layers_p_) throw IndexOutOfRange("layer index out of range");
    if (m == 0) {
        if (n != 0) throw IndexOutOfRange("center layer has a single element");
        return Eigen::Vector2d::Zero();
    }
    if (n < 0 || n >= per_layer_) throw IndexOutOfRange("element index out of range");
    const double psi = n * (2.0 * kPi / per_layer_);
    const double radius = m * spacing_d_;
    return {std::cos(psi) * radius, std::sin(psi) * radius};
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, const Direction& dir) {
    const double st = std::sin(dir.theta);
    const Eigen::Vector2d v(std::cos(dir.phi) * st, std::sin(dir.phi) * st);
    const double k = 2.0 * kPi / geom.wavelength();

    Eigen::VectorXcd a(geom.size());
    a(0) = Complex(1.0, 0.0);
    int idx = 1;
    for (int m = 1; m < geom.layers(); ++m) {
        for (int n = 0; n < geom.per_layer(); ++n) {
            const double phase = -k * geom.element_position(m, n).dot(v);
            a(idx++) = std::polar(1.0, phase);
        }
    }
    return a;
}

Eigen::MatrixXcd steering_matrix(const ArrayGeometry& geom, const std::vector<Direction>& dirs) {
    if (dirs.empty()) throw EmptyDirections("steering matrix needs at least one direction");
    Eigen::MatrixXcd d(geom.size(), static_cast<Eigen::Index>(dirs.size()));
    for (Eigen::Index i = 0; i < d.cols(); ++i) d.col(i) = steering_vector(geom, dirs[i]);
    return d;
}

Eigen::VectorXcd array_response(const Eigen::VectorXcd& weights, const ArrayGeometry& geom,
                                const std::vector<Direction>& dirs) {
    if (weights.size() != geom.size())
        throw DimensionMismatch("weight vector length does not match element count");
    const Eigen::MatrixXcd d = steering_matrix(geom, dirs);
    return (weights.adjoint() * d).transpose();
}

} // namespace coopradar
