#ifndef COOPRADAR_ARRAY_HPP
#define COOPRADAR_ARRAY_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "coopradar/errors.hpp"
#include "coopradar/geometry.hpp"

namespace coopradar {

using Complex = std::complex<double>;

/// Steering direction (azimuth, pitch) in radians.
struct Direction {
    double phi = 0.0;
    double theta = 0.0;
};

/// Concentric circular array: the central phase reference antenna (PFA)
/// plus layers 1..p-1 of 2^b elements each, layer spacing d.
class ArrayGeometry {
public:
    /// Validates the phase-ambiguity conditions d <= lambda/2 and
    /// 2 d sin(pi/2^b) <= lambda/2.
    ArrayGeometry(int layers_p, int per_layer, double spacing_d, double wavelength);

    int layers() const { return layers_p_; }
    int per_layer() const { return per_layer_; }
    double spacing() const { return spacing_d_; }
    double wavelength() const { return wavelength_; }

    /// Total element count N = 1 + (p-1)*2^b.
    int size() const { return 1 + (layers_p_ - 1) * per_layer_; }

    /// Planar position of element (layer m, index n) relative to the PFA.
    Eigen::Vector2d element_position(int m, int n) const;

private:
    int layers_p_;
    int per_layer_;
    double spacing_d_;
    double wavelength_;
};

/// Per-element phases for a plane wave from `dir`; entry 0 (the PFA) is 1.
/// Ordering is PFA first, then layer-major, element-minor.
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, const Direction& dir);

/// One steering-vector column per direction.
Eigen::MatrixXcd steering_matrix(const ArrayGeometry& geom, const std::vector<Direction>& dirs);

/// Directional response r = w^H D, one complex value per direction.
Eigen::VectorXcd array_response(const Eigen::VectorXcd& weights, const ArrayGeometry& geom,
                                const std::vector<Direction>& dirs);

} // namespace coopradar

#endif
