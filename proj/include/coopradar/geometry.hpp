#ifndef COOPRADAR_GEOMETRY_HPP
#define COOPRADAR_GEOMETRY_HPP

#include <cmath>
#include <numbers>

#include "coopradar/errors.hpp"

namespace coopradar {

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Spherical position: radial distance, pitch angle from +z, azimuth.
struct SphericalCoord {
    double r = 0.0;      // meters, >= 0
    double theta = 0.0;  // radians, [0, pi]
    double phi = 0.0;    // radians, normalized to [0, 2pi)
};

struct CartesianCoord {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Plane A x + B y + C z + E = 0 holding the cooperative sensing area.
/// tilt_theta_t is the tilt of the plane relative to horizontal; a flat
/// road (Model 1) is tilt_theta_t = 0.
struct CsaPlane {
    double a = 0.0;
    double b = 0.0;
    double c = 1.0;
    double e = 0.0;
    double tilt_theta_t = 0.0;

    /// Horizontal plane z = z0.
    static CsaPlane horizontal(double z0) { return CsaPlane{0.0, 0.0, 1.0, -z0, 0.0}; }

    /// Plane through (0, y0, z0) tilted by theta_t about the x axis.
    static CsaPlane tilted_about_x(double y0, double z0, double theta_t) {
        // normal = (0, -sin, cos)
        const double s = std::sin(theta_t);
        const double c = std::cos(theta_t);
        return CsaPlane{0.0, -s, c, s * y0 - c * z0, theta_t};
    }
};

/// A sensing beam: pointing direction and full beamwidths.
/// theta_r is measured from the downward vertical (nadir); a beam with
/// theta_r < pi/2 intersects the ground.
struct BeamSpec {
    double theta_r = 0.0;      // radians, [0, pi/2)
    double phi_r = 0.0;        // radians
    double delta_theta = 0.0;  // full pitch width, radians, (0, pi)
    double delta_phi = 0.0;    // full azimuth width, radians, (0, pi)
};

/// Elliptical footprint of one beam on the CSA plane.
struct SensingUnit {
    CartesianCoord center;
    double r_major = 0.0;      // meters
    double r_minor = 0.0;      // meters
    double orientation = 0.0;  // azimuth of major axis, radians

    double area() const { return kPi * r_major * r_minor; }
};

struct RsuSite {
    CartesianCoord position;  // array phase center
    double height_h = 0.0;    // meters above ground, equals position.z for flat ground
};

SphericalCoord make_spherical(double r, double theta, double phi);

CartesianCoord spherical_to_cartesian(const SphericalCoord& s);

/// Inverse transform; throws ZeroVector at the origin.
SphericalCoord cartesian_to_spherical(const CartesianCoord& c);

/// Footprint ellipse of a beam on the CSA plane, cylinder model.
/// r_major = R_t tan(dtheta/2)/cos(theta_r - theta_t), r_minor = R_t tan(dphi/2).
SensingUnit sensing_unit(const BeamSpec& beam, double range_r_t, const RsuSite& site,
                         const CsaPlane& plane);

/// Pitch width making the footprint circular for a given azimuth width:
/// dtheta = 2 atan(cos(theta_r - theta_t) tan(dphi/2)).
double solve_pitch_width(double theta_r, double delta_phi, double tilt_theta_t);

/// Azimuth width giving RSU i the same footprint radius as the reference:
/// R_i tan(dphi_i/2) = R_p tan(dphi_p/2).
double equalize_azimuth_width(double range_r_i, double range_r_p, double delta_phi_p);

enum class DetectionOutcome { Both, Only1, Only2 };

struct ResolutionPair {
    double r_a = 0.0;
    double r_b = 0.0;
};

struct ResolutionComparison {
    ResolutionPair before;
    ResolutionPair after;
};

/// Angular-resolution footprint sizes before and after beam registration,
/// keyed by which RSUs detected the target.
ResolutionComparison angular_resolution_cases(const SensingUnit& unit1, const SensingUnit& unit2,
                                              DetectionOutcome detection);

} // namespace coopradar

#endif
