#include "coopradar/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace coopradar {

namespace {

double wrap_2pi(double phi) {
    double w = std::fmod(phi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w;
}

} // namespace

SphericalCoord make_spherical(double r, double theta, double phi) {
    if (!(r >= 0.0)) throw ValidationError("spherical radius must be >= 0");
    if (!(theta >= 0.0 && theta <= kPi)) throw ValidationError("pitch angle outside [0, pi]");
    return SphericalCoord{r, theta, wrap_2pi(phi)};
}

CartesianCoord spherical_to_cartesian(const SphericalCoord& s) {
    const double st = std::sin(s.theta);
    return CartesianCoord{s.r * st * std::cos(s.phi), s.r * st * std::sin(s.phi),
                          s.r * std::cos(s.theta)};
}

SphericalCoord cartesian_to_spherical(const CartesianCoord& c) {
    const double r = std::hypot(c.x, c.y, c.z);
    if (r == 0.0) throw ZeroVector("cannot convert the origin to spherical coordinates");
    const double theta = std::acos(std::clamp(c.z / r, -1.0, 1.0));
    double phi = (c.x == 0.0 && c.y == 0.0) ? 0.0 : std::atan2(c.y, c.x);
    return SphericalCoord{r, theta, wrap_2pi(phi)};
}

SensingUnit sensing_unit(const BeamSpec& beam, double range_r_t, const RsuSite& site,
                         const CsaPlane& plane) {
    if (!(range_r_t > 0.0)) throw ValidationError("range_r_t must be positive");
    if (!(beam.delta_theta > 0.0 && beam.delta_theta < kPi))
        throw ValidationError("delta_theta outside (0, pi)");
    if (!(beam.delta_phi > 0.0 && beam.delta_phi < kPi))
        throw ValidationError("delta_phi outside (0, pi)");

    const double incidence = beam.theta_r - plane.tilt_theta_t;
    const double ci = std::cos(incidence);
    if (incidence >= kPi / 2.0 || ci <= 0.0)
        throw NoIntersection("beam axis does not reach the CSA plane");

    // beam axis: unit vector pointing down-range from the site
    const double st = std::sin(beam.theta_r);
    const CartesianCoord dir{st * std::cos(beam.phi_r), st * std::sin(beam.phi_r),
                             -std::cos(beam.theta_r)};
    const double denom = plane.a * dir.x + plane.b * dir.y + plane.c * dir.z;
    if (std::abs(denom) < 1e-15) throw NoIntersection("beam axis parallel to the CSA plane");
    const double num =
        plane.a * site.position.x + plane.b * site.position.y + plane.c * site.position.z + plane.e;
    const double t = -num / denom;
    if (t <= 0.0) throw NoIntersection("beam axis points away from the CSA plane");

    SensingUnit unit;
    unit.center = CartesianCoord{site.position.x + t * dir.x, site.position.y + t * dir.y,
                                 site.position.z + t * dir.z};
    unit.r_major = range_r_t * std::tan(beam.delta_theta / 2.0) / ci;
    unit.r_minor = range_r_t * std::tan(beam.delta_phi / 2.0);
    unit.orientation = beam.phi_r;
    return unit;
}

double solve_pitch_width(double theta_r, double delta_phi, double tilt_theta_t) {
    if (!(delta_phi > 0.0 && delta_phi < kPi)) throw ValidationError("delta_phi outside (0, pi)");
    const double c = std::cos(theta_r - tilt_theta_t);
    if (c <= 0.0) throw DegenerateGeometry("beam at or beyond grazing, no circular footprint");
    return 2.0 * std::atan(c * std::tan(delta_phi / 2.0));
}

double equalize_azimuth_width(double range_r_i, double range_r_p, double delta_phi_p) {
    if (!(range_r_i > 0.0 && range_r_p > 0.0 && delta_phi_p > 0.0))
        throw ValidationError("ranges and reference width must be positive");
    return 2.0 * std::atan(range_r_p * std::tan(delta_phi_p / 2.0) / range_r_i);
}

ResolutionComparison angular_resolution_cases(const SensingUnit& unit1, const SensingUnit& unit2,
                                              DetectionOutcome detection) {
    const double ra1 = unit1.r_major, rb1 = unit1.r_minor;
    const double ra2 = unit2.r_major, rb2 = unit2.r_minor;
    if (!(rb1 >= ra2 && rb2 >= ra1))
        throw AssumptionViolated("ordering assumption r_b1 >= r_a2 and r_b2 >= r_a1 violated");

    ResolutionComparison out;
    out.after.r_a = std::max({ra1, ra2, rb1, rb2});
    out.after.r_b = out.after.r_a;
    switch (detection) {
        case DetectionOutcome::Both:
            out.before.r_a = std::min(ra1, rb2);
            out.before.r_b = std::min(ra2, rb1);
            break;
        case DetectionOutcome::Only1:
            out.before.r_a = std::max(rb1, ra2) - std::min(rb1, ra2);
            out.before.r_b = std::max(rb2, ra1) - std::min(rb2, ra1);
            break;
        case DetectionOutcome::Only2:
            out.before.r_a = std::max(rb2, ra1) - std::min(rb2, ra1);
            out.before.r_b = std::max(rb1, ra2) - std::min(rb1, ra2);
            break;
    }
    return out;
}

} // namespace coopradar
