#ifndef COOPRADAR_REGISTRATION_HPP
#define COOPRADAR_REGISTRATION_HPP

#include <vector>

#include "coopradar/array.hpp"
#include "coopradar/beamforming.hpp"
#include "coopradar/detection.hpp"
#include "coopradar/geometry.hpp"

namespace coopradar {

/// Target-centered square (or rectangular) cooperative sensing area lying
/// in a plane tilted by tilt_theta_t about the x axis.
struct CsaRect {
    CartesianCoord center;
    double width = 20.0;   // along x, meters
    double height = 20.0;  // along the in-plane y direction, meters
    double tilt_theta_t = 0.0;

    CsaPlane plane() const;
};

struct Scenario {
    std::vector<RsuSite> rsus;
    CsaRect csa;
    CartesianCoord target;
    ArrayGeometry array{33, 32, 0.00625, 0.0125};
    LinkBudget link;               // per-RSU range and g_r are filled per plan
    NoiseClutterParams noise{};
};

/// Throws ValidationError when a structural invariant fails.
void validate(const Scenario& scenario);

struct BeamPlanEntry {
    double range = 0.0;  // R_t,i, meters
    BeamSpec beam;
};

struct BeamPlan {
    std::vector<BeamPlanEntry> entries;  // one per RSU, input order
    int reference = 0;                   // index into entries
};

/// AB-SRA planning: per-RSU ranges/directions, middle-range reference,
/// azimuth widths equalized against the reference and pitch widths chosen
/// for circular footprints.
BeamPlan plan_absra(const Scenario& scenario, double base_delta_phi);

/// Same, with the reference azimuth width chosen so every footprint has
/// radius unit_radius meters.
BeamPlan plan_absra_radius(const Scenario& scenario, double unit_radius);

/// Footprints of a plan on the CSA plane.
std::vector<SensingUnit> plan_units(const Scenario& scenario, const BeamPlan& plan);

struct OverlapResult {
    std::vector<double> areas;   // S_i, m^2 (analytic ellipse areas)
    double common_area = 0.0;    // S_o, m^2 (rasterized)
    double p_dfc = 0.0;          // N S_o / sum S_i
};

/// Rasterized intersection of all footprints, 5 cm cells by default; the
/// cell size is coarsened automatically when the bounding box is large.
OverlapResult unit_overlap(const std::vector<SensingUnit>& units, double cell = 0.05);

enum class FootprintMode { IdealEllipse, RealizedPattern };

/// Power raster over the CSA after noncoherent accumulation. Cell (ix, iy)
/// covers x in [x_min + ix*cell, ..+cell), y likewise; values are linear
/// watts at the cell center.
struct PowerMap {
    double x_min = 0.0;
    double y_min = 0.0;
    double cell = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> power;  // row-major, y outer

    double& at(int ix, int iy) { return power[static_cast<std::size_t>(iy) * nx + ix]; }
    double at(int ix, int iy) const { return power[static_cast<std::size_t>(iy) * nx + ix]; }
};

PowerMap power_map(const Scenario& scenario, const BeamPlan& plan, FootprintMode mode,
                   double cell);

/// Matching degree using the planned footprints (IdealEllipse) or the -3 dB
/// footprints of the synthesized beams on the CSA (RealizedPattern).
double p_dfc_realized(const Scenario& scenario, const BeamPlan& plan, FootprintMode mode,
                      double cell = 0.05);

struct RadiusSweepPoint {
    double r_s = 0.0;
    double p_d = 0.0;
};

struct RadiusSweep {
    std::vector<RadiusSweepPoint> points;
    double argmax_r_s = 0.0;
};

/// p_d at fixed p_f versus unit radius, widths and gains recomputed from a
/// registered plan per radius; clutter-free closed form.
RadiusSweep pd_vs_unit_radius(const Scenario& scenario, double p_f, double rho,
                              const std::vector<double>& r_s_grid);

} // namespace coopradar

#endif
