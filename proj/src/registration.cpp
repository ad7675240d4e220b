#include "coopradar/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace coopradar {

namespace {

constexpr long kMaxOverlapCells = 4000000;

struct PlaneFrame {
    CartesianCoord origin;
    double cos_t = 1.0;
    double sin_t = 0.0;

    explicit PlaneFrame(const CsaRect& csa)
        : origin(csa.center), cos_t(std::cos(csa.tilt_theta_t)),
          sin_t(std::sin(csa.tilt_theta_t)) {}

    CartesianCoord point(double u, double v) const {
        return CartesianCoord{origin.x + u, origin.y + v * cos_t, origin.z + v * sin_t};
    }

    std::pair<double, double> coords(const CartesianCoord& p) const {
        return {p.x - origin.x, (p.y - origin.y) * cos_t + (p.z - origin.z) * sin_t};
    }
};

struct Ray {
    double range = 0.0;
    double theta_r = 0.0;
    double phi_r = 0.0;
};

Ray rsu_to_target(const RsuSite& site, const CartesianCoord& target, double tilt) {
    const double dx = target.x - site.position.x;
    const double dy = target.y - site.position.y;
    const double dz = target.z - site.position.z;
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (r == 0.0) throw ValidationError("RSU is located at the target");
    if (dz >= 0.0) throw NoVisibility("target is not below the RSU");
    const double theta = std::acos(-dz / r);
    if (theta - tilt >= kPi / 2.0)
        throw NoVisibility("beam axis cannot intersect the sensing plane");
    return Ray{r, theta, std::atan2(dy, dx)};
}

bool inside_unit(const SensingUnit& unit, double x, double y) {
    const double c = std::cos(unit.orientation);
    const double s = std::sin(unit.orientation);
    const double dx = x - unit.center.x;
    const double dy = y - unit.center.y;
    const double a = (dx * c + dy * s) / unit.r_major;
    const double b = (-dx * s + dy * c) / unit.r_minor;
    return a * a + b * b <= 1.0;
}

BeamPlan plan_from_reference_width(const Scenario& scenario, const std::vector<Ray>& rays,
                                   int reference, double delta_phi_p) {
    const double tilt = scenario.csa.tilt_theta_t;
    const double r_p = rays[static_cast<std::size_t>(reference)].range;
    BeamPlan plan;
    plan.reference = reference;
    for (const Ray& ray : rays) {
        const double dphi = equalize_azimuth_width(ray.range, r_p, delta_phi_p);
        const double dtheta = solve_pitch_width(ray.theta_r, dphi, tilt);
        plan.entries.push_back(
            {ray.range, BeamSpec{ray.theta_r, ray.phi_r, dtheta, dphi}});
    }
    return plan;
}

std::pair<std::vector<Ray>, int> rays_and_reference(const Scenario& scenario) {
    validate(scenario);
    std::vector<Ray> rays;
    for (const RsuSite& site : scenario.rsus)
        rays.push_back(rsu_to_target(site, scenario.target, scenario.csa.tilt_theta_t));

    std::vector<int> order(rays.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ra = rays[static_cast<std::size_t>(a)].range;
        const double rb = rays[static_cast<std::size_t>(b)].range;
        return ra < rb || (ra == rb && a < b);
    });
    const std::size_t k = order.size();
    return {rays, order[(k + 1) / 2 - 1]};
}

/// Per-beam linear echo power using the planned widths and range.
double entry_power(const Scenario& scenario, const BeamPlanEntry& e) {
    LinkBudget link = scenario.link;
    link.range = e.range;
    link.g_r = receive_gain(rad2deg(e.beam.delta_theta), rad2deg(e.beam.delta_phi));
    link.unit_radius = e.range * std::tan(e.beam.delta_phi / 2.0);
    const double a = echo_amplitude(link);
    return a * a;
}

/// |w^H a|^2 of each RSU's synthesized beam at every cell of the CSA raster.
std::vector<std::vector<double>> realized_gains(const Scenario& scenario, const BeamPlan& plan,
                                                const PlaneFrame& frame, int nx, int ny,
                                                double u0, double v0, double cell) {
    const CovarianceMatrix cov = CovarianceMatrix::identity(scenario.array.size());
    std::vector<std::vector<double>> gains;
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
        const BeamPlanEntry& e = plan.entries[i];
        const Eigen::VectorXcd w = baba(e.beam, scenario.array, cov);
        const RsuSite& site = scenario.rsus[i];

        std::vector<Direction> dirs;
        dirs.reserve(static_cast<std::size_t>(nx) * ny);
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const CartesianCoord p = frame.point(u0 + (ix + 0.5) * cell,
                                                     v0 + (iy + 0.5) * cell);
                const double dx = p.x - site.position.x;
                const double dy = p.y - site.position.y;
                const double dz = p.z - site.position.z;
                const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                dirs.push_back(Direction{std::atan2(dy, dx), std::acos(-dz / r)});
            }
        const Eigen::VectorXd g = array_response(w, scenario.array, dirs).cwiseAbs2();
        gains.emplace_back(g.data(), g.data() + g.size());
    }
    return gains;
}

} // namespace

CsaPlane CsaRect::plane() const {
    return CsaPlane::tilted_about_x(center.y, center.z, tilt_theta_t);
}

void validate(const Scenario& scenario) {
    if (scenario.rsus.empty()) throw ValidationError("at least one RSU required");
    if (!(scenario.csa.width > 0.0 && scenario.csa.height > 0.0))
        throw ValidationError("csa side lengths must be positive");
    for (const RsuSite& site : scenario.rsus)
        if (!(site.height_h > 0.0)) throw ValidationError("height_h must be positive");

    const CsaPlane plane = scenario.csa.plane();
    const CartesianCoord& t = scenario.target;
    if (std::abs(plane.a * t.x + plane.b * t.y + plane.c * t.z + plane.e) > 1e-6)
        throw ValidationError("target does not lie on the CSA plane");
    const auto [u, v] = PlaneFrame(scenario.csa).coords(t);
    if (std::abs(u) > scenario.csa.width / 2.0 + 1e-9 ||
        std::abs(v) > scenario.csa.height / 2.0 + 1e-9)
        throw ValidationError("target lies outside the CSA rectangle");
}

BeamPlan plan_absra(const Scenario& scenario, double base_delta_phi) {
    if (!(base_delta_phi > 0.0 && base_delta_phi < kPi))
        throw ValidationError("base_delta_phi must lie in (0, pi)");
    const auto [rays, reference] = rays_and_reference(scenario);
    return plan_from_reference_width(scenario, rays, reference, base_delta_phi);
}

BeamPlan plan_absra_radius(const Scenario& scenario, double unit_radius) {
    if (!(unit_radius > 0.0)) throw ValidationError("unit_radius must be positive");
    const auto [rays, reference] = rays_and_reference(scenario);
    const double r_p = rays[static_cast<std::size_t>(reference)].range;
    return plan_from_reference_width(scenario, rays, reference,
                                     2.0 * std::atan(unit_radius / r_p));
}

std::vector<SensingUnit> plan_units(const Scenario& scenario, const BeamPlan& plan) {
    if (plan.entries.size() != scenario.rsus.size())
        throw DimensionMismatch("plan does not match the scenario RSU count");
    const CsaPlane plane = scenario.csa.plane();
    std::vector<SensingUnit> units;
    for (std::size_t i = 0; i < plan.entries.size(); ++i)
        units.push_back(sensing_unit(plan.entries[i].beam, plan.entries[i].range,
                                     scenario.rsus[i], plane));
    return units;
}

OverlapResult unit_overlap(const std::vector<SensingUnit>& units, double cell) {
    if (units.empty()) throw ValidationError("at least one sensing unit required");
    if (!(cell > 0.0)) throw ValidationError("cell size must be positive");

    OverlapResult out;
    double x_lo = -std::numeric_limits<double>::infinity();
    double x_hi = std::numeric_limits<double>::infinity();
    double y_lo = x_lo;
    double y_hi = x_hi;
    for (const SensingUnit& u : units) {
        out.areas.push_back(u.area());
        const double c = std::cos(u.orientation);
        const double s = std::sin(u.orientation);
        const double ex = std::hypot(u.r_major * c, u.r_minor * s);
        const double ey = std::hypot(u.r_major * s, u.r_minor * c);
        x_lo = std::max(x_lo, u.center.x - ex);
        x_hi = std::min(x_hi, u.center.x + ex);
        y_lo = std::max(y_lo, u.center.y - ey);
        y_hi = std::min(y_hi, u.center.y + ey);
    }
    const double sum_areas = std::accumulate(out.areas.begin(), out.areas.end(), 0.0);

    if (x_lo < x_hi && y_lo < y_hi) {
        const double span = std::max(x_hi - x_lo, y_hi - y_lo);
        const double c = std::max(cell, span / std::sqrt(static_cast<double>(kMaxOverlapCells)));
        const int nx = static_cast<int>(std::ceil((x_hi - x_lo) / c));
        const int ny = static_cast<int>(std::ceil((y_hi - y_lo) / c));
        long hits = 0;
        for (int iy = 0; iy < ny; ++iy) {
            const double y = y_lo + (iy + 0.5) * c;
            for (int ix = 0; ix < nx; ++ix) {
                const double x = x_lo + (ix + 0.5) * c;
                bool all = true;
                for (const SensingUnit& u : units)
                    if (!inside_unit(u, x, y)) {
                        all = false;
                        break;
                    }
                if (all) ++hits;
            }
        }
        out.common_area = static_cast<double>(hits) * c * c;
    }

    out.common_area = std::min(out.common_area, *std::min_element(out.areas.begin(),
                                                                  out.areas.end()));
    out.p_dfc = std::clamp(
        static_cast<double>(units.size()) * out.common_area / sum_areas, 0.0, 1.0);
    return out;
}

PowerMap power_map(const Scenario& scenario, const BeamPlan& plan, FootprintMode mode,
                   double cell) {
    if (!(cell > 0.0)) throw ValidationError("cell size must be positive");
    if (plan.entries.size() != scenario.rsus.size())
        throw DimensionMismatch("plan does not match the scenario RSU count");

    const PlaneFrame frame(scenario.csa);
    const double u0 = -scenario.csa.width / 2.0;
    const double v0 = -scenario.csa.height / 2.0;
    PowerMap map;
    map.cell = cell;
    map.nx = static_cast<int>(std::ceil(scenario.csa.width / cell));
    map.ny = static_cast<int>(std::ceil(scenario.csa.height / cell));
    map.x_min = scenario.csa.center.x + u0;
    map.y_min = scenario.csa.center.y + v0;
    map.power.assign(static_cast<std::size_t>(map.nx) * map.ny, 0.0);

    if (mode == FootprintMode::IdealEllipse) {
        const std::vector<SensingUnit> units = plan_units(scenario, plan);
        for (std::size_t i = 0; i < units.size(); ++i) {
            const double p = entry_power(scenario, plan.entries[i]);
            for (int iy = 0; iy < map.ny; ++iy)
                for (int ix = 0; ix < map.nx; ++ix) {
                    const CartesianCoord pt =
                        frame.point(u0 + (ix + 0.5) * cell, v0 + (iy + 0.5) * cell);
                    if (inside_unit(units[i], pt.x, pt.y)) map.at(ix, iy) += p;
                }
        }
        return map;
    }

    const auto gains =
        realized_gains(scenario, plan, frame, map.nx, map.ny, u0, v0, cell);
    for (std::size_t i = 0; i < gains.size(); ++i) {
        const double peak = *std::max_element(gains[i].begin(), gains[i].end());
        if (peak <= 0.0) throw AllZeroResponse("synthesized beam has no power on the CSA");
        const double p = entry_power(scenario, plan.entries[i]);
        for (std::size_t c = 0; c < gains[i].size(); ++c)
            map.power[c] += p * gains[i][c] / peak;
    }
    return map;
}

double p_dfc_realized(const Scenario& scenario, const BeamPlan& plan, FootprintMode mode,
                      double cell) {
    if (mode == FootprintMode::IdealEllipse)
        return unit_overlap(plan_units(scenario, plan), cell).p_dfc;
    if (!(cell > 0.0)) throw ValidationError("cell size must be positive");

    const PlaneFrame frame(scenario.csa);
    const double u0 = -scenario.csa.width / 2.0;
    const double v0 = -scenario.csa.height / 2.0;
    const int nx = static_cast<int>(std::ceil(scenario.csa.width / cell));
    const int ny = static_cast<int>(std::ceil(scenario.csa.height / cell));
    const auto gains = realized_gains(scenario, plan, frame, nx, ny, u0, v0, cell);

    const std::size_t cells = static_cast<std::size_t>(nx) * ny;
    std::vector<long> counts(gains.size(), 0);
    long common = 0;
    std::vector<double> peaks;
    for (const auto& g : gains) peaks.push_back(*std::max_element(g.begin(), g.end()));
    for (std::size_t c = 0; c < cells; ++c) {
        bool all = true;
        for (std::size_t i = 0; i < gains.size(); ++i) {
            const bool in = gains[i][c] >= peaks[i] / 2.0;  // half-power footprint
            if (in) ++counts[i];
            else all = false;
        }
        if (all) ++common;
    }
    double sum = 0.0;
    for (long n : counts) sum += static_cast<double>(n);
    if (sum == 0.0) throw InsufficientCoverage("no half-power footprint falls on the CSA");
    return std::clamp(static_cast<double>(gains.size()) * static_cast<double>(common) / sum,
                      0.0, 1.0);
}

RadiusSweep pd_vs_unit_radius(const Scenario& scenario, double p_f, double rho,
                              const std::vector<double>& r_s_grid) {
    if (r_s_grid.empty()) throw ValidationError("r_s grid must be non-empty");
    if (!(p_f > 0.0 && p_f < 1.0)) throw ValidationError("p_f must lie in (0, 1)");
    if (!(rho > 0.0 && rho <= 1.0)) throw ValidationError("rho must lie in (0, 1]");

    RadiusSweep sweep;
    double best = -1.0;
    for (double r_s : r_s_grid) {
        const BeamPlan plan = plan_absra_radius(scenario, r_s);
        FusionSignal fusion;
        for (const BeamPlanEntry& e : plan.entries) {
            LinkBudget link = scenario.link;
            link.range = e.range;
            link.g_r = receive_gain(rad2deg(e.beam.delta_theta), rad2deg(e.beam.delta_phi));
            link.unit_radius = r_s;
            link.echo_prob = rho;
            fusion.amplitudes.push_back(echo_amplitude(link));
        }
        const double p_d =
            roc_case1(fusion, scenario.noise, {p_f}).points.front().p_d;
        sweep.points.push_back({r_s, p_d});
        if (p_d > best) {
            best = p_d;
            sweep.argmax_r_s = r_s;
        }
    }
    return sweep;
}

} // namespace coopradar
