#include "coopradar/detection.hpp"

#include "coopradar/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace coopradar {

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double watts_to_dbm(double watts) {
    if (!(watts > 0.0)) throw ValidationError("power must be positive to express in dBm");
    return 10.0 * std::log10(watts / 1e-3);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double echo_amplitude(const LinkBudget& link) {
    if (!(link.pt_gt > 0.0 && link.g_p > 0.0 && link.g_r > 0.0 && link.wavelength > 0.0 &&
          link.unit_radius > 0.0 && link.range > 0.0))
        throw ValidationError("link budget fields must be positive");
    if (!(link.echo_prob >= 0.0 && link.echo_prob <= 1.0))
        throw ValidationError("echo_prob must lie in [0, 1]");
    const double cross_section = kPi * link.unit_radius * link.unit_radius * link.echo_prob;
    const double four_pi = 4.0 * kPi;
    const double r2 = link.range * link.range;
    return std::sqrt(link.pt_gt * link.g_r * link.g_p * link.wavelength * link.wavelength *
                     cross_section / (four_pi * four_pi * four_pi * r2 * r2));
}

double receive_gain(double delta_theta_deg, double delta_phi_deg) {
    if (!(delta_theta_deg > 0.0 && delta_phi_deg > 0.0))
        throw ValidationError("beam widths must be positive");
    return 26000.0 / (delta_theta_deg * delta_phi_deg);
}

NoiseClutterParams NoiseClutterParams::from_powers(double noise_watts, double clutter_watts) {
    if (!(noise_watts > 0.0)) throw ValidationError("noise power must be positive");
    if (clutter_watts < 0.0) throw ValidationError("clutter power must be non-negative");
    return NoiseClutterParams{std::sqrt(noise_watts), std::sqrt(clutter_watts / 2.0)};
}

NoiseClutterParams NoiseClutterParams::thermal(double t_abs, double bandwidth_hz,
                                               double noise_figure, double clutter_watts) {
    if (!(t_abs > 0.0 && bandwidth_hz > 0.0 && noise_figure >= 1.0))
        throw ValidationError("thermal parameters must be positive (noise figure >= 1)");
    return from_powers(kBoltzmann * t_abs * bandwidth_hz * noise_figure, clutter_watts);
}

double FusionSignal::mean() const {
    for (double a : amplitudes)
        if (a < 0.0) throw ValidationError("amplitudes must be non-negative");
    if (!(p_dfc >= 0.0 && p_dfc <= 1.0)) throw ValidationError("p_dfc must lie in [0, 1]");
    return p_dfc * std::accumulate(amplitudes.begin(), amplitudes.end(), 0.0);
}

std::string to_string(RocMethod m) {
    switch (m) {
        case RocMethod::Numeric: return "numeric";
        case RocMethod::Case1: return "case1";
        case RocMethod::Case2: return "case2";
        case RocMethod::MonteCarlo: return "monte_carlo";
    }
    return "unknown";
}

double q_function(double x) {
    if (!std::isfinite(x)) throw ValidationError("q_function requires finite input");
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double q_inverse(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("q_inverse requires p in (0, 1)");
    return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

std::vector<double> default_thresholds(const FusionSignal& fusion, const NoiseClutterParams& nc,
                                       int n) {
    if (n < 2) throw ValidationError("at least two thresholds required");
    const double mu = fusion.mean();
    const double s = std::sqrt(nc.sigma_n * nc.sigma_n + 2.0 * nc.sigma_i * nc.sigma_i);
    const double lo = std::max(0.0, mu - 6.0 * s);
    const double hi = mu + 6.0 * s;
    std::vector<double> eta(n);
    for (int i = 0; i < n; ++i) eta[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return eta;
}

namespace {

void check_nc(const NoiseClutterParams& nc) {
    if (!(nc.sigma_n > 0.0) && !(nc.sigma_i > 0.0))
        throw ValidationError("at least one of sigma_n, sigma_i must be positive");
    if (nc.sigma_n < 0.0 || nc.sigma_i < 0.0)
        throw ValidationError("noise scales must be non-negative");
}

void check_ascending(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw ValidationError(std::string(what) + " must be non-empty");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[i - 1]) throw ValidationError(std::string(what) + " must be ascending");
}

/// P(mu + n + I > eta) with n ~ Normal(0, sigma_n^2), I ~ Rayleigh(sigma_i).
double exceedance(double eta, double mu, const NoiseClutterParams& nc) {
    const double d = eta - mu;
    if (nc.sigma_i == 0.0) return q_function(d / nc.sigma_n);
    if (nc.sigma_n == 0.0)
        return d <= 0.0 ? 1.0 : std::exp(-d * d / (2.0 * nc.sigma_i * nc.sigma_i));

    const double s2 = nc.sigma_i * nc.sigma_i;
    const double tail = 8.0 * nc.sigma_i;
    // The Q factor transitions from ~0 to ~1 in a band of width ~sigma_n
    // around r = d; outside a z0-sigma band it is within q(z0) of a constant,
    // so only the band needs quadrature.  For r above the band Q ~ 1 and the
    // Rayleigh mass is closed-form; for r below it the contribution is
    // bounded by q(z0) and charged to the error budget.
    const double z0 = 8.0;
    double lo = std::clamp(d - z0 * nc.sigma_n, 0.0, tail);
    double hi = std::clamp(d + z0 * nc.sigma_n, 0.0, tail);
    if (hi > lo) {
        // a clipped band much narrower than the clutter scale inflates the
        // Kronrod error estimate through roundoff, so widen it to >= sigma_i
        hi = std::clamp(std::max(hi, lo + nc.sigma_i), 0.0, tail);
        lo = std::clamp(std::min(lo, hi - nc.sigma_i), 0.0, tail);
    }
    double value = std::exp(-hi * hi / (2.0 * s2)) - std::exp(-tail * tail / (2.0 * s2));
    double err = 2.0 * q_function(z0);
    if (hi > lo) {
        const auto integrand = [&](double r) {
            return r / s2 * std::exp(-r * r / (2.0 * s2)) * q_function((d - r) / nc.sigma_n);
        };
        double seg_err = 0.0;
        value += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            integrand, lo, hi, 15, 1e-7, &seg_err);
        err += seg_err;
    }
    if (!(err <= 1e-6)) throw QuadratureFailure("clutter quadrature did not reach 1e-6");
    // mass beyond the truncation always exceeds eta - mu only if d < tail;
    // bound it by the Rayleigh tail itself
    const double tail_mass = std::exp(-tail * tail / (2.0 * s2));
    return std::min(1.0, value + tail_mass * q_function((d - tail) / nc.sigma_n));
}

} // namespace

RocCurve roc_numeric(const FusionSignal& fusion, const NoiseClutterParams& nc,
                     const std::vector<double>& thresholds) {
    check_nc(nc);
    check_ascending(thresholds, "thresholds");
    const double mu = fusion.mean();
    RocCurve curve;
    curve.method = RocMethod::Numeric;
    for (double eta : thresholds)
        curve.points.push_back({eta, exceedance(eta, 0.0, nc), exceedance(eta, mu, nc)});
    return curve;
}

RocCurve roc_case1(const FusionSignal& fusion, const NoiseClutterParams& nc,
                   const std::vector<double>& p_f_grid) {
    check_nc(nc);
    if (!(nc.sigma_n > 0.0)) throw ValidationError("case 1 requires sigma_n > 0");
    const double mu = fusion.mean();
    RocCurve curve;
    curve.method = RocMethod::Case1;
    for (double pf : p_f_grid) {
        if (!(pf > 0.0 && pf < 1.0)) throw ValidationError("p_f grid must lie in (0, 1)");
        const double eta = nc.sigma_n * q_inverse(pf);
        curve.points.push_back({eta, pf, q_function((eta - mu) / nc.sigma_n)});
    }
    return curve;
}

RocCurve roc_case2(const FusionSignal& fusion, const NoiseClutterParams& nc,
                   const std::vector<double>& p_f_grid) {
    check_nc(nc);
    if (!(nc.sigma_i > 0.0)) throw ValidationError("case 2 requires sigma_i > 0");
    const double mu = fusion.mean();
    const double s2 = nc.sigma_i * nc.sigma_i;
    RocCurve curve;
    curve.method = RocMethod::Case2;
    for (double pf : p_f_grid) {
        if (!(pf > 0.0 && pf < 1.0)) throw ValidationError("p_f grid must lie in (0, 1)");
        const double eta = nc.sigma_i * std::sqrt(-2.0 * std::log(pf));
        const double pd =
            eta <= mu ? 1.0 : std::exp(-(eta - mu) * (eta - mu) / (2.0 * s2));
        curve.points.push_back({eta, pf, pd});
    }
    return curve;
}

RocCurve roc_monte_carlo(const FusionSignal& fusion, const NoiseClutterParams& nc,
                         const std::vector<double>& thresholds, std::int64_t trials,
                         std::uint64_t seed) {
    check_nc(nc);
    check_ascending(thresholds, "thresholds");
    if (trials < 10000) throw ValidationError("at least 10^4 trials required");
    const double mu = fusion.mean();

    std::mt19937_64 rng(seed);
    const auto uniform = [&] {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    };

    std::vector<double> h0;
    h0.reserve(static_cast<std::size_t>(trials));
    std::vector<double> h1;
    h1.reserve(static_cast<std::size_t>(trials));
    for (std::int64_t t = 0; t < trials; ++t) {
        // Box-Muller for the Gaussian term, inverse CDF for the Rayleigh term
        const double u1 = uniform();
        const double u2 = uniform();
        const double n = nc.sigma_n * std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * kPi * u2);
        const double clutter = nc.sigma_i * std::sqrt(-2.0 * std::log(uniform()));
        h0.push_back(n + clutter);
        h1.push_back(mu + n + clutter);
    }
    std::sort(h0.begin(), h0.end());
    std::sort(h1.begin(), h1.end());

    const auto rate = [&](const std::vector<double>& s, double eta) {
        const auto it = std::upper_bound(s.begin(), s.end(), eta);
        return static_cast<double>(s.end() - it) / static_cast<double>(trials);
    };

    RocCurve curve;
    curve.method = RocMethod::MonteCarlo;
    for (double eta : thresholds) curve.points.push_back({eta, rate(h0, eta), rate(h1, eta)});
    return curve;
}

} // namespace coopradar
