#ifndef COOPRADAR_DETECTION_HPP
#define COOPRADAR_DETECTION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coopradar/errors.hpp"

namespace coopradar {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);

/// Radar-equation inputs for one RSU. Amplitudes use a 1-ohm convention:
/// power in watts equals amplitude squared.
struct LinkBudget {
    double pt_gt = 0.1;          // P_t * g_t, watts
    double g_p = 263026.799;     // processing gain, linear (54.2 dB)
    double g_r = 1.0;            // receive beam gain, linear
    double wavelength = 0.0125;  // meters
    double unit_radius = 4.0;    // r_s, meters
    double echo_prob = 0.1;      // rho
    double range = 100.0;        // R_t, meters
};

/// Echo amplitude A = sqrt(P_t g_t g_r g_p lambda^2 sigma / ((4 pi)^3 R^4)),
/// sigma = pi r_s^2 rho.
double echo_amplitude(const LinkBudget& link);

/// Receive beam gain approximation g_r = 26000 / (dtheta_deg * dphi_deg).
double receive_gain(double delta_theta_deg, double delta_phi_deg);

struct NoiseClutterParams {
    double sigma_n = 1.0;  // Gaussian noise std (volts), P_n = sigma_n^2
    double sigma_i = 0.0;  // Rayleigh clutter scale (volts), P_I = 2 sigma_i^2

    static NoiseClutterParams from_powers(double noise_watts, double clutter_watts);

    /// sigma_n from thermal noise k T_abs B times the noise figure.
    static NoiseClutterParams thermal(double t_abs, double bandwidth_hz, double noise_figure,
                                      double clutter_watts);

    double noise_power() const { return sigma_n * sigma_n; }
    double clutter_power() const { return 2.0 * sigma_i * sigma_i; }
};

struct FusionSignal {
    std::vector<double> amplitudes;  // per-RSU A_i, volts
    double p_dfc = 1.0;

    /// Effective fused mean P_dfc * sum A_i.
    double mean() const;
};

enum class RocMethod { Numeric, Case1, Case2, MonteCarlo };

std::string to_string(RocMethod m);

struct RocPoint {
    double threshold = 0.0;
    double p_f = 0.0;
    double p_d = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    RocMethod method = RocMethod::Numeric;
};

/// Standard Gaussian tail Q(x) = P(Z > x).
double q_function(double x);

/// Inverse of q_function on (0, 1).
double q_inverse(double p);

/// 200 thresholds spanning [max(0, mu - 6 s), mu + 6 s] with
/// s = sqrt(sigma_n^2 + 2 sigma_i^2).
std::vector<double> default_thresholds(const FusionSignal& fusion, const NoiseClutterParams& nc,
                                       int n = 200);

/// Exceedance probabilities of y = mean[H1] + n + I by quadrature over the
/// clutter amplitude; absolute error <= 1e-6 per point.
RocCurve roc_numeric(const FusionSignal& fusion, const NoiseClutterParams& nc,
                     const std::vector<double>& thresholds);

/// Clutter-free closed form: p_d = Q(Q^-1(p_f) - mean/sigma_n).
RocCurve roc_case1(const FusionSignal& fusion, const NoiseClutterParams& nc,
                   const std::vector<double>& p_f_grid);

/// Noise-free closed form: p_d = exp(-(eta - mean)^2 / (2 sigma_i^2)) for
/// eta = sigma_i sqrt(-2 ln p_f) above the mean, else 1.
RocCurve roc_case2(const FusionSignal& fusion, const NoiseClutterParams& nc,
                   const std::vector<double>& p_f_grid);

/// Empirical exceedance rates; deterministic for a fixed seed.
RocCurve roc_monte_carlo(const FusionSignal& fusion, const NoiseClutterParams& nc,
                         const std::vector<double>& thresholds, std::int64_t trials,
                         std::uint64_t seed);

} // namespace coopradar

#endif
