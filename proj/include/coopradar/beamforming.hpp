#ifndef COOPRADAR_BEAMFORMING_HPP
#define COOPRADAR_BEAMFORMING_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "coopradar/array.hpp"
#include "coopradar/geometry.hpp"

namespace coopradar {

/// Hermitian positive-definite correlation matrix of the array snapshot.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(Eigen::MatrixXcd entries);

    static CovarianceMatrix identity(int n);

    /// Noise floor plus rank-one terms for interfering sources:
    /// R = noise_floor I + sum_k power_k a_k a_k^H.
    static CovarianceMatrix from_sources(const ArrayGeometry& geom,
                                         const std::vector<Direction>& dirs,
                                         const std::vector<double>& powers, double noise_floor);

    const Eigen::MatrixXcd& matrix() const { return entries_; }
    int size() const { return static_cast<int>(entries_.rows()); }

private:
    Eigen::MatrixXcd entries_;
};

/// LCMV weights w = R^-1 D (D^H R^-1 D)^-1 r_d.
/// Throws SingularSystem when D^H R^-1 D has condition number > 1e12.
Eigen::VectorXcd lcmv_weights(const Eigen::MatrixXcd& steering, const CovarianceMatrix& cov,
                              const Eigen::VectorXcd& desired_response);

/// Desired amplitude response over a direction grid: peak 1 at the beam
/// center, exactly 1/sqrt(2) on the half-power ellipse boundary.
Eigen::VectorXd desired_amplitude_response(const std::vector<Direction>& grid,
                                           const BeamSpec& beam);

struct IterativeLcmvResult {
    Eigen::VectorXcd weights;
    int iterations = 0;
    /// Largest relative residual of |D^H w| vs r_ad over all iterates.
    double max_constraint_residual = 0.0;
};

/// Two-step iterative LCMV: alternates the amplitude-constrained weight
/// solve with a phase update taken from the achieved response.
IterativeLcmvResult improved_lcmv(const Eigen::MatrixXcd& steering, const CovarianceMatrix& cov,
                                  const Eigen::VectorXd& r_ad, int i_max = 50, double tol = 1e-6);

struct AngleGrid {
    Direction center;
    double delta_phi = 0.0;
    double delta_theta = 0.0;
    std::vector<Direction> points;
};

/// n-point uniform lattice over the rectangle center +- widths/2, edges
/// included; n is factored into the most nearly square row x column split.
AngleGrid angle_grid(const BeamSpec& beam, int n);

struct BabaConfig {
    double beta = 1e-2;                 // ridge weight on ||w||^2
    double grid_step = 0.0;             // constraint lattice step; 0 = min(widths)/6
    double eval_grid_step = deg2rad(0.25);
    int max_constraint_points = 49;
    int phase_iterations = 10;
};

/// Beamwidth-adjustable synthesis: per-point narrow beams over the angle
/// lattice are ridge-combined to match the desired amplitude response over
/// an evaluation grid spanning twice the requested widths.
Eigen::VectorXcd baba(const BeamSpec& beam, const ArrayGeometry& geom, const CovarianceMatrix& cov,
                      const BabaConfig& cfg = {});

struct HbfFactors {
    Eigen::MatrixXcd baseband;  // N_s x N_RF
    Eigen::MatrixXcd rf;        // N_RF x N, unit-modulus entries
    int n_streams = 0;
    int n_rf_chains = 0;
    /// Frobenius residual against the power-normalized target.
    double residual = 0.0;
};

/// Alternating least squares with unit-modulus phase projection; the target
/// is normalized to ||.||_F = sqrt(N_s) so the power constraint holds.
HbfFactors hbf_factorize(const Eigen::VectorXcd& w_target, int n_rf, int iters = 30);

/// Regular (phi, theta) lattice for pattern evaluation.
struct PatternGrid {
    double phi_min = 0.0, phi_max = 0.0;
    double theta_min = 0.0, theta_max = 0.0;
    double step = deg2rad(0.25);

    /// Grid spanning `factor` times the beam widths around its center.
    static PatternGrid around(const BeamSpec& beam, double factor, double step);

    int n_phi() const;
    int n_theta() const;
    std::vector<Direction> directions() const;  // row-major, theta outer
};

struct BeamPattern {
    PatternGrid grid;
    Eigen::VectorXd gain_db;  // row-major over grid, max = 0 dB
};

BeamPattern beampattern(const Eigen::VectorXcd& weights, const ArrayGeometry& geom,
                        const PatternGrid& grid);

struct BeamwidthError {
    double e_b = 0.0;
    double error_area = 0.0;  // deg^2
    double beam_area = 0.0;   // deg^2
};

/// Ratio of the -3 dB mismatch area to the requested angular ellipse area.
BeamwidthError beamwidth_error(const BeamPattern& pattern, const BeamSpec& beam);

} // namespace coopradar

#endif
