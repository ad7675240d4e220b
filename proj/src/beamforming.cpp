#include "coopradar/beamforming.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

namespace coopradar {

namespace {

constexpr double kCondLimit = 1e12;
const double kHalfPowerDb = 20.0 * std::log10(1.0 / std::sqrt(2.0));

/// Solves G x = rhs where G = D^H R^-1 D, rejecting ill-conditioned systems.
struct LcmvSolver {
    Eigen::MatrixXcd r_inv_d;                 // R^-1 D
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd;   // of D^H R^-1 D

    LcmvSolver(const Eigen::MatrixXcd& steering, const CovarianceMatrix& cov) {
        if (steering.rows() != cov.size())
            throw DimensionMismatch("steering matrix rows do not match covariance size");
        Eigen::LLT<Eigen::MatrixXcd> llt(cov.matrix());
        if (llt.info() != Eigen::Success)
            throw SingularSystem("covariance matrix is not positive definite");
        r_inv_d = llt.solve(steering);
        const Eigen::MatrixXcd gram = steering.adjoint() * r_inv_d;
        svd.compute(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > kCondLimit)
            throw SingularSystem("D^H R^-1 D is numerically singular");
    }

    Eigen::VectorXcd weights(const Eigen::VectorXcd& r_d) const {
        return r_inv_d * svd.solve(r_d);
    }
};

Eigen::VectorXcd unit_phases(const Eigen::VectorXcd& v) {
    Eigen::VectorXcd p(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double m = std::abs(v(i));
        p(i) = m > 0.0 ? v(i) / m : Complex(1.0, 0.0);
    }
    return p;
}

/// Closest-to-square factor pair of n, smaller first.
std::pair<int, int> square_factors(int n) {
    int a = static_cast<int>(std::sqrt(static_cast<double>(n)));
    while (a > 1 && n % a != 0) --a;
    return {a, n / a};
}

std::vector<double> lattice_axis(double center, double width, int count) {
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = center;
        return v;
    }
    for (int i = 0; i < count; ++i)
        v[i] = center - width / 2.0 + width * static_cast<double>(i) / (count - 1);
    return v;
}

} // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) throw DimensionMismatch("covariance must be square");
    if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw ValidationError("covariance matrix is not Hermitian within 1e-10");
    entries_ = (entries_ + entries_.adjoint()) / 2.0;
    Eigen::LLT<Eigen::MatrixXcd> llt(entries_);
    if (llt.info() != Eigen::Success)
        throw ValidationError("covariance matrix is not positive definite");
}

CovarianceMatrix CovarianceMatrix::identity(int n) {
    return CovarianceMatrix(Eigen::MatrixXcd::Identity(n, n));
}

CovarianceMatrix CovarianceMatrix::from_sources(const ArrayGeometry& geom,
                                                const std::vector<Direction>& dirs,
                                                const std::vector<double>& powers,
                                                double noise_floor) {
    if (dirs.size() != powers.size())
        throw DimensionMismatch("one power per interference direction required");
    if (!(noise_floor > 0.0)) throw ValidationError("noise floor must be positive");
    Eigen::MatrixXcd r =
        noise_floor * Eigen::MatrixXcd::Identity(geom.size(), geom.size());
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        const Eigen::VectorXcd a = steering_vector(geom, dirs[k]);
        r += powers[k] * (a * a.adjoint());
    }
    return CovarianceMatrix(std::move(r));
}

Eigen::VectorXcd lcmv_weights(const Eigen::MatrixXcd& steering, const CovarianceMatrix& cov,
                              const Eigen::VectorXcd& desired_response) {
    if (steering.cols() != desired_response.size())
        throw DimensionMismatch("one desired response per constraint direction required");
    return LcmvSolver(steering, cov).weights(desired_response);
}

Eigen::VectorXd desired_amplitude_response(const std::vector<Direction>& grid,
                                           const BeamSpec& beam) {
    if (!(beam.delta_theta > 0.0 && beam.delta_phi > 0.0))
        throw ValidationError("beam widths must be positive");
    const double c = 2.0 * std::sqrt(2.0) - 1.0;
    Eigen::VectorXd r(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double kt = (grid[i].theta - beam.theta_r) / (beam.delta_theta / 2.0);
        const double kp = (grid[i].phi - beam.phi_r) / (beam.delta_phi / 2.0);
        const double k = kt * kt + kp * kp;
        r(static_cast<Eigen::Index>(i)) = 2.0 / (1.0 + std::pow(c, k));
    }
    return r;
}

IterativeLcmvResult improved_lcmv(const Eigen::MatrixXcd& steering, const CovarianceMatrix& cov,
                                  const Eigen::VectorXd& r_ad, int i_max, double tol) {
    if (steering.cols() != r_ad.size())
        throw DimensionMismatch("one desired amplitude per constraint direction required");
    if ((r_ad.array() <= 0.0).any())
        throw ValidationError("desired amplitudes must be strictly positive");

    const LcmvSolver solver(steering, cov);
    const double scale = r_ad.cwiseAbs().maxCoeff();

    IterativeLcmvResult out;
    out.weights = solver.weights(r_ad.cast<Complex>());
    auto note_residual = [&](const Eigen::VectorXcd& w) {
        const Eigen::VectorXd achieved = (steering.adjoint() * w).cwiseAbs();
        out.max_constraint_residual = std::max(
            out.max_constraint_residual, (achieved - r_ad).cwiseAbs().maxCoeff() / scale);
    };
    note_residual(out.weights);

    for (int i = 1; i <= i_max; ++i) {
        const Eigen::VectorXcd r_pd = unit_phases(steering.adjoint() * out.weights);
        const Eigen::VectorXcd w_next =
            solver.weights(r_ad.cast<Complex>().cwiseProduct(r_pd));
        if (!w_next.allFinite()) throw NonFinite("iterate contains NaN or Inf");
        note_residual(w_next);
        const double change = (w_next - out.weights).norm() /
                              std::max(out.weights.norm(), 1e-300);
        out.weights = w_next;
        out.iterations = i;
        if (change < tol) break;
    }
    return out;
}

AngleGrid angle_grid(const BeamSpec& beam, int n) {
    if (n < 1) throw ValidationError("angle grid needs at least one point");
    auto [small, large] = square_factors(n);
    const int n_phi = beam.delta_phi >= beam.delta_theta ? large : small;
    const int n_theta = n / n_phi;

    AngleGrid grid;
    grid.center = Direction{beam.phi_r, beam.theta_r};
    grid.delta_phi = beam.delta_phi;
    grid.delta_theta = beam.delta_theta;
    const auto thetas = lattice_axis(beam.theta_r, beam.delta_theta, n_theta);
    const auto phis = lattice_axis(beam.phi_r, beam.delta_phi, n_phi);
    for (double t : thetas)
        for (double p : phis) grid.points.push_back(Direction{p, t});
    return grid;
}

PatternGrid PatternGrid::around(const BeamSpec& beam, double factor, double step) {
    PatternGrid g;
    g.phi_min = beam.phi_r - factor * beam.delta_phi / 2.0;
    g.phi_max = beam.phi_r + factor * beam.delta_phi / 2.0;
    g.theta_min = beam.theta_r - factor * beam.delta_theta / 2.0;
    g.theta_max = beam.theta_r + factor * beam.delta_theta / 2.0;
    g.step = step;
    return g;
}

int PatternGrid::n_phi() const {
    return static_cast<int>(std::floor((phi_max - phi_min) / step + 1e-9)) + 1;
}

int PatternGrid::n_theta() const {
    return static_cast<int>(std::floor((theta_max - theta_min) / step + 1e-9)) + 1;
}

std::vector<Direction> PatternGrid::directions() const {
    std::vector<Direction> dirs;
    dirs.reserve(static_cast<std::size_t>(n_phi()) * n_theta());
    for (int ti = 0; ti < n_theta(); ++ti)
        for (int pi = 0; pi < n_phi(); ++pi)
            dirs.push_back(Direction{phi_min + pi * step, theta_min + ti * step});
    return dirs;
}

Eigen::VectorXcd baba(const BeamSpec& beam, const ArrayGeometry& geom, const CovarianceMatrix& cov,
                      const BabaConfig& cfg) {
    if (!(beam.delta_theta > 0.0 && beam.delta_phi > 0.0))
        throw ValidationError("beam widths must be positive");
    if (!(cfg.beta >= 0.0)) throw ValidationError("beta must be >= 0");

    const double step = cfg.grid_step > 0.0
                            ? cfg.grid_step
                            : std::min(beam.delta_theta, beam.delta_phi) / 6.0;
    int c_phi = std::max(1, static_cast<int>(std::floor(beam.delta_phi / step + 1e-9)) + 1);
    int c_theta = std::max(1, static_cast<int>(std::floor(beam.delta_theta / step + 1e-9)) + 1);
    while (c_phi * c_theta > cfg.max_constraint_points) {
        if (c_phi >= c_theta && c_phi > 1)
            --c_phi;
        else
            --c_theta;
    }

    // constraint lattice and its per-point narrow beams (Alg. 1, single constraint)
    std::vector<Direction> lattice;
    for (double t : lattice_axis(beam.theta_r, beam.delta_theta, c_theta))
        for (double p : lattice_axis(beam.phi_r, beam.delta_phi, c_phi))
            lattice.push_back(Direction{p, t});
    const int n = static_cast<int>(lattice.size());

    Eigen::MatrixXcd w_cols(geom.size(), n);
    for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXcd a = steering_vector(geom, lattice[i]);
        Eigen::VectorXd one(1);
        one << 1.0;
        w_cols.col(i) = improved_lcmv(a, cov, one, 1).weights;
    }

    const PatternGrid eval = PatternGrid::around(beam, 2.0, cfg.eval_grid_step);
    std::vector<Direction> eval_dirs = eval.directions();
    const std::size_t n_fine = eval_dirs.size();

    // Coarse stopband samples well outside the beam window: without them the
    // least-squares combination is unconstrained there and can park large
    // sidelobes.  The extent covers several beam widths and several array
    // resolution widths, whichever is larger.
    const double res =
        geom.wavelength() / (2.0 * (geom.layers() - 1) * geom.spacing());
    const double half_phi =
        std::min(deg2rad(60.0), std::max(4.0 * beam.delta_phi, 4.0 * res));
    const double half_theta =
        std::min(deg2rad(60.0), std::max(4.0 * beam.delta_theta, 4.0 * res));
    const double stop_step = std::max(res / 4.0, std::max(half_phi, half_theta) / 32.0);
    const double theta_lo = std::max(1e-3, beam.theta_r - half_theta);
    const double theta_hi = std::min(kPi - 1e-3, beam.theta_r + half_theta);
    for (double t = theta_lo; t <= theta_hi + 1e-12; t += stop_step)
        for (double p = beam.phi_r - half_phi; p <= beam.phi_r + half_phi + 1e-12;
             p += stop_step) {
            if (std::abs(p - beam.phi_r) <= beam.delta_phi &&
                std::abs(t - beam.theta_r) <= beam.delta_theta)
                continue;  // the fine window already covers this area
            eval_dirs.push_back(Direction{p, t});
        }

    const Eigen::MatrixXcd d_eval = steering_matrix(geom, eval_dirs);
    Eigen::VectorXd r_ad = desired_amplitude_response(eval_dirs, beam);
    // density compensation so coarse rows carry their share of the fit
    Eigen::VectorXd row_w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(eval_dirs.size()));
    row_w.tail(row_w.size() - static_cast<Eigen::Index>(n_fine)).setConstant(
        stop_step / cfg.eval_grid_step);

    Eigen::MatrixXcd g = d_eval.adjoint() * w_cols;       // responses of the columns
    g = row_w.cast<Complex>().asDiagonal() * g;
    r_ad = row_w.cwiseProduct(r_ad);
    const Eigen::MatrixXcd ww = w_cols.adjoint() * w_cols;
    const Eigen::MatrixXcd normal = g.adjoint() * g + cfg.beta * ww;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(normal, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (cfg.beta == 0.0) {
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > kCondLimit)
            throw SingularSystem("unregularized normal matrix is rank deficient");
    }

    // amplitude fit with phase relaxation: refit against r_ad carrying the
    // phases the previous solution achieved
    Eigen::VectorXcd target = r_ad.cast<Complex>();
    Eigen::VectorXcd best_f;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int it = 0; it < std::max(1, cfg.phase_iterations); ++it) {
        const Eigen::VectorXcd f = svd.solve(g.adjoint() * target);
        const Eigen::VectorXcd resp = g * f;
        const double obj = (resp.cwiseAbs() - r_ad).squaredNorm() +
                           cfg.beta * (w_cols * f).squaredNorm();
        if (obj < best_obj) {
            best_obj = obj;
            best_f = f;
        }
        target = r_ad.cast<Complex>().cwiseProduct(unit_phases(resp));
    }
    return w_cols * best_f;
}

HbfFactors hbf_factorize(const Eigen::VectorXcd& w_target, int n_rf, int iters) {
    if (n_rf < 1) throw ValidationError("n_rf must be >= 1");
    const int n = static_cast<int>(w_target.size());
    const int n_s = 1;
    Eigen::MatrixXcd t = w_target.adjoint();  // 1 x N
    const double tnorm = t.norm();
    if (tnorm == 0.0) throw ValidationError("target weights are all zero");
    t *= std::sqrt(static_cast<double>(n_s)) / tnorm;

    auto dft_rows = [&](int rows) {
        Eigen::MatrixXcd m(rows, n);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < n; ++c)
                m(r, c) = std::polar(1.0, -2.0 * kPi * r * c / n);
        return m;
    };
    auto phase_init = [&](int rows, unsigned seed) {
        Eigen::MatrixXcd m = dft_rows(rows);
        m.row(0) = unit_phases(t.row(0).transpose()).transpose();
        if (seed != 0) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
            for (int r = 1; r < rows; ++r)
                for (int c = 0; c < n; ++c) m(r, c) = std::polar(1.0, u(rng));
        }
        return m;
    };

    HbfFactors best;
    best.n_streams = n_s;
    best.n_rf_chains = n_rf;
    best.residual = std::numeric_limits<double>::infinity();

    const double ridge = 1e-12;
    // grow the RF stage one chain at a time: seeding size k with the padded
    // size k-1 optimum makes the residual non-increasing in n_rf
    for (int k = 1; k <= n_rf; ++k) {
        std::vector<Eigen::MatrixXcd> inits{dft_rows(k), phase_init(k, 0)};
        inits.push_back(phase_init(k, 12345));
        inits.push_back(phase_init(k, 67890));
        if (k > 1) {
            Eigen::MatrixXcd padded(k, n);
            padded.topRows(k - 1) = best.rf;
            padded.row(k - 1) = dft_rows(k).row(k - 1);
            inits.push_back(padded);
        }

        HbfFactors best_k;
        best_k.residual = std::numeric_limits<double>::infinity();
        for (Eigen::MatrixXcd w_bf : inits) {
            Eigen::MatrixXcd w_bb;
            for (int it = 0; it < iters; ++it) {
                // optimal baseband stage for the current RF phases
                const Eigen::MatrixXcd gram =
                    w_bf * w_bf.adjoint() + ridge * Eigen::MatrixXcd::Identity(k, k);
                w_bb = gram.ldlt().solve(w_bf * t.adjoint()).adjoint();
                const double res = (w_bb * w_bf - t).norm();
                if (res < best_k.residual) {
                    best_k.residual = res;
                    best_k.baseband = w_bb;
                    best_k.rf = w_bf;
                }
                // RF stage: phase projection of the unconstrained least-squares update
                const Eigen::MatrixXcd bb_gram =
                    w_bb.adjoint() * w_bb + ridge * Eigen::MatrixXcd::Identity(k, k);
                const Eigen::MatrixXcd ls = bb_gram.ldlt().solve(w_bb.adjoint() * t);
                for (int r = 0; r < k; ++r)
                    for (int c = 0; c < n; ++c) {
                        const double m = std::abs(ls(r, c));
                        if (m > 0.0) w_bf(r, c) = ls(r, c) / m;
                    }
            }
        }
        if (best_k.residual <= best.residual || k == 1) {
            best.residual = best_k.residual;
            best.baseband = best_k.baseband;
            best.rf = best_k.rf;
        } else {
            // keep the larger stage anyway, padded from the smaller optimum
            Eigen::MatrixXcd padded(k, n);
            padded.topRows(k - 1) = best.rf;
            padded.row(k - 1) = dft_rows(k).row(k - 1);
            Eigen::MatrixXcd bb(n_s, k);
            bb.leftCols(k - 1) = best.baseband;
            bb.col(k - 1).setZero();
            best.rf = padded;
            best.baseband = bb;
        }
    }

    // exact power constraint ||W_BB W_BF||_F^2 = N_s
    const double pnorm = (best.baseband * best.rf).norm();
    if (pnorm > 0.0) best.baseband *= std::sqrt(static_cast<double>(n_s)) / pnorm;
    return best;
}

BeamPattern beampattern(const Eigen::VectorXcd& weights, const ArrayGeometry& geom,
                        const PatternGrid& grid) {
    const std::vector<Direction> dirs = grid.directions();
    if (dirs.empty()) throw EmptyDirections("pattern grid is empty");
    const Eigen::VectorXd mag = array_response(weights, geom, dirs).cwiseAbs();
    const double peak = mag.maxCoeff();
    if (peak <= 0.0) throw AllZeroResponse("array response is identically zero");

    BeamPattern p;
    p.grid = grid;
    p.gain_db.resize(mag.size());
    for (Eigen::Index i = 0; i < mag.size(); ++i)
        p.gain_db(i) = mag(i) > 0.0 ? 20.0 * std::log10(mag(i) / peak) : -400.0;
    return p;
}

BeamwidthError beamwidth_error(const BeamPattern& pattern, const BeamSpec& beam) {
    const PatternGrid& g = pattern.grid;
    const double margin_phi = 0.5 * beam.delta_phi + beam.delta_phi;
    const double margin_theta = 0.5 * beam.delta_theta + beam.delta_theta;
    if (g.phi_min > beam.phi_r - margin_phi + 1e-9 ||
        g.phi_max < beam.phi_r + margin_phi - 1e-9 ||
        g.theta_min > beam.theta_r - margin_theta + 1e-9 ||
        g.theta_max < beam.theta_r + margin_theta - 1e-9)
        throw InsufficientCoverage(
            "pattern grid must cover the beam ellipse with one full width of margin per side");

    const double cell = rad2deg(g.step) * rad2deg(g.step);
    long error_cells = 0;
    long beam_cells = 0;
    const int nphi = g.n_phi();
    const int ntheta = g.n_theta();
    for (int ti = 0; ti < ntheta; ++ti) {
        const double theta = g.theta_min + ti * g.step;
        for (int pi = 0; pi < nphi; ++pi) {
            const double phi = g.phi_min + pi * g.step;
            const double kt = (theta - beam.theta_r) / (beam.delta_theta / 2.0);
            const double kp = (phi - beam.phi_r) / (beam.delta_phi / 2.0);
            const bool inside = kt * kt + kp * kp <= 1.0;
            const double gain = pattern.gain_db(static_cast<Eigen::Index>(ti) * nphi + pi);
            if (inside) ++beam_cells;
            if ((inside && gain < kHalfPowerDb) || (!inside && gain > kHalfPowerDb)) ++error_cells;
        }
    }
    if (beam_cells == 0)
        throw InsufficientCoverage("requested ellipse smaller than one evaluation cell");

    BeamwidthError e;
    e.error_area = error_cells * cell;
    e.beam_area = beam_cells * cell;
    e.e_b = e.error_area / e.beam_area;
    return e;
}

} // namespace coopradar
