#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coopradar/detection.hpp"

using namespace coopradar;

namespace {
std::vector<double> pf_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 19; ++i) g.push_back(i * 0.05);
    return g;
}
} // namespace

TEST_CASE("dBm round trip") {
    for (double dbm : {-110.0, -94.0, -70.0, 0.0, 20.0})
        CHECK(watts_to_dbm(dbm_to_watts(dbm)) == doctest::Approx(dbm).epsilon(1e-12));
    CHECK(dbm_to_watts(20.0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_THROWS_AS(watts_to_dbm(0.0), ValidationError);
}

TEST_CASE("q_function basics") {
    CHECK(q_function(0.0) == 0.5);
    CHECK(q_function(1.28155) == doctest::Approx(0.1).epsilon(1e-4));
    for (double x : {0.3, 1.0, 2.5})
        CHECK(q_function(-x) == doctest::Approx(1.0 - q_function(x)).epsilon(1e-12));
    for (double p : {0.01, 0.1, 0.5, 0.9})
        CHECK(q_function(q_inverse(p)) == doctest::Approx(p).epsilon(1e-10));
    CHECK_THROWS_AS(q_inverse(0.0), ValidationError);
}

TEST_CASE("echo amplitude scaling laws") {
    LinkBudget link;
    link.g_r = 361.1;
    const double a0 = echo_amplitude(link);
    LinkBudget doubled = link;
    doubled.range *= 2.0;
    CHECK(echo_amplitude(doubled) == doctest::Approx(a0 / 4.0).epsilon(1e-12));
    LinkBudget quiet = link;
    quiet.echo_prob = 0.0;
    CHECK(echo_amplitude(quiet) == 0.0);
}

TEST_CASE("echo amplitude matches the scalar formula") {
    LinkBudget link;
    link.pt_gt = 0.1;                      // 20 dBm
    link.g_p = std::pow(10.0, 5.42);       // 54.2 dB
    link.g_r = receive_gain(3.0, 6.0);
    link.wavelength = 0.0125;
    link.unit_radius = 4.0;
    link.echo_prob = 0.1;
    link.range = 112.25;
    const double pi = 3.14159265358979323846;
    const double expected =
        std::sqrt(link.pt_gt * link.g_r * link.g_p * link.wavelength * link.wavelength * pi *
                  16.0 * 0.1 / (std::pow(4.0 * pi, 3.0) * std::pow(112.25, 4.0)));
    CHECK(echo_amplitude(link) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("receive gain approximation") {
    CHECK(receive_gain(12.0, 6.0) == doctest::Approx(26000.0 / 72.0).epsilon(1e-12));
    CHECK(receive_gain(1.0, 1.0) == 26000.0);
    CHECK(receive_gain(6.0, 3.0) == doctest::Approx(4.0 * receive_gain(12.0, 6.0)).epsilon(1e-12));
    CHECK_THROWS_AS(receive_gain(0.0, 1.0), ValidationError);
}

TEST_CASE("noise parameter construction") {
    const NoiseClutterParams nc = NoiseClutterParams::from_powers(4.0, 8.0);
    CHECK(nc.sigma_n == 2.0);
    CHECK(nc.sigma_i == 2.0);
    CHECK(nc.noise_power() == 4.0);
    CHECK(nc.clutter_power() == 8.0);
    // k T B F over 100 MHz at 290 K, 6 dB noise figure
    const NoiseClutterParams th =
        NoiseClutterParams::thermal(290.0, 1e8, db_to_linear(6.0), 0.0);
    CHECK(watts_to_dbm(th.noise_power()) == doctest::Approx(-87.9).epsilon(0.01));
}

TEST_CASE("case 1 closed form oracle") {
    const FusionSignal sig{{2.0}, 1.0};
    const NoiseClutterParams nc{1.0, 0.0};
    const RocCurve c = roc_case1(sig, nc, {0.1});
    CHECK(c.points[0].p_d == doctest::Approx(0.763760).epsilon(1e-5));

    const FusionSignal none{{0.0}, 1.0};
    for (const RocPoint& p : roc_case1(none, nc, pf_grid()).points)
        CHECK(p.p_d == doctest::Approx(p.p_f).epsilon(1e-12));
}

TEST_CASE("case 2 closed form oracle") {
    const FusionSignal sig{{1.0}, 1.0};
    const NoiseClutterParams nc{0.0, 1.0};
    const RocCurve c = roc_case2(sig, nc, {0.1});
    CHECK(c.points[0].p_d == doctest::Approx(0.518602).epsilon(1e-5));

    // p_f above the breakpoint exp(-mu^2 / (2 sigma_i^2)) -> certain detection
    const double breakpoint = std::exp(-0.5);
    const RocCurve high = roc_case2(sig, nc, {breakpoint + 0.05});
    CHECK(high.points[0].p_d == 1.0);

    const FusionSignal none{{0.0}, 1.0};
    for (const RocPoint& p : roc_case2(none, nc, pf_grid()).points)
        CHECK(p.p_d == doctest::Approx(p.p_f).epsilon(1e-12));
}

TEST_CASE("numeric integration recovers both closed-form limits") {
    const FusionSignal sig{{1.5}, 1.0};
    SUBCASE("clutter-free") {
        const NoiseClutterParams nc{1.0, 0.0};
        const RocCurve closed = roc_case1(sig, nc, pf_grid());
        std::vector<double> eta;
        for (const RocPoint& p : closed.points) eta.push_back(p.threshold);
        std::sort(eta.begin(), eta.end());
        const RocCurve num = roc_numeric(sig, nc, eta);
        for (std::size_t i = 0; i < eta.size(); ++i) {
            const auto it = std::find_if(closed.points.begin(), closed.points.end(),
                                         [&](const RocPoint& p) { return p.threshold == eta[i]; });
            CHECK(num.points[i].p_d == doctest::Approx(it->p_d).epsilon(1e-4));
            CHECK(num.points[i].p_f == doctest::Approx(it->p_f).epsilon(1e-4));
        }
    }
    SUBCASE("noise-free") {
        const NoiseClutterParams tiny{1e-9, 1.0};
        const NoiseClutterParams pure{0.0, 1.0};
        const RocCurve closed = roc_case2(sig, pure, pf_grid());
        std::vector<double> eta;
        for (const RocPoint& p : closed.points) eta.push_back(p.threshold);
        std::sort(eta.begin(), eta.end());
        const RocCurve num = roc_numeric(sig, tiny, eta);
        for (std::size_t i = 0; i < eta.size(); ++i) {
            const auto it = std::find_if(closed.points.begin(), closed.points.end(),
                                         [&](const RocPoint& p) { return p.threshold == eta[i]; });
            CHECK(std::abs(num.points[i].p_d - it->p_d) < 1e-4);
        }
    }
}

TEST_CASE("numeric ROC in a mixed regime dominates the chance line") {
    const FusionSignal sig{{1.0, 0.8}, 0.9};
    const NoiseClutterParams nc{0.7, 0.5};
    const RocCurve c = roc_numeric(sig, nc, default_thresholds(sig, nc, 50));
    double prev_pf = 2.0;
    for (const RocPoint& p : c.points) {
        CHECK(p.p_d >= p.p_f - 1e-9);
        CHECK(p.p_f <= prev_pf + 1e-12);
        prev_pf = p.p_f;
        CHECK(p.p_d >= 0.0);
        CHECK(p.p_d <= 1.0);
    }
}

TEST_CASE("Monte Carlo agrees with the closed forms") {
    const std::int64_t trials = 200000;
    const double bound = 3.0 / std::sqrt(static_cast<double>(trials));
    SUBCASE("case 1 regime") {
        const FusionSignal sig{{2.0}, 1.0};
        const NoiseClutterParams nc{1.0, 0.0};
        const RocCurve closed = roc_case1(sig, nc, pf_grid());
        for (const RocPoint& ref : closed.points) {
            const RocCurve mc = roc_monte_carlo(sig, nc, {ref.threshold}, trials, 42);
            CHECK(std::abs(mc.points[0].p_d - ref.p_d) < bound);
            CHECK(std::abs(mc.points[0].p_f - ref.p_f) < bound);
        }
    }
    SUBCASE("case 2 regime") {
        const FusionSignal sig{{1.0}, 1.0};
        const NoiseClutterParams nc{1e-9, 1.0};
        const NoiseClutterParams pure{0.0, 1.0};
        const RocCurve closed = roc_case2(sig, pure, pf_grid());
        for (const RocPoint& ref : closed.points) {
            const RocCurve mc = roc_monte_carlo(sig, nc, {ref.threshold}, trials, 43);
            CHECK(std::abs(mc.points[0].p_d - ref.p_d) < bound);
        }
    }
}

TEST_CASE("Monte Carlo is deterministic for a fixed seed") {
    const FusionSignal sig{{1.0}, 1.0};
    const NoiseClutterParams nc{1.0, 0.5};
    const std::vector<double> eta = default_thresholds(sig, nc, 20);
    const RocCurve a = roc_monte_carlo(sig, nc, eta, 10000, 7);
    const RocCurve b = roc_monte_carlo(sig, nc, eta, 10000, 7);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].p_f == b.points[i].p_f);
        CHECK(a.points[i].p_d == b.points[i].p_d);
    }
    CHECK_THROWS_AS(roc_monte_carlo(sig, nc, eta, 100, 7), ValidationError);
}

TEST_CASE("fusion benefit at perfect registration") {
    const NoiseClutterParams nc{1.0, 0.0};
    const FusionSignal one{{0.8}, 1.0};
    const FusionSignal four{{0.8, 0.8, 0.8, 0.8}, 1.0};
    const RocCurve c1 = roc_case1(one, nc, pf_grid());
    const RocCurve c4 = roc_case1(four, nc, pf_grid());
    for (std::size_t i = 0; i < c1.points.size(); ++i)
        CHECK(c4.points[i].p_d >= c1.points[i].p_d);
}
