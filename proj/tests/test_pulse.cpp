#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "sqc/circuit.hpp"
#include "sqc/errors.hpp"
#include "sqc/pulse.hpp"
#include "sqc/spectrum.hpp"

using namespace sqc;

namespace {

CircuitParams nominal_params() {
    return {11.5, 20.0, 77.5, 69.2, 0.40, 0.40, 0.78, 0.78};
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1.0);
    return g;
}

ThetaTable nominal_theta(int points = 201) {
    static ThetaTable cached = mixing_angle_table(nominal_params(), linspace(0.0, 0.5156, 201));
    return cached;
}

} // namespace

TEST_CASE("mixing_angle closed form") {
    CHECK(mixing_angle(0.05, 1.0) == doctest::Approx(0.5 * std::atan(0.1)).epsilon(1e-15));
    CHECK(mixing_angle(0.0, 2.0) == 0.0);
    CHECK(mixing_angle(1.0, 0.0) == doctest::Approx(std::acos(-1.0) / 4.0));
}

TEST_CASE("mixing_angle_table on the decoupled circuit is zero") {
    CircuitParams p = nominal_params();
    p.ejc1 = p.ejc2 = 0.0;
    p.cc1 = p.cc2 = 0.0;
    const ThetaTable table = mixing_angle_table(p, linspace(0.0, 0.5, 21));
    for (double t : table.theta) CHECK(std::abs(t) < 1e-12);
}

TEST_CASE("mixing_angle_table is monotone with stronger mixing when on") {
    const ThetaTable table = nominal_theta();
    CHECK(std::abs(table.theta.front()) > std::abs(table.theta.back()));
    for (std::size_t k = 1; k < table.theta.size(); ++k)
        CHECK(table.theta[k] > table.theta[k - 1]);
    // inverse interpolation round trip at the knots
    CHECK(table.phi_of_theta(table.theta.front()) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(table.phi_of_theta(table.theta.back()) == doctest::Approx(0.5156));
    CHECK_THROWS_AS(table.phi_of_theta(1.0), physics_error);
}

TEST_CASE("kaiser window") {
    const std::vector<double> w = kaiser_window(101, 6.0);
    double sum = 0.0;
    for (double v : w) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    for (int i = 0; i < 50; ++i) CHECK(w[i] == doctest::Approx(w[100 - i]).epsilon(1e-13));
    CHECK(kaiser_window(1, 6.0) == std::vector<double>{1.0});
    CHECK_THROWS_AS(kaiser_window(0, 6.0), parameter_error);
}

TEST_CASE("synthesize waveform shape") {
    const ThetaTable table = nominal_theta();
    PulseConfig cfg;
    cfg.t_gate = 22.0;
    cfg.beta = 0.7;
    cfg.phi_on = 0.0;
    cfg.phi_off = 0.5156;
    const Waveform wf = synthesize(cfg, table);
    REQUIRE(wf.samples.size() == 2201);
    CHECK(wf.samples.front() == cfg.phi_off);
    CHECK(wf.samples.back() == cfg.phi_off);
    CHECK(wf.duration() == doctest::Approx(22.0));

    // time symmetry about the center
    const std::size_t n = wf.samples.size();
    for (std::size_t k = 0; k < n; ++k)
        CHECK(std::abs(wf.samples[k] - wf.samples[n - 1 - k]) < 1e-9);

    // plateau at phi_on when the square covers the window
    CHECK(std::abs(wf.samples[n / 2] - cfg.phi_on) < 1e-9);

    // beta -> 1 approaches a square pulse
    PulseConfig sq = cfg;
    sq.beta = 0.999;
    const Waveform square = synthesize(sq, table);
    int plateau = 0;
    for (double s : square.samples)
        if (std::abs(s - cfg.phi_on) < 1e-9) ++plateau;
    CHECK(plateau > 2100);
}

TEST_CASE("synthesized shape matches a brute-force convolution oracle") {
    const ThetaTable table = nominal_theta();
    PulseConfig cfg;
    cfg.t_gate = 20.0;
    cfg.beta = 0.4;  // peak below one: square does not cover the window
    cfg.phi_on = 0.0;
    cfg.phi_off = 0.5156;
    const Waveform wf = synthesize(cfg, table);

    // dense Riemann convolution of the same edge-tapered window
    const double t_w = (1.0 - cfg.beta) * cfg.t_gate;
    const double t_sq = cfg.beta * cfg.t_gate;
    const int m = 200001;
    std::vector<double> pdf(m);
    const double denom = std::cyl_bessel_i(0.0, cfg.window_shape);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        const double x = 2.0 * i / (m - 1.0) - 1.0;
        pdf[i] = std::cyl_bessel_i(0.0, cfg.window_shape * std::sqrt(std::max(0.0, 1.0 - x * x))) /
                     denom -
                 1.0 / denom;
        sum += pdf[i];
    }
    for (double& v : pdf) v /= sum;
    std::vector<double> cdf(m + 1, 0.0);
    for (int i = 0; i < m; ++i) cdf[i + 1] = cdf[i] + pdf[i];
    auto cdf_at = [&](double t) {
        const double u = t / t_w;
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        return cdf[static_cast<int>(u * m)];
    };

    // compare in the theta domain through the same table
    const ThetaTable inv = table;
    double theta_off = 0.0, theta_on = 0.0;
    {
        // endpoints of the tabulated branch
        theta_on = inv.theta.front();
        theta_off = inv.theta.back();
    }
    double max_err = 0.0;
    for (std::size_t k = 0; k < wf.samples.size(); ++k) {
        const double t = k * cfg.dt;
        const double y_oracle = cdf_at(t) - cdf_at(t - t_sq);
        const double phi_oracle = inv.phi_of_theta(theta_off + (theta_on - theta_off) * y_oracle);
        max_err = std::max(max_err, std::abs(phi_oracle - wf.samples[k]));
    }
    CHECK(max_err < 1e-4);
}

TEST_CASE("gaussian_filter") {
    Waveform wf;
    wf.dt = 0.01;
    wf.samples.assign(1001, 0.3);

    SUBCASE("sigma zero is the identity") {
        const Waveform f = gaussian_filter(wf, 0.0);
        CHECK(f.samples == wf.samples);
    }
    SUBCASE("constants are unchanged") {
        const Waveform f = gaussian_filter(wf, 0.5);
        for (double s : f.samples) CHECK(s == doctest::Approx(0.3).epsilon(1e-14));
    }
    SUBCASE("interior unit impulse becomes a unit-sum sampled Gaussian") {
        Waveform imp = wf;
        imp.samples.assign(1001, 0.0);
        imp.samples[500] = 1.0;
        const Waveform f = gaussian_filter(imp, 0.5);
        double sum = 0.0;
        for (double s : f.samples) sum += s;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.samples[500] > f.samples[470]);
    }
    SUBCASE("linear and shift equivariant in the interior") {
        Waveform a = wf, b = wf;
        a.samples.assign(1001, 0.0);
        b.samples.assign(1001, 0.0);
        a.samples[400] = 1.0;
        b.samples[600] = 1.0;
        const Waveform fa = gaussian_filter(a, 0.5);
        const Waveform fb = gaussian_filter(b, 0.5);
        for (int k = -200; k <= 200; ++k)
            CHECK(fa.samples[400 + k] == doctest::Approx(fb.samples[600 + k]).epsilon(1e-13));

        Waveform combo = wf;
        combo.samples.assign(1001, 0.0);
        combo.samples[400] = 2.0;
        combo.samples[600] = -0.5;
        const Waveform fc = gaussian_filter(combo, 0.5);
        for (int k = 0; k <= 1000; ++k)
            CHECK(fc.samples[k] ==
                  doctest::Approx(2.0 * fa.samples[k] - 0.5 * fb.samples[k]).epsilon(1e-12));
    }
    SUBCASE("filtered synthesized waveform stays pinned at the idle flux") {
        PulseConfig cfg;
        cfg.t_gate = 22.0;
        cfg.beta = 0.75;
        cfg.phi_on = 0.0;
        cfg.phi_off = 0.5156;
        const Waveform raw = synthesize(cfg, nominal_theta());
        const Waveform f = gaussian_filter(raw, 0.5);
        CHECK(std::abs(f.samples.front() - cfg.phi_off) < 1e-12);
        CHECK(std::abs(f.samples.back() - cfg.phi_off) < 1e-12);
        // symmetry survives the filter
        const std::size_t n = f.samples.size();
        for (std::size_t k = 0; k < n; ++k)
            CHECK(std::abs(f.samples[k] - f.samples[n - 1 - k]) < 1e-9);
    }
}

TEST_CASE("waveform sampling and csv round trip") {
    Waveform wf;
    wf.dt = 0.5;
    wf.samples = {0.0, 0.5, 1.0, 1.5, 2.0};
    // linear data is reproduced exactly by the cubic interpolant
    CHECK(wf.sample(0.75) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(wf.sample(-1.0) == 0.0);
    CHECK(wf.sample(99.0) == 2.0);

    const std::string path = "/tmp/sqc_test_waveform.csv";
    write_waveform_csv(wf, path);
    const Waveform back = read_waveform_csv(path);
    REQUIRE(back.samples.size() == wf.samples.size());
    CHECK(back.dt == doctest::Approx(wf.dt).epsilon(1e-15));
    for (std::size_t k = 0; k < wf.samples.size(); ++k)
        CHECK(back.samples[k] == wf.samples[k]);
    std::remove(path.c_str());
}

TEST_CASE("calibrate_beta rejects an infeasible gate duration") {
    PulseConfig cfg;
    cfg.phi_on = 0.0;
    cfg.phi_off = 0.5156;
    CHECK_THROWS_AS(calibrate_beta(nominal_params(), 18.0, cfg), infeasible_gate);
}

TEST_CASE("pulse config validation") {
    PulseConfig cfg;
    cfg.beta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), parameter_error);
    cfg.beta = 0.5;
    cfg.phi_on = cfg.phi_off = 0.1;
    CHECK_THROWS_AS(cfg.validate(), parameter_error);
}
