#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "swloc/error.hpp"
#include "swloc/fft.hpp"
#include "swloc/rng.hpp"
#include "swloc/sim.hpp"

using namespace swloc;
using sim::EnvironmentModel;
using sim::SensorArray;
using sim::SourceSpec;
using sim::Vec3;

namespace {

EnvironmentModel default_env() { return {}; }  // 30 m, 1500 m/s, -1/0.7, order 2

SourceSpec flat_source(double lo = 50.0, double hi = 2000.0) {
    SourceSpec s;
    s.band_lo_hz = lo;
    s.band_hi_hz = hi;
    s.slope_db_per_octave = 0.0;
    s.source_level_db = 0.0;
    return s;
}

}  // namespace

TEST_CASE("image_paths order 0 is the direct path only") {
    EnvironmentModel env = default_env();
    env.max_image_order = 0;
    const Vec3 src{30.0, 40.0, 5.0};
    const Vec3 sen{0.0, 0.0, 29.0};
    auto imp = sim::image_paths(env, src, sen);
    REQUIRE(imp.arrivals.size() == 1);
    const double r = sim::norm(src - sen);
    CHECK(imp.arrivals[0].delay_s == doctest::Approx(r / 1500.0).epsilon(1e-12));
    CHECK(imp.arrivals[0].amplitude == doctest::Approx(1.0 / r).epsilon(1e-12));
    CHECK(imp.arrivals[0].bounces == 0);
}

TEST_CASE("image_paths order 1 matches hand mirror geometry") {
    EnvironmentModel env = default_env();
    env.max_image_order = 1;
    const double zs = 2.0, zr = 29.0, R = 100.0;
    auto imp = sim::image_paths(env, {R, 0.0, zs}, {0.0, 0.0, zr});
    REQUIRE(imp.arrivals.size() == 3);

    // Hand geometry: direct, surface image at -zs, bottom image at 2h - zs.
    const double len_d = std::sqrt(R * R + (zs - zr) * (zs - zr));
    const double len_s = std::sqrt(R * R + (-zs - zr) * (-zs - zr));
    const double len_b = std::sqrt(R * R + (2 * 30.0 - zs - zr) * (2 * 30.0 - zs - zr));
    // Sorted by delay: direct < bottom < surface for this geometry.
    CHECK(imp.arrivals[0].delay_s == doctest::Approx(len_d / 1500.0).epsilon(1e-12));
    CHECK(imp.arrivals[1].delay_s == doctest::Approx(len_b / 1500.0).epsilon(1e-12));
    CHECK(imp.arrivals[2].delay_s == doctest::Approx(len_s / 1500.0).epsilon(1e-12));
    CHECK(imp.arrivals[0].amplitude == doctest::Approx(1.0 / len_d).epsilon(1e-12));
    CHECK(imp.arrivals[1].amplitude == doctest::Approx(0.7 / len_b).epsilon(1e-12));
    CHECK(imp.arrivals[2].amplitude == doctest::Approx(-1.0 / len_s).epsilon(1e-12));
}

TEST_CASE("surface-reflected arrival has opposite sign when surface_reflection = -1") {
    EnvironmentModel env = default_env();
    env.max_image_order = 1;
    auto imp = sim::image_paths(env, {50.0, 0.0, 3.0}, {0.0, 0.0, 29.0});
    int neg = 0;
    for (const auto& a : imp.arrivals)
        if (a.amplitude < 0.0) ++neg;
    CHECK(imp.arrivals[0].amplitude > 0.0);
    CHECK(neg == 1);  // exactly the surface bounce
}

TEST_CASE("image_paths counts by order") {
    EnvironmentModel env = default_env();
    const Vec3 s{80.0, 0.0, 3.0}, r{0.0, 0.0, 29.0};
    env.max_image_order = 1;
    CHECK(sim::image_paths(env, s, r).arrivals.size() == 3);
    env.max_image_order = 2;
    CHECK(sim::image_paths(env, s, r).arrivals.size() == 5);
    env.max_image_order = 3;
    CHECK(sim::image_paths(env, s, r).arrivals.size() == 7);
}

TEST_CASE("image_paths rejects positions outside the water column") {
    EnvironmentModel env = default_env();
    CHECK_THROWS_AS(sim::image_paths(env, {0, 0, -1.0}, {0, 0, 29.0}), DomainError);
    CHECK_THROWS_AS(sim::image_paths(env, {0, 0, 5.0}, {0, 0, 31.0}), DomainError);
}

TEST_CASE("reciprocity: swapping source and sensor keeps the delay set") {
    EnvironmentModel env = default_env();
    env.max_image_order = 4;
    const Vec3 a{123.0, -45.0, 4.0}, b{7.0, 12.0, 27.5};
    auto ab = sim::image_paths(env, a, b);
    auto ba = sim::image_paths(env, b, a);
    REQUIRE(ab.arrivals.size() == ba.arrivals.size());
    for (std::size_t i = 0; i < ab.arrivals.size(); ++i) {
        CHECK(ab.arrivals[i].delay_s == doctest::Approx(ba.arrivals[i].delay_s).epsilon(1e-12));
        CHECK(ab.arrivals[i].amplitude ==
              doctest::Approx(ba.arrivals[i].amplitude).epsilon(1e-12));
    }
}

TEST_CASE("TDOA consistency: direct delays differ by (r1 - r2)/c to machine precision") {
    EnvironmentModel env = default_env();
    SensorArray array;
    auto sensors = array.positions(env);
    swloc::Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const Vec3 src{rng.uniform(-400, 400), rng.uniform(20, 400), rng.uniform(1, 28)};
        auto p1 = sim::image_paths(env, src, sensors[0]);
        auto p2 = sim::image_paths(env, src, sensors[1]);
        const double want = (sim::norm(src - sensors[0]) - sim::norm(src - sensors[1])) / 1500.0;
        CHECK(std::abs((p1.arrivals[0].delay_s - p2.arrivals[0].delay_s) - want) < 1e-15);
    }
}

TEST_CASE("first-order excess delay falls below the lifter bound beyond the geometric threshold") {
    // Max first-order excess delay at horizontal range R, source depth zs,
    // receiver depth zr in depth-h water:
    //   excess(R) = (max(len_s, len_b) - len_d)/c, by explicit mirror geometry.
    EnvironmentModel env = default_env();
    const double zs = 3.0, zr = 29.0, h = env.water_depth_m, c = env.sound_speed_mps;
    const double q_max = 1.4e-3;
    auto excess = [&](double R) {
        const double len_d = std::hypot(R, zr - zs);
        const double len_s = std::hypot(R, zs + zr);
        const double len_b = std::hypot(R, 2 * h - zs - zr);
        return (std::max(len_s, len_b) - len_d) / c;
    };
    // Bisection for the threshold radius where excess == q_max.
    double lo = 1.0, hi = 5000.0;
    REQUIRE(excess(lo) > q_max);
    REQUIRE(excess(hi) < q_max);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > q_max ? lo : hi) = mid;
    }
    const double threshold = hi;
    for (double r = threshold; r < threshold + 600.0; r += 7.0) CHECK(excess(r) <= q_max);
    // And the bound is tight: just inside the threshold it exceeds q_max.
    CHECK(excess(threshold * 0.9) > q_max);
    // The simulator agrees with the analytic excess delay.
    env.max_image_order = 1;
    auto imp = sim::image_paths(env, {threshold + 50.0, 0.0, zs}, {0.0, 0.0, zr});
    const double sim_excess = imp.arrivals.back().delay_s - imp.arrivals.front().delay_s;
    CHECK(sim_excess == doctest::Approx(excess(threshold + 50.0)).epsilon(1e-9));
    CHECK(sim_excess < q_max);
}

TEST_CASE("synthesize_source is deterministic for a fixed seed") {
    auto a = sim::synthesize_source(flat_source(), 0.5, 25000.0, 99);
    auto b = sim::synthesize_source(flat_source(), 0.5, 25000.0, 99);
    REQUIRE(a.size() == b.size());
    CHECK(a == b);
    auto c = sim::synthesize_source(flat_source(), 0.5, 25000.0, 100);
    CHECK(a != c);
}

TEST_CASE("synthesize_source in-band / out-of-band power ratio exceeds 20 dB") {
    const double fs = 25000.0;
    auto x = sim::synthesize_source(flat_source(50.0, 2000.0), 4.0, fs, 5);
    // Welch periodogram, Hann segments of 4096.
    const std::size_t seg = 4096;
    dsp::Fft fft(seg);
    auto win = dsp::hann_window(seg);
    std::vector<double> psd(seg / 2 + 1, 0.0);
    int count = 0;
    std::vector<double> buf(seg);
    for (std::size_t s = 0; s + seg <= x.size(); s += seg / 2) {
        for (std::size_t i = 0; i < seg; ++i) buf[i] = x[s + i] * win[i];
        auto sp = fft.forward_real(std::span<const double>(buf));
        for (std::size_t k = 0; k <= seg / 2; ++k) psd[k] += std::norm(sp[k]);
        ++count;
    }
    REQUIRE(count > 0);
    double in_band = 0.0, out_band = 0.0;
    int n_in = 0, n_out = 0;
    for (std::size_t k = 1; k <= seg / 2; ++k) {
        const double f = fs * static_cast<double>(k) / static_cast<double>(seg);
        if (f >= 50.0 && f <= 2000.0) {
            in_band += psd[k];
            ++n_in;
        } else if (f > 2300.0) {  // past the band edge leakage skirt
            out_band += psd[k];
            ++n_out;
        }
    }
    const double ratio_db =
        10.0 * std::log10((in_band / n_in) / std::max(out_band / n_out, 1e-300));
    CHECK(ratio_db > 20.0);
}

TEST_CASE("synthesize_source tonal line peaks at its bin") {
    const double fs = 25000.0;
    SourceSpec s = flat_source(50.0, 2000.0);
    s.tonals.push_back({300.0, 6.0});
    auto x = sim::synthesize_source(s, 4.0, fs, 17);
    const std::size_t seg = 8192;
    dsp::Fft fft(seg);
    auto win = dsp::hann_window(seg);
    std::vector<double> psd(seg / 2 + 1, 0.0);
    std::vector<double> buf(seg);
    for (std::size_t off = 0; off + seg <= x.size(); off += seg) {
        for (std::size_t i = 0; i < seg; ++i) buf[i] = x[off + i] * win[i];
        auto sp = fft.forward_real(std::span<const double>(buf));
        for (std::size_t k = 0; k <= seg / 2; ++k) psd[k] += std::norm(sp[k]);
    }
    std::size_t arg = 1;
    for (std::size_t k = 1; k <= seg / 2; ++k)
        if (psd[k] > psd[arg]) arg = k;
    const double peak_hz = fs * static_cast<double>(arg) / static_cast<double>(seg);
    CHECK(std::abs(peak_hz - 300.0) < fs / seg + 1e-9);
}

TEST_CASE("synthesize_source has zero mean and the requested rms") {
    auto x = sim::synthesize_source(flat_source(), 1.0, 25000.0, 3);
    double mean = 0.0, ss = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double v : x) ss += v * v;
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::sqrt(ss / static_cast<double>(x.size())) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("synthesize_source rejects band edges at or above Nyquist") {
    CHECK_THROWS_AS(sim::synthesize_source(flat_source(50.0, 12500.0), 1.0, 25000.0, 1),
                    ConfigError);
}

TEST_CASE("propagate with an exact integer delay is a shift and scale, bit-exact") {
    swloc::Rng rng(2);
    const double fs = 1024.0;  // 25/1024 is exactly representable
    std::vector<double> x(512);
    for (auto& v : x) v = rng.gaussian();
    sim::MultipathImpulse imp;
    imp.arrivals.push_back({25.0 / fs, 0.5, 0});
    auto y = sim::propagate(x, imp, fs);
    for (std::size_t i = 25; i < x.size(); ++i) CHECK(y[i] == 0.5 * x[i - 25]);
    for (std::size_t i = 0; i < 25; ++i) CHECK(y[i] == 0.0);
}

TEST_CASE("propagate is linear in the amplitudes") {
    swloc::Rng rng(3);
    const double fs = 1000.0;
    std::vector<double> x(512);
    for (auto& v : x) v = rng.gaussian();
    sim::MultipathImpulse one, two;
    one.arrivals = {{0.0123, 0.8, 0}, {0.0456, -0.3, 1}};
    two.arrivals = {{0.0123, 1.6, 0}, {0.0456, -0.6, 1}};
    auto y1 = sim::propagate(x, one, fs);
    auto y2 = sim::propagate(x, two, fs);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(y2[i] == doctest::Approx(2.0 * y1[i]).epsilon(1e-12));
}

TEST_CASE("propagate: two integer-delay arrivals appear as cross-correlation maxima") {
    swloc::Rng rng(4);
    const double fs = 1000.0;
    const int n = 1024;
    std::vector<double> x(n);
    for (auto& v : x) v = rng.gaussian();
    sim::MultipathImpulse imp;
    const int d1 = 40, d2 = 90;
    imp.arrivals = {{d1 / fs, 1.0, 0}, {d2 / fs, 0.6, 1}};
    auto y = sim::propagate(x, imp, fs);
    auto xc = oracles::circular_xcorr(x, y);  // peak at lag d when y delayed by d
    const int center = n / 2;
    auto is_local_max = [&](int lag) {
        const double v = xc[static_cast<std::size_t>(center + lag)];
        return v > xc[static_cast<std::size_t>(center + lag - 1)] &&
               v > xc[static_cast<std::size_t>(center + lag + 1)];
    };
    CHECK(is_local_max(d1));
    CHECK(is_local_max(d2));
}

TEST_CASE("propagate rejects delays beyond the output length") {
    std::vector<double> x(100, 1.0);
    sim::MultipathImpulse imp;
    imp.arrivals = {{2.0, 1.0, 0}};
    CHECK_THROWS_AS(sim::propagate(x, imp, 100.0), DomainError);
}

TEST_CASE("straight_transit geometry and static-label sanity") {
    auto plan = sim::straight_transit(90.0, 100.0, 5.0, 250.0, 3.0);
    CHECK(plan.duration_s == doctest::Approx(100.0));
    // CPA at mid-transit, perpendicular offset 100 m toward -x for heading 90.
    const Vec3 cpa = plan.position(plan.duration_s / 2.0);
    CHECK(std::hypot(cpa.x, cpa.y) == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(cpa.z == doctest::Approx(3.0));
}

TEST_CASE("simulate_transit: static broadside source labels are constant") {
    EnvironmentModel env = default_env();
    SensorArray array;
    sim::TransitPlan plan;
    for (int i = 0; i <= 40; ++i) {
        plan.times_s.push_back(0.1 * i);
        plan.waypoints_m.push_back({0.0, 100.0, 3.0});
    }
    auto rec = sim::simulate_transit(plan, flat_source(), env, array, 8000.0,
                                     std::numeric_limits<double>::infinity(), 5);
    REQUIRE(!rec.labels.empty());
    const double want_range = sim::norm(Vec3{0.0, 100.0, 3.0} - array.center(env));
    for (const auto& l : rec.labels) {
        CHECK(l.range_m == doctest::Approx(want_range).epsilon(1e-12));
        CHECK(l.bearing_rad == doctest::Approx(oracles::kPi / 2).epsilon(1e-12));
    }
}

TEST_CASE("simulate_transit labels form a V over an inbound-outbound transit") {
    EnvironmentModel env = default_env();
    SensorArray array;
    auto plan = sim::straight_transit(80.0, 60.0, 6.0, 200.0, 3.0);
    auto rec = sim::simulate_transit(plan, flat_source(), env, array, 8000.0, 20.0, 6);
    const auto& L = rec.labels;
    REQUIRE(L.size() > 10);
    std::size_t cpa = 0;
    for (std::size_t i = 0; i < L.size(); ++i)
        if (L[i].range_m < L[cpa].range_m) cpa = i;
    CHECK(cpa > 2);
    CHECK(cpa < L.size() - 3);
    for (std::size_t i = 1; i <= cpa; ++i) CHECK(L[i].range_m <= L[i - 1].range_m + 1e-9);
    for (std::size_t i = cpa + 1; i < L.size(); ++i) CHECK(L[i].range_m >= L[i - 1].range_m - 1e-9);
}

TEST_CASE("simulate_transit with infinite snr equals noiseless propagation") {
    EnvironmentModel env = default_env();
    SensorArray array;
    auto plan = sim::straight_transit(45.0, 50.0, 6.0, 30.0, 3.0);
    auto a = sim::simulate_transit(plan, flat_source(), env, array, 8000.0,
                                   std::numeric_limits<double>::infinity(), 7);
    auto b = sim::simulate_transit(plan, flat_source(), env, array, 8000.0, 10.0, 7);
    // Same seed: b = a + noise, and a carries no noise at all.
    REQUIRE(a.samples[0].size() == b.samples[0].size());
    bool differs = false;
    for (std::size_t i = 0; i < a.samples[0].size(); ++i)
        if (a.samples[0][i] != b.samples[0][i]) differs = true;
    CHECK(differs);
}

TEST_CASE("simulate_transit is bit-deterministic for a fixed seed") {
    EnvironmentModel env = default_env();
    SensorArray array;
    auto plan = sim::straight_transit(120.0, 70.0, 5.5, 40.0, 3.0);
    auto a = sim::simulate_transit(plan, flat_source(), env, array, 8000.0, 15.0, 123);
    auto b = sim::simulate_transit(plan, flat_source(), env, array, 8000.0, 15.0, 123);
    for (int ch = 0; ch < 3; ++ch) CHECK(a.samples[ch] == b.samples[ch]);
    auto c = sim::simulate_transit(plan, flat_source(), env, array, 8000.0, 15.0, 124);
    CHECK(a.samples[0] != c.samples[0]);
}

TEST_CASE("simulate_transit rejects an empty plan") {
    EnvironmentModel env = default_env();
    SensorArray array;
    sim::TransitPlan plan;
    CHECK_THROWS_AS(sim::simulate_transit(plan, flat_source(), env, array, 8000.0, 10.0, 1),
                    ConfigError);
}
