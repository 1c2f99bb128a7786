#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include <doctest.h>

#include "delaygeom/analytic.hpp"
#include "delaygeom/errors.hpp"
#include "delaygeom/mcsim.hpp"

using namespace delaygeom;
using doctest::Approx;

namespace
{
constexpr double pi = std::numbers::pi;

SimConfig small_config(const NetworkParams& p, double expected_bs, std::size_t n)
{
    SimConfig cfg;
    cfg.window_radius = std::sqrt(expected_bs / (pi * p.lambda_bs));
    cfg.n_realizations = n;
    return cfg;
}

bool within_joint_ci(const EstimateWithCI& a, const EstimateWithCI& b)
{
    return std::abs(a.value - b.value)
           <= std::hypot(a.half_width_95, b.half_width_95) + 1e-12;
}
} // namespace

TEST_SUITE("mcsim")
{
    TEST_CASE("thinning keeps every BS when MTs saturate the network")
    {
        NetworkParams sat = NetworkParams::defaults();
        sat.lambda_mt = 1e12 * sat.lambda_bs;
        NetworkParams sparse = sat;
        sparse.lambda_mt = 0.5 * sat.lambda_bs;
        CHECK(active_probability(sat.lambda_bs, sat.lambda_mt) == 1.0);
        const double load = active_probability(sparse.lambda_bs, sparse.lambda_mt);
        SimConfig cfg = small_config(sat, 200, 50);
        double kept = 0, all = 0;
        for (std::size_t i = 0; i < cfg.n_realizations; ++i)
        {
            auto full = sample_realization(sat, cfg, i);
            auto thin = sample_realization(sparse, cfg, i);
            CHECK(full.r0 == thin.r0);
            // thinning only removes points from the same geometry
            CHECK(std::includes(full.interferers.begin(), full.interferers.end(),
                                thin.interferers.begin(), thin.interferers.end()));
            kept += thin.interferers.size();
            all += full.interferers.size();
        }
        CHECK(std::abs(kept / all - load) < 4 * std::sqrt(load * (1 - load) / all));
    }

    TEST_CASE("BS count is Poisson with the window mean")
    {
        NetworkParams p = NetworkParams::defaults();
        p.lambda_mt = 1e12 * p.lambda_bs; // every BS becomes an interferer
        const double mean = 20.0;
        SimConfig cfg = small_config(p, mean, 10000);
        double total = 0;
        for (std::size_t i = 0; i < cfg.n_realizations; ++i)
            total += 1.0 + sample_realization(p, cfg, i).interferers.size();
        double avg = total / cfg.n_realizations;
        CHECK(std::abs(avg - mean) < 3 * std::sqrt(mean / cfg.n_realizations));
    }

    TEST_CASE("serving distance follows the nearest-neighbour law")
    {
        NetworkParams p = NetworkParams::defaults();
        SimConfig cfg = SimConfig::defaults(p);
        std::vector<double> r0;
        for (std::size_t i = 0; i < 5000; ++i)
            r0.push_back(sample_realization(p, cfg, i).r0);
        std::sort(r0.begin(), r0.end());
        double ks = 0;
        const double n = static_cast<double>(r0.size());
        for (std::size_t i = 0; i < r0.size(); ++i)
        {
            double F = nearest_distance_cdf(r0[i], p.lambda_bs);
            ks = std::max({ks, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
        }
        CHECK(ks < 0.02);
    }

    TEST_CASE("slot simulation")
    {
        NetworkParams p = NetworkParams::defaults();
        NetworkRealization real{40.0, {60.0, 75.0, 90.0, 130.0, 200.0}};
        CounterRng rng(9, purpose_fading, 0);
        for (int i = 0; i < 100; ++i)
            CHECK(simulate_delay_slots(real, Sir{1e-12}, p, rng, 10).slots == 1);

        const double pc = pcov_oracle(real, Sir{1.0}, p);
        const int runs = 10000;
        double sum = 0, sum2 = 0;
        for (int i = 0; i < runs; ++i)
        {
            auto out = simulate_delay_slots(real, Sir{1.0}, p, rng, 100000);
            REQUIRE_FALSE(out.censored);
            sum += out.slots;
            sum2 += double(out.slots) * out.slots;
        }
        const double mean = sum / runs;
        const double sd = std::sqrt((1 - pc) / (pc * pc) / runs);
        CHECK(std::abs(mean - 1 / pc) < 3 * sd);

        SirAsnr asnr{1.0, 4.0};
        const double r_star = asnr_radius(asnr, p);
        NetworkRealization far{r_star * 1.1, {r_star * 2}};
        auto out = simulate_delay_slots(far, asnr, p, rng, 500);
        CHECK(out.censored);
        CHECK(out.slots == 500);
        CHECK_THROWS_AS(simulate_delay_slots(real, Sir{1.0}, p, rng, 0), DomainError);
    }

    TEST_CASE("estimators at their trivial points")
    {
        NetworkParams p = NetworkParams::defaults();
        SimConfig cfg = small_config(p, 100, 300);
        auto semi = simulate_coverage(p, Sir{1.0}, cfg);
        cfg.fading_mode = FadingMode::slot_level;
        cfg.n_slots = 50;
        auto slot = simulate_coverage(p, Sir{1.0}, cfg);
        for (const auto* s : {&semi, &slot})
        {
            auto e = estimate_f1(0, *s);
            CHECK(e.value == 1.0);
            CHECK(e.half_width_95 == 0.0);
            CHECK(estimate_f2(1.0, *s).value == 1.0);
            CHECK(estimate_f3(0.0, 4, *s).value == 1.0);
        }
        CHECK(estimate_ploss(semi).value == 0.0);
        CHECK_THROWS_AS(estimate_f1(50, slot), DomainError);
        CHECK_THROWS_AS(estimate_f2(0.5, semi), DomainError);
    }

    TEST_CASE("F1 estimate matches the analytic value")
    {
        NetworkParams p = NetworkParams::defaults();
        SimConfig cfg = SimConfig::defaults(p);
        auto est = estimate_f1(5, p, Sir{1.0}, cfg);
        CHECK(est.n == 5000);
        CHECK(std::abs(est.value - f1(5, DelayQuery{p, Sir{1.0}, {}})) <= est.half_width_95);
    }

    TEST_CASE("slot-level and semi-analytic estimators agree")
    {
        NetworkParams p = NetworkParams::defaults();
        SimConfig cfg = small_config(p, 200, 600);
        auto semi = simulate_coverage(p, Sir{1.0}, cfg);
        cfg.fading_mode = FadingMode::slot_level;
        cfg.n_slots = 400;
        auto slot = simulate_coverage(p, Sir{1.0}, cfg);
        for (int tau : {1, 3, 10})
            CHECK(within_joint_ci(estimate_f1(tau, semi), estimate_f1(tau, slot)));
        CHECK(within_joint_ci(estimate_f2(2.0, semi), estimate_f2(2.0, slot)));
        CHECK(within_joint_ci(estimate_f3(0.3, 5, semi), estimate_f3(0.3, 5, slot)));
        CHECK(within_joint_ci(estimate_pcov_mean(semi), estimate_pcov_mean(slot)));
    }

    TEST_CASE("estimates are bitwise independent of the thread count")
    {
        NetworkParams p = NetworkParams::defaults();
        SimConfig cfg = small_config(p, 200, 500);
        setenv("DELAYGEOM_THREADS", "1", 1);
        auto a = simulate_coverage(p, Sinr{1.0}, cfg);
        setenv("DELAYGEOM_THREADS", "4", 1);
        auto b = simulate_coverage(p, Sinr{1.0}, cfg);
        unsetenv("DELAYGEOM_THREADS");
        CHECK(a.pcov == b.pcov);
        CHECK(estimate_f1(4, a).value == estimate_f1(4, b).value);
        CHECK(estimate_local_delay(a).value == estimate_local_delay(b).value);
    }

    TEST_CASE("window sufficiency")
    {
        NetworkParams p = NetworkParams::defaults();
        SimConfig cfg = SimConfig::defaults(p);
        SimConfig wide = cfg;
        wide.window_radius *= 2;
        for (int tau : {1, 5, 20})
        {
            auto a = estimate_f1(tau, p, Sir{1.0}, cfg);
            auto b = estimate_f1(tau, p, Sir{1.0}, wide);
            CHECK(std::abs(a.value - b.value) < a.half_width_95);
        }
    }

    TEST_CASE("packet loss estimate")
    {
        NetworkParams p = NetworkParams::defaults();
        SimConfig cfg = SimConfig::defaults(p);
        SirAsnr c{1.0, db_to_linear(12.5)};
        auto est = estimate_ploss(p, c, cfg);
        CHECK(std::abs(est.value - packet_loss(DelayQuery{p, c, {}})) <= est.half_width_95);
        CHECK(estimate_ploss(p, Sinr{1.0}, cfg).value == 0.0);
    }

    TEST_CASE("local delay estimate and heavy tails")
    {
        NetworkParams p = NetworkParams::defaults();
        p.lambda_mt = p.lambda_bs;
        SimConfig cfg = SimConfig::defaults(p);
        auto fine = estimate_local_delay(p, Sir{0.5}, cfg);
        const double d = local_delay(DelayQuery{p, Sir{0.5}, {}}).value();
        CHECK(std::abs(fine.value - d) < 0.05 * d);
        CHECK_FALSE(fine.heavy_tail);

        const double gstar = critical_threshold(4.0, active_probability(p.lambda_bs, p.lambda_mt));
        auto wild = estimate_local_delay(p, Sir{2 * gstar}, cfg);
        CHECK(wild.heavy_tail);

        auto lossy = estimate_local_delay(p, SirAsnr{1.0, db_to_linear(12.5)}, cfg);
        CHECK(std::isinf(lossy.value));
        CHECK(lossy.heavy_tail);
    }

    TEST_CASE("Voronoi activity")
    {
        NetworkParams p = NetworkParams::defaults();
        SimConfig cfg = small_config(p, 300, 40);
        cfg.activity_mode = ActivityMode::voronoi;
        double active = 0, total = 0;
        for (std::size_t i = 0; i < cfg.n_realizations; ++i)
        {
            auto vor = sample_realization(p, cfg, i);
            // a dense MT population activates nearly every cell of the same BS layout
            NetworkParams sat = p;
            sat.lambda_mt = 50 * p.lambda_bs;
            auto every = sample_realization(sat, cfg, i);
            CHECK(vor.r0 == every.r0);
            active += vor.interferers.size();
            total += every.interferers.size();
        }
        const double frac = active / total;
        // close to L = 0.991 away from the window edge, lower near it
        CHECK(frac > 0.85);
        CHECK(frac <= 1.0);
    }

    TEST_CASE("configuration validation")
    {
        SimConfig cfg;
        cfg.window_radius = 0;
        CHECK_THROWS_AS(cfg.validate(), DomainError);
        cfg.window_radius = 1;
        cfg.n_realizations = 0;
        CHECK_THROWS_AS(cfg.validate(), DomainError);
        NetworkParams p = NetworkParams::defaults();
        CHECK(SimConfig::defaults(p).window_radius
              == Approx(std::sqrt(default_window_bs / (pi * p.lambda_bs))));
    }
}
