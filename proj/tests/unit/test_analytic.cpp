#include <cmath>
#include <numbers>

#include <doctest.h>

#include "delaygeom/analytic.hpp"
#include "delaygeom/errors.hpp"

using namespace delaygeom;
using doctest::Approx;

namespace
{
constexpr double pi = std::numbers::pi;

// alpha = 4 and L = active_probability(1, 1)
DelayQuery unit_ratio_query(double gamma)
{
    DelayQuery q;
    q.params = NetworkParams::defaults();
    q.params.lambda_mt = q.params.lambda_bs;
    q.criterion = Sir{gamma};
    return q;
}

// L = 1 to double precision
DelayQuery saturated_query(double gamma)
{
    DelayQuery q = unit_ratio_query(gamma);
    q.params.lambda_mt = 1e12 * q.params.lambda_bs;
    return q;
}

DelayQuery defaults_query(const CoverageCriterion& c)
{
    return {NetworkParams::defaults(), c, {}};
}
} // namespace

TEST_SUITE("analytic")
{
    TEST_CASE("local delay closed form and general integral")
    {
        auto q = unit_ratio_query(1.0);
        auto d = local_delay(q);
        REQUIRE(d.is_finite());
        CHECK(d.value() == Approx(2.409936741898484).epsilon(1e-14));
        auto g = local_delay(q, DelayMethod::general_integral);
        REQUIRE(g.is_finite());
        CHECK(std::abs(g.value() - d.value()) < 1e-8);

        CHECK(local_delay(unit_ratio_query(1e-9)).value() == Approx(1.0).epsilon(1e-8));

        const double gstar = critical_threshold(4.0, q.load());
        for (double gamma : {gstar, gstar * 1.01, 3.0})
        {
            CHECK(local_delay(unit_ratio_query(gamma)).is_infinite());
            CHECK(local_delay(unit_ratio_query(gamma), DelayMethod::general_integral).is_infinite());
        }
    }

    TEST_CASE("local delay with noise")
    {
        CHECK(local_delay(defaults_query(Sinr{1.0})).is_infinite());
        CHECK(local_delay(defaults_query(Sinr{1.0}), DelayMethod::general_integral).is_infinite());
        CHECK(local_delay(defaults_query(SirAsnr{1.0, 10.0})).is_infinite());
        CHECK(local_delay(defaults_query(SirAsnr{1.0, 10.0}), DelayMethod::general_integral)
                  .is_infinite());
        auto quiet = defaults_query(Sinr{1.0});
        quiet.params.noise_power = 0;
        CHECK(local_delay(quiet).value()
              == Approx(local_delay(defaults_query(Sir{1.0})).value()).epsilon(1e-14));
    }

    TEST_CASE("exact F1 under SIR")
    {
        auto q = unit_ratio_query(1.0);
        CHECK(f1(0, q) == 1.0);
        // mpmath, 50 digits
        CHECK(f1(1, q) == Approx(0.3148330280181039).epsilon(1e-13));
        CHECK(f1(2, q) == Approx(0.1744737009226053).epsilon(1e-13));
        CHECK(f1(5, q) == Approx(0.06279514175193215).epsilon(1e-12));
        CHECK(f1(10, q) == Approx(0.02500916571294399).epsilon(1e-12));
        CHECK(f1(20, q) == Approx(0.009228093319581259).epsilon(1e-12));
        CHECK(f1(50, q) == Approx(0.002318923491988060).epsilon(1e-11));
        CHECK(f1(60, q) == Approx(0.001753039781816164).epsilon(1e-11));
        CHECK(f1(1, q) == Approx(1 - 1 / 1.459498255012827).epsilon(1e-13));

        auto curve = f1_curve(60, q);
        for (int tau = 0; tau < 60; ++tau)
            CHECK(curve[tau] >= curve[tau + 1]);
        CHECK(curve[37] == f1(37, q));
        CHECK_THROWS_AS(f1(61, q), DomainError);
        CHECK_THROWS_AS(f1(-1, q), DomainError);
    }

    TEST_CASE("exact F1 with noise")
    {
        // mpmath quadrature of each k-term
        auto sinr = defaults_query(Sinr{1.0});
        CHECK(f1(1, sinr) == Approx(0.4899318875795922).epsilon(1e-10));
        CHECK(f1(5, sinr) == Approx(0.2127454694134403).epsilon(1e-10));
        auto asnr = defaults_query(SirAsnr{1.0, db_to_linear(12.5)});
        CHECK(f1(0, asnr) == 1.0);
        CHECK(f1(5, asnr) == Approx(0.5861426133436750).epsilon(1e-12));
        CHECK(std::abs(f1(50, asnr) - packet_loss(asnr)) < 1e-3);
        auto curve = f1_curve(30, sinr);
        for (int tau = 0; tau < 30; ++tau)
            CHECK(curve[tau] >= curve[tau + 1]);
    }

    TEST_CASE("packet loss")
    {
        CHECK(packet_loss(defaults_query(Sir{1.0})) == 0.0);
        CHECK(packet_loss(defaults_query(Sinr{1.0})) == 0.0);
        CHECK(packet_loss(defaults_query(SirAsnr{1.0, db_to_linear(12.5)}))
              == Approx(0.5828617642340169).epsilon(1e-13));

        // choose lambda_BS so that pi lambda_BS r*^2 = 2
        DelayQuery q = defaults_query(SirAsnr{1.0, 4.0});
        const double r_star = asnr_radius(std::get<SirAsnr>(q.criterion), q.params);
        q.params.lambda_bs = 2.0 / (pi * r_star * r_star);
        q.params.lambda_mt = 10 * q.params.lambda_bs;
        CHECK(packet_loss(q) == Approx(std::exp(-2.0)).epsilon(1e-13));

        CHECK(packet_loss(defaults_query(SirAsnr{1.0, 1e-12})) < 1e-100);
    }

    TEST_CASE("characteristic function")
    {
        CHECK(char_fn(0.0, defaults_query(Sir{1.0})) == Complex(1.0));
        CHECK(char_fn(0.0, defaults_query(Sinr{1.0})) == Complex(1.0));
        auto asnr = defaults_query(SirAsnr{1.0, db_to_linear(12.5)});
        CHECK(std::abs(char_fn(0.0, asnr) - (1.0 - packet_loss(asnr))) < 1e-10);
        CHECK(std::abs(char_fn(1e-9, asnr) - (1.0 - packet_loss(asnr))) < 1e-8);

        auto sat = saturated_query(1.0);
        CHECK(char_fn(Complex(0, -1), sat).real() == Approx(1 / (1 + pi / 4)).epsilon(1e-14));
        CHECK(char_fn(Complex(0, -1), sat).real() == Approx(0.5600991535115574).epsilon(1e-14));

        auto sinr = defaults_query(Sinr{1.0});
        CHECK(char_fn(Complex(0, -1), sinr).real() == Approx(0.5100681124204078).epsilon(1e-11));
        CHECK(char_fn(Complex(0, -2), sinr).real() == Approx(0.3730476062282523).epsilon(1e-11));

        for (double t : {0.3, 2.0, 17.0, 150.0})
        {
            for (const auto& q : {sat, sinr, asnr})
            {
                Complex v = char_fn(t, q);
                Complex w = char_fn(-t, q);
                CHECK(std::abs(w - std::conj(v)) < 1e-10);
                CHECK(std::abs(v) <= 1.0 - packet_loss(q) + 1e-12);
            }
        }
    }

    TEST_CASE("Gil-Pelaez F2 and F3")
    {
        auto sat = saturated_query(1.0);
        CHECK(f2_gilpelaez(1.0, sat) == 1.0);
        // mpmath Talbot inversion of 1 / (s F(s))
        CHECK(std::abs(f2_gilpelaez(5.0, sat) - 0.1751914035486616) < 1e-7);
        CHECK(f2_gilpelaez(1e6, sat) < 1e-4);
        CHECK_THROWS_AS(f2_gilpelaez(0.5, sat), DomainError);

        CHECK(f3_gilpelaez(0.0, 5, sat) == 1.0);
        CHECK(f3_gilpelaez(1.0, 5, sat) == 0.0);
        double prev = 1.0;
        for (double x = 0.05; x < 1.0; x += 0.1)
        {
            double v = f3_gilpelaez(x, 5, sat);
            CHECK(v <= prev);
            prev = v;
        }
        CHECK_THROWS_AS(f3_gilpelaez(1.5, 5, sat), DomainError);
    }

    TEST_CASE("Gil-Pelaez with a defective distribution")
    {
        // F2 at huge T is dominated by the mass of never-covered users
        auto asnr = defaults_query(SirAsnr{1.0, db_to_linear(12.5)});
        const double pe = packet_loss(asnr);
        double far = f2_gilpelaez(1e8, asnr);
        CHECK(far >= pe - 1e-6);
        CHECK(far < pe + 1e-3);
        CHECK(f2_gilpelaez(2.0, asnr) > pe);
    }

    TEST_CASE("partial sums of F1")
    {
        auto q = unit_ratio_query(1.0);
        auto r = local_delay_from_f1(q, 50);
        CHECK(r.partial_sum == Approx(2.2025909086906).epsilon(1e-12));
        CHECK_FALSE(r.diverging);
        CHECK(r.decay_exponent > 1.0);
        // the power-law tail estimate recovers most of the remainder
        CHECK(std::abs(r.partial_sum + r.tail_estimate - local_delay(q).value()) < 0.05);

        auto tiny = local_delay_from_f1(unit_ratio_query(1e-6), 20);
        CHECK(tiny.partial_sum == Approx(1.0).epsilon(1e-5));

        auto above = local_delay_from_f1(unit_ratio_query(2.0), 50);
        CHECK(above.diverging);
        CHECK(above.value.is_infinite());
        auto lossy = local_delay_from_f1(defaults_query(SirAsnr{1.0, db_to_linear(12.5)}), 40);
        CHECK(lossy.diverging);
        CHECK_THROWS_AS(local_delay_from_f1(q, 0), DomainError);
    }

    TEST_CASE("probability range contract")
    {
        CHECK(checked_probability(-5e-7, "t") == 0.0);
        CHECK(checked_probability(1 + 5e-7, "t") == 1.0);
        CHECK_THROWS_AS(checked_probability(-1e-3, "t"), NumericalError);
        CHECK_THROWS_AS(checked_probability(NAN, "t"), NumericalError);
        CHECK(f3_coverage_level(0.5, 1) == Approx(0.5));
        CHECK(f3_coverage_level(1e-300, 1000) == Approx(-std::expm1(std::log(1e-300) / 1000)));
    }
}
