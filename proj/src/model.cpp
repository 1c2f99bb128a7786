#include "delaygeom/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "delaygeom/errors.hpp"

namespace delaygeom
{
namespace
{
template<class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what)
{
    if (!ok)
        throw DomainError(what);
}
} // namespace

void NetworkParams::validate() const
{
    require(lambda_bs > 0 && std::isfinite(lambda_bs), "lambda_bs must be > 0");
    require(lambda_mt > 0 && std::isfinite(lambda_mt), "lambda_mt must be > 0");
    require(alpha > 2 && std::isfinite(alpha), "alpha must be > 2");
    require(path_loss_k > 0, "path-loss constant K must be > 0");
    require(tx_power > 0, "transmit power must be > 0");
    require(noise_power >= 0, "noise power must be >= 0");
}

NetworkParams NetworkParams::defaults()
{
    NetworkParams p;
    p.lambda_mt = 1.0 / (std::numbers::pi * 50.0 * 50.0);
    p.lambda_bs = 0.1 * p.lambda_mt;
    p.alpha = 4.0;
    p.path_loss_k = path_loss_constant(2.1e9);
    p.tx_power = dbm_to_watt(43.0);
    p.noise_power = delaygeom::noise_power(-174.0, 200e6);
    return p;
}

void validate(const CoverageCriterion& criterion)
{
    std::visit(overloaded{
                   [](const Sir& c) { require(c.gamma > 0, "gamma must be > 0"); },
                   [](const Sinr& c) { require(c.gamma > 0, "gamma must be > 0"); },
                   [](const SirAsnr& c) {
                       require(c.gamma > 0, "gamma must be > 0");
                       require(c.theta > 0, "theta must be > 0");
                   },
               },
               criterion);
}

double decoding_threshold(const CoverageCriterion& criterion)
{
    return std::visit([](const auto& c) { return c.gamma; }, criterion);
}

std::string_view criterion_name(const CoverageCriterion& criterion)
{
    return std::visit(overloaded{
                          [](const Sir&) { return std::string_view{"sir"}; },
                          [](const Sinr&) { return std::string_view{"sinr"}; },
                          [](const SirAsnr&) { return std::string_view{"sir-asnr"}; },
                      },
                      criterion);
}

CoverageCriterion with_threshold(const CoverageCriterion& criterion, double gamma)
{
    return std::visit(
        [gamma](auto c) -> CoverageCriterion {
            c.gamma = gamma;
            return c;
        },
        criterion);
}

void NetworkRealization::validate() const
{
    require(r0 > 0 && std::isfinite(r0), "r0 must be > 0");
    double prev = r0;
    for (double r : interferers)
    {
        require(r > prev, "interferer distances must be ascending and beyond r0");
        prev = r;
    }
}

double active_probability(double lambda_bs, double lambda_mt)
{
    require(lambda_bs > 0 && lambda_mt > 0, "densities must be > 0");
    double ratio = lambda_mt / lambda_bs;
    // 1 - (1 + ratio/3.5)^-3.5 written to keep precision for small ratios
    return -std::expm1(-3.5 * std::log1p(ratio / 3.5));
}

double nearest_distance_pdf(double r0, double lambda_bs)
{
    require(r0 >= 0, "r0 must be >= 0");
    require(lambda_bs > 0, "lambda_bs must be > 0");
    const double pi = std::numbers::pi;
    return 2 * pi * lambda_bs * r0 * std::exp(-lambda_bs * pi * r0 * r0);
}

double nearest_distance_cdf(double r0, double lambda_bs)
{
    require(r0 >= 0, "r0 must be >= 0");
    require(lambda_bs > 0, "lambda_bs must be > 0");
    return -std::expm1(-lambda_bs * std::numbers::pi * r0 * r0);
}

double asnr_radius(const SirAsnr& criterion, const NetworkParams& params)
{
    if (params.noise_power == 0)
        return INFINITY;
    return std::pow(params.tx_power
                        / (params.path_loss_k * params.noise_power * criterion.theta),
                    1.0 / params.alpha);
}

double gate(double r0, const CoverageCriterion& criterion, const NetworkParams& params)
{
    return std::visit(
        overloaded{
            [](const Sir&) { return 1.0; },
            [&](const Sinr& c) {
                return std::exp(-c.gamma * params.noise_power * params.path_loss_k
                                * std::pow(r0, params.alpha) / params.tx_power);
            },
            [&](const SirAsnr& c) { return r0 <= asnr_radius(c, params) ? 1.0 : 0.0; },
        },
        criterion);
}

double log_conditional_coverage(const NetworkRealization& realization,
                                const CoverageCriterion& criterion,
                                const NetworkParams& params)
{
    const double gamma = decoding_threshold(criterion);
    const double r0 = realization.r0;

    double log_gate = 0.0;
    if (const auto* c = std::get_if<Sinr>(&criterion))
    {
        log_gate = -c->gamma * params.noise_power * params.path_loss_k
                   * std::pow(r0, params.alpha) / params.tx_power;
    }
    else if (const auto* c = std::get_if<SirAsnr>(&criterion))
    {
        if (r0 > asnr_radius(*c, params))
            return -INFINITY;
    }

    double acc = log_gate;
    for (double r : realization.interferers)
        acc -= std::log1p(gamma * std::pow(r0 / r, params.alpha));
    return acc;
}

double conditional_coverage(const NetworkRealization& realization,
                            const CoverageCriterion& criterion,
                            const NetworkParams& params)
{
    return std::exp(log_conditional_coverage(realization, criterion, params));
}

double critical_threshold(double alpha, double load)
{
    require(alpha > 2, "alpha must be > 2");
    require(load > 0 && load <= 1, "load must be in (0, 1]");
    return (alpha - 2) / (2 * load);
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear)
{
    require(linear > 0, "linear value must be > 0");
    return 10.0 * std::log10(linear);
}

double dbm_to_watt(double dbm)
{
    return 1e-3 * db_to_linear(dbm);
}

double watt_to_dbm(double watt)
{
    return linear_to_db(watt * 1e3);
}

double path_loss_constant(double carrier_hz)
{
    require(carrier_hz > 0, "carrier frequency must be > 0");
    double v = 4 * std::numbers::pi * carrier_hz / 3e8;
    return v * v;
}

double noise_power(double n0_dbm_per_hz, double bandwidth_hz)
{
    require(bandwidth_hz > 0, "bandwidth must be > 0");
    return dbm_to_watt(n0_dbm_per_hz) * bandwidth_hz;
}

} // namespace delaygeom
