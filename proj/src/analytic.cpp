#include "delaygeom/analytic.hpp"

#include <algorithm>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "delaygeom/errors.hpp"

namespace delaygeom
{
namespace
{
using Big = boost::multiprecision::cpp_bin_float_50;

constexpr double pi = std::numbers::pi;
constexpr Complex imag_unit{0.0, 1.0};
// Gil-Pelaez integrands are evaluated no closer to t = 0 than this.
constexpr double gil_pelaez_t_min = 1e-8;

bool noiseless(const DelayQuery& q)
{
    return q.params.noise_power == 0;
}

// pi lambda_BS r*^2: serving distances beyond it close the SIR+ASNR gate.
double asnr_area(const SirAsnr& c, const NetworkParams& p)
{
    double r = asnr_radius(c, p);
    return pi * p.lambda_bs * r * r;
}

// Coefficient of u^(alpha/2) in -log G when r0 is expressed through
// u = pi lambda_BS r0^2.
double noise_coefficient(const Sinr& c, const NetworkParams& p)
{
    return c.gamma * p.noise_power * p.path_loss_k
           / (p.tx_power * std::pow(pi * p.lambda_bs, p.alpha / 2));
}

Big big_load(const NetworkParams& p)
{
    Big ratio = Big(p.lambda_mt) / Big(p.lambda_bs);
    Big shape("3.5");
    return Big(1) - pow(Big(1) + ratio / shape, -shape);
}

} // namespace

std::vector<double> f1_curve(int cap, const DelayQuery& q)
{
    q.validate();
    if (cap < 0)
        throw DomainError("f1: tau must be >= 0");
    if (cap > f1_exact_max_tau)
    {
        std::ostringstream msg;
        msg << "f1: exact alternating sum is limited to tau <= " << f1_exact_max_tau
            << " (got " << cap << "); use the Riemann-sum approximation";
        throw DomainError(msg.str());
    }

    const auto& p = q.params;
    const Big alpha(p.alpha);
    const Big gamma(decoding_threshold(q.criterion));
    const Big load = big_load(p);

    std::vector<Big> functional(cap + 1);
    for (int k = 0; k <= cap; ++k)
        functional[k] = k == 0 ? Big(1) : script_f_real<Big>(Big(k), alpha, gamma, load);

    // Per-k integral of G(r0)^k exp(-u F_k) over u = pi lambda r0^2.
    std::vector<Big> weight(cap + 1);
    Big error_bound = 0;
    if (const auto* sinr = std::get_if<Sinr>(&q.criterion); sinr && !noiseless(q))
    {
        const Big kappa = Big(sinr->gamma) * Big(p.noise_power) * Big(p.path_loss_k)
                          / (Big(p.tx_power)
                             * pow(Big(pi) * Big(p.lambda_bs), alpha / Big(2)));
        boost::math::quadrature::exp_sinh<Big> integrator(12);
        const Big tol("1e-40");
        const Big half_alpha = alpha / 2;
        Big binom = 1;
        for (int k = 0; k <= cap; ++k)
        {
            const Big fk = functional[k];
            const Big coeff = Big(k) * kappa;
            auto integrand = [&](const Big& v) -> Big {
                return exp(-v - coeff * pow(v / fk, half_alpha));
            };
            Big err = 0;
            Big value = integrator.integrate(integrand, tol, &err);
            weight[k] = value / fk;
            error_bound += err / fk * binom;
            binom = binom * Big(cap - k) / Big(k + 1);
        }
    }
    else if (const auto* asnr = std::get_if<SirAsnr>(&q.criterion); asnr && !noiseless(q))
    {
        const Big r_star = pow(Big(p.tx_power)
                                   / (Big(p.path_loss_k) * Big(p.noise_power) * Big(asnr->theta)),
                               Big(1) / alpha);
        const Big area = Big(pi) * Big(p.lambda_bs) * r_star * r_star;
        for (int k = 0; k <= cap; ++k)
            weight[k] = (Big(1) - exp(-area * functional[k])) / functional[k];
        // the k = 0 term covers everyone: its weight is 1, not 1 - P_e
        weight[0] = 1;
    }
    else
    {
        for (int k = 0; k <= cap; ++k)
            weight[k] = Big(1) / functional[k];
    }

    if (error_bound > Big("1e-12"))
    {
        std::ostringstream msg;
        msg << "f1: alternating-sum error bound " << static_cast<double>(error_bound)
            << " at tau = " << cap;
        throw NumericalError(msg.str());
    }

    std::vector<double> out(cap + 1);
    for (int tau = 0; tau <= cap; ++tau)
    {
        Big sum = 0;
        Big binom = 1;
        for (int k = 0; k <= tau; ++k)
        {
            Big term = binom * weight[k];
            sum += (k % 2 == 0) ? term : Big(-term);
            binom = binom * Big(tau - k) / Big(k + 1);
        }
        out[tau] = checked_probability(static_cast<double>(sum), "f1");
    }
    return out;
}

void DelayQuery::validate() const
{
    params.validate();
    delaygeom::validate(criterion);
    quad.validate();
}

double checked_probability(double raw, const char* what)
{
    if (!(raw >= -probability_slack && raw <= 1 + probability_slack))
    {
        std::ostringstream msg;
        msg << what << ": raw value " << raw << " outside [0, 1] beyond tolerance "
            << probability_slack << " (numerical instability)";
        throw NumericalError(msg.str());
    }
    return std::clamp(raw, 0.0, 1.0);
}

double f3_coverage_level(double x, int tau)
{
    return -std::expm1(std::log(x) / tau);
}

ExtendedReal local_delay(const DelayQuery& q, DelayMethod method)
{
    q.validate();
    const auto& p = q.params;
    const double gamma = decoding_threshold(q.criterion);
    const double slope = 1 - 2 * gamma * q.load() / (p.alpha - 2);
    const bool sir_like = std::holds_alternative<Sir>(q.criterion) || noiseless(q);

    if (method == DelayMethod::closed_form)
    {
        if (sir_like && slope > 0)
            return ExtendedReal::finite(1 / slope);
        return ExtendedReal::infinite();
    }

    // D = int_0^inf exp(-u slope) / G(u) du with u = pi lambda_BS r0^2
    std::function<double(double)> integrand;
    if (sir_like)
    {
        integrand = [slope](double u) { return std::exp(-u * slope); };
    }
    else if (const auto* sinr = std::get_if<Sinr>(&q.criterion))
    {
        const double kappa = noise_coefficient(*sinr, p);
        const double half_alpha = p.alpha / 2;
        integrand = [=](double u) {
            return std::exp(-u * slope + kappa * std::pow(u, half_alpha));
        };
    }
    else
    {
        const double area = asnr_area(std::get<SirAsnr>(q.criterion), p);
        integrand = [=](double u) {
            return u <= area ? std::exp(-u * slope) : std::numeric_limits<double>::infinity();
        };
    }
    auto result = quad_semi_infinite(integrand, q.quad, {TailRule::doubling, 1.0});
    if (result.diverged())
        return ExtendedReal::infinite();
    return ExtendedReal::finite(result.value);
}

double f1(int tau, const DelayQuery& q)
{
    if (tau < 0)
        throw DomainError("f1: tau must be >= 0");
    if (tau == 0)
    {
        q.validate();
        return 1.0;
    }
    return f1_curve(tau, q).back();
}

double packet_loss(const DelayQuery& q)
{
    q.validate();
    if (const auto* c = std::get_if<SirAsnr>(&q.criterion); c && !noiseless(q))
        return std::exp(-asnr_area(*c, q.params));
    return 0.0;
}

Complex char_fn(Complex t, const DelayQuery& q)
{
    q.validate();
    const auto& p = q.params;
    if (t == Complex(0))
        return 1.0 - packet_loss(q);

    const Complex b = imag_unit * t;
    const Complex functional = script_f(b, p.alpha, decoding_threshold(q.criterion), q.load());

    if (std::holds_alternative<Sir>(q.criterion) || noiseless(q))
        return 1.0 / functional;

    if (const auto* c = std::get_if<SirAsnr>(&q.criterion))
        return (1.0 - std::exp(-asnr_area(*c, p) * functional)) / functional;

    const auto& sinr = std::get<Sinr>(q.criterion);
    if (b.real() < 0)
        throw DomainError("char_fn: SINR characteristic function requires Im t <= 0");
    const double kappa = noise_coefficient(sinr, p);
    const double half_alpha = p.alpha / 2;
    auto integrand = [&](double u) -> Complex {
        return std::exp(-u * functional - b * (kappa * std::pow(u, half_alpha)));
    };
    const double scale = 1.0 / std::max(functional.real(), 1e-3);
    return quad_semi_infinite(integrand, q.quad, {TailRule::mapped, scale}).value;
}

double gil_pelaez_cdf(double z, const DelayQuery& q)
{
    q.validate();
    if (z >= 0)
        return 1.0;
    const double mass = packet_loss(q);
    auto integrand = [&](double t) {
        t = std::max(t, gil_pelaez_t_min);
        Complex v = std::exp(Complex(0.0, -t * z)) * char_fn(t, q);
        return v.imag() / t;
    };
    QuadOptions opts = q.quad;
    opts.abs_tol = std::max(opts.abs_tol, 1e-9);
    opts.rel_tol = std::max(opts.rel_tol, 1e-9);
    auto result = quad_semi_infinite(integrand, opts, {TailRule::oscillatory, pi / -z});
    // Z has mass P_e at -inf; the inversion sees only half of it.
    double raw = 0.5 - result.value / pi + 0.5 * mass;
    return checked_probability(raw, "gil-pelaez");
}

double f2_gilpelaez(double T, const DelayQuery& q)
{
    if (!(T >= 1))
        throw DomainError("f2: T must be >= 1");
    if (T == 1)
        return 1.0;
    return gil_pelaez_cdf(-std::log(T), q);
}

double f3_gilpelaez(double x, int tau, const DelayQuery& q)
{
    if (!(x >= 0 && x <= 1))
        throw DomainError("f3: x must be in [0, 1]");
    if (tau < 0)
        throw DomainError("f3: tau must be >= 0");
    if (x == 0 || tau == 0)
        return 1.0;
    if (x == 1)
        return 0.0;
    return gil_pelaez_cdf(std::log(f3_coverage_level(x, tau)), q);
}

DelaySumReport local_delay_from_f1(const DelayQuery& q, int cap)
{
    if (cap < 1)
        throw DomainError("local_delay_from_f1: cap must be >= 1");
    auto seq = f1_curve(cap, q);
    DelaySumReport report;
    report.cap = cap;
    for (double v : seq)
        report.partial_sum += v;

    const int half = std::max(1, cap / 2);
    const double last = seq[cap];
    const double mid = seq[half];
    if (last <= 0)
    {
        report.decay_exponent = INFINITY;
        report.tail_estimate = 0.0;
    }
    else if (half == cap || mid <= last)
    {
        report.decay_exponent = 0.0;
        report.tail_estimate = INFINITY;
    }
    else
    {
        report.decay_exponent = std::log(mid / last) / std::log(double(cap) / half);
        const double beta = report.decay_exponent;
        report.tail_estimate = beta > 1 ? last * std::pow(double(cap), beta)
                                              * std::pow(cap + 0.5, 1 - beta) / (beta - 1)
                                        : INFINITY;
    }
    report.diverging = !std::isfinite(report.tail_estimate);
    report.value = report.diverging ? ExtendedReal::infinite()
                                    : ExtendedReal::finite(report.partial_sum);
    return report;
}

} // namespace delaygeom
