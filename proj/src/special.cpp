#include "delaygeom/special.hpp"

#include <cmath>
#include <limits>

#include "delaygeom/quadrature.hpp"

namespace delaygeom
{
namespace
{
constexpr double series_rel_tol = 1e-16;
// Round-off of the series grows like (max |term| / |sum|) * terms * eps; past
// this product the contour is the more accurate route.
constexpr double max_series_amplification = 1e3;
constexpr double series_always_below = 4.0;
constexpr double contour_switch_modulus = 200.0;
} // namespace

Complex hyp2f1_gauss_series(double a, Complex b, double c, double z, SeriesDiagnostics* diag)
{
    detail::check_c(c);
    if (!(std::abs(z) < 1))
        throw DomainError("hyp2f1_gauss_series: |z| must be < 1");
    return detail::gauss_series<double, Complex>(a, b, c, z, series_rel_tol, diag);
}

Complex hyp2f1(double a, Complex b, double c, double z, SeriesDiagnostics* diag)
{
    detail::check_c(c);
    if (!(z <= 0))
        throw DomainError("hyp2f1: z must be <= 0");
    if (z == 0 || b == Complex(0))
    {
        if (diag)
            *diag = {};
        return 1.0;
    }
    double zp = z / (z - 1);
    Complex series = detail::gauss_series<double, Complex>(c - a, b, c, zp, series_rel_tol, diag);
    return std::exp(-b * std::log1p(-z)) * series;
}

Complex hyp2f1_interference_contour(double delta, Complex b, double gamma)
{
    if (!(delta > 0 && delta < 1))
        throw DomainError("contour 2F1: delta must be in (0, 1)");
    if (!(gamma > 0))
        throw DomainError("contour 2F1: gamma must be > 0");
    if (b.real() < 0)
        throw DomainError("contour 2F1: requires Re b >= 0");
    if (b == Complex(0))
        return 1.0;

    const double modulus = std::abs(b);
    const double theta = std::arg(b);
    const Complex dir = std::polar(1.0, -theta);
    const Complex b1 = -b - 1.0;

    QuadOptions opts;
    opts.abs_tol = 1e-300;
    opts.rel_tol = 1e-13;
    opts.max_subdivisions = 4000;

    // Ray from the origin, u = s dir with s = sigma v^p; p removes u^-delta.
    const double p = 1.0 / (1.0 - delta);
    const double sigma0 = 1.0 / (gamma * modulus);
    const Complex front = std::pow(dir, -delta) * std::pow(sigma0, 1.0 - delta) * p * dir;
    auto ray0 = [&](double v) -> Complex {
        Complex u = sigma0 * std::pow(v, p) * dir;
        return front * std::exp(b1 * std::log(1.0 + gamma * u));
    };
    // Ray from u = 1 in the same direction.
    auto ray1 = [&](double s) -> Complex {
        Complex u = 1.0 + s * dir;
        return std::exp(-delta * std::log(u) + b1 * std::log(1.0 + gamma * u)) * dir;
    };

    Complex near = quad_semi_infinite(ray0, opts, {TailRule::mapped, 1.0}).value;
    Complex far =
        quad_semi_infinite(ray1, opts, {TailRule::mapped, (1.0 + gamma) / (gamma * modulus)})
            .value;
    return std::exp(-b * std::log1p(gamma)) + b * gamma * (near - far);
}

Complex script_f(Complex k, double alpha, double gamma, double load)
{
    if (!(alpha > 2))
        throw DomainError("script_f: alpha must be > 2");
    if (!(gamma > 0))
        throw DomainError("script_f: gamma must be > 0");
    if (!(load > 0 && load <= 1))
        throw DomainError("script_f: load must be in (0, 1]");
    if (k == Complex(0))
        return 1.0;

    const double delta = 2.0 / alpha;
    Complex h;
    bool have = false;
    if (std::abs(k) <= contour_switch_modulus || k.real() < 0)
    {
        try
        {
            SeriesDiagnostics diag;
            h = hyp2f1(-delta, k, 1.0 - delta, -gamma, &diag);
            have = diag.cancellation * diag.terms <= max_series_amplification
                   || std::abs(k) < series_always_below || k.real() < 0;
        }
        catch (const NumericalError&)
        {
            if (k.real() < 0)
                throw;
        }
    }
    if (!have)
        h = hyp2f1_interference_contour(delta, k, gamma);
    return 1.0 + load * (h - 1.0);
}

double log_beta(double a, double b)
{
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace
{
// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double x, double a, double b)
{
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1;
    const double qam = a - 1;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < 100000; ++m)
    {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps)
            return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}
} // namespace

double regularized_incomplete_beta(double x, double a, double b)
{
    if (!(a > 0 && b > 0))
        throw DomainError("incomplete beta: a and b must be > 0");
    if (!(x >= 0 && x <= 1))
        throw DomainError("incomplete beta: x must be in [0, 1]");
    if (x == 0)
        return 0.0;
    if (x == 1)
        return 1.0;
    const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1) / (a + b + 2))
        return std::exp(log_front) * beta_continued_fraction(x, a, b) / a;
    return 1.0 - std::exp(log_front) * beta_continued_fraction(1.0 - x, b, a) / b;
}

} // namespace delaygeom
