#include "delaygeom/approx.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "delaygeom/errors.hpp"
#include "delaygeom/parallel.hpp"

namespace delaygeom
{
namespace
{
// Round-off in phi is amplified by about exp(A/2) in the Euler sum.
constexpr double euler_phi_rel_tol = 1e-13;

DelayQuery tightened(const DelayQuery& q)
{
    DelayQuery out = q;
    out.quad.rel_tol = std::min(q.quad.rel_tol, euler_phi_rel_tol);
    out.quad.abs_tol = std::min(q.quad.abs_tol, 1e-15);
    return out;
}
} // namespace

void EulerParams::validate() const
{
    if (!(A > 0))
        throw DomainError("euler: A must be > 0");
    if (N < 1 || Q < 1)
        throw DomainError("euler: N and Q must be >= 1");
}

double euler_ccdf(double y, const DelayQuery& q, const EulerParams& ep)
{
    ep.validate();
    q.validate();
    if (!(y > 0))
        throw DomainError("euler: inversion point must be > 0");
    const DelayQuery tight = tightened(q);
    const int terms = ep.N + ep.Q;

    // (-1)^n / beta_n Re{phi((2 pi n - i A) / (2y)) / (A + 2 pi i n)}
    std::vector<double> term(terms + 1);
    for (int n = 0; n <= terms; ++n)
    {
        const double w = 2 * std::numbers::pi * n;
        Complex t = Complex(w, -ep.A) / (2 * y);
        Complex v = char_fn(t, tight) / Complex(ep.A, w);
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        term[n] = sign * v.real() / (n == 0 ? 2.0 : 1.0);
    }

    std::vector<double> partial(terms + 1);
    double running = 0.0;
    for (int n = 0; n <= terms; ++n)
    {
        running += term[n];
        partial[n] = running;
    }
    double averaged = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= ep.Q; ++k)
    {
        averaged += binom * partial[ep.N + k];
        binom = binom * (ep.Q - k) / (k + 1);
    }
    double cdf = std::exp(ep.A / 2) * std::ldexp(averaged, 1 - ep.Q);
    return checked_probability(1.0 - cdf, "euler");
}

double f2_euler(double T, const DelayQuery& q, const EulerParams& ep)
{
    if (!(T >= 1))
        throw DomainError("f2: T must be >= 1");
    if (T == 1)
        return 1.0;
    return euler_ccdf(std::log(T), q, ep);
}

double f3_euler(double x, int tau, const DelayQuery& q, const EulerParams& ep)
{
    if (!(x >= 0 && x <= 1))
        throw DomainError("f3: x must be in [0, 1]");
    if (tau < 0)
        throw DomainError("f3: tau must be >= 0");
    if (x == 0 || tau == 0)
        return 1.0;
    if (x == 1)
        return 0.0;
    return euler_ccdf(-std::log(f3_coverage_level(x, tau)), q, ep);
}

void BetaShape::validate() const
{
    if (!(a > 0 && b > 0))
        throw DomainError("beta shape: a and b must be > 0");
    if (!(mu > 0 && mu < 1))
        throw DomainError("beta shape: mu must be in (0, 1)");
    if (!(nu > 0 && nu < mu * (1 - mu)))
        throw DomainError("beta shape: nu must be in (0, mu (1 - mu))");
}

BetaShape beta_shape(const DelayQuery& q)
{
    q.validate();
    if (std::holds_alternative<SirAsnr>(q.criterion))
        throw UnsupportedCriterion("beta approximation is not applicable to SIR+ASNR");
    const DelayQuery tight = tightened(q);
    BetaShape s;
    s.mu = char_fn(Complex(0, -1), tight).real();
    const double second = char_fn(Complex(0, -2), tight).real();
    s.nu = second - s.mu * s.mu;
    if (!(s.mu > 0 && s.mu < 1) || !(s.nu > 0) || !(s.nu < s.mu * (1 - s.mu)))
    {
        std::ostringstream msg;
        msg << "beta shape: degenerate moments mu = " << s.mu << ", nu = " << s.nu;
        throw NumericalError(msg.str());
    }
    s.b = s.mu * (1 - s.mu) * (1 - s.mu) / s.nu - (1 - s.mu);
    s.a = s.mu * s.b / (1 - s.mu);
    if (!(s.a > 0 && s.b > 0))
        throw NumericalError("beta shape: non-positive shape parameters");
    return s;
}

double f2_beta(double T, const BetaShape& shape)
{
    shape.validate();
    if (!(T >= 1))
        throw DomainError("f2: T must be >= 1");
    return regularized_incomplete_beta(1.0 / T, shape.a, shape.b);
}

double f3_beta(double x, int tau, const BetaShape& shape)
{
    shape.validate();
    if (!(x >= 0 && x <= 1))
        throw DomainError("f3: x must be in [0, 1]");
    if (tau < 0)
        throw DomainError("f3: tau must be >= 0");
    if (x == 0 || tau == 0)
        return 1.0;
    if (x == 1)
        return 0.0;
    return regularized_incomplete_beta(f3_coverage_level(x, tau), shape.a, shape.b);
}

double f1_riemann(int tau, const DelayQuery& q, int n, F3Method method, const EulerParams& ep)
{
    if (tau < 0)
        throw DomainError("f1_riemann: tau must be >= 0");
    if (n < 1)
        throw DomainError("f1_riemann: n must be >= 1");
    q.validate();
    if (tau == 0)
        return 1.0;

    BetaShape shape;
    if (method == F3Method::beta)
        shape = beta_shape(q);

    std::vector<double> values(n);
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t i) {
            const double x = (static_cast<double>(i) + 0.5) / n;
            switch (method)
            {
                case F3Method::euler:
                    values[i] = f3_euler(x, tau, q, ep);
                    break;
                case F3Method::gilpelaez:
                    values[i] = f3_gilpelaez(x, tau, q);
                    break;
                case F3Method::beta:
                    values[i] = f3_beta(x, tau, shape);
                    break;
            }
        },
        q.quad.cancel);
    return checked_probability(pairwise_sum(values) / n, "f1_riemann");
}

} // namespace delaygeom
