#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "delaygeom/errors.hpp"

namespace delaygeom
{

using Complex = std::complex<double>;

struct SeriesDiagnostics
{
    int terms = 0;
    // max |term| / |sum|; large values mean cancellation ate precision
    double cancellation = 1.0;
};

inline constexpr int series_term_cap = 100000;

namespace detail
{
inline double to_double(double v)
{
    return v;
}
template<class Real>
double to_double(const Real& v)
{
    return static_cast<double>(v);
}

//---------------------------------------------------------------------------//
/*!
 * Gauss series sum_n (a)_n (b)_n / ((c)_n n!) z^n for |z| < 1.
 *
 * Stops once three consecutive terms are below rel_tol * |partial sum|.
 */
template<class Real, class Value>
Value gauss_series(const Real& a, const Value& b, const Real& c, const Real& z,
                   const Real& rel_tol, SeriesDiagnostics* diag)
{
    using std::abs;
    Value term(1);
    Value sum(1);
    Real max_term(1);
    int small = 0;
    for (int n = 0; n < series_term_cap; ++n)
    {
        Real rn(n);
        term *= Value(a + rn) * (b + Value(rn)) / Value((c + rn) * (rn + 1)) * Value(z);
        sum += term;
        Real mag = abs(term);
        if (mag > max_term)
            max_term = mag;
        if (mag <= rel_tol * abs(sum))
        {
            if (++small >= 3)
            {
                if (diag)
                {
                    diag->terms = n + 1;
                    Real s = abs(sum);
                    diag->cancellation = s > 0 ? to_double(max_term / s)
                                               : std::numeric_limits<double>::infinity();
                }
                return sum;
            }
        }
        else
        {
            small = 0;
        }
    }
    std::ostringstream msg;
    msg << "hypergeometric series did not converge in " << series_term_cap
        << " terms (z = " << to_double(z) << ", |partial sum| = "
        << to_double(Real(abs(sum))) << ", last |term| = " << to_double(Real(abs(term)))
        << ")";
    throw NumericalError(msg.str());
}

template<class Real>
void check_c(const Real& c)
{
    using std::floor;
    if (c <= 0 && floor(c) == c)
        throw DomainError("hyp2f1: c must not be a non-positive integer");
}
} // namespace detail

// Direct Gauss series, |z| < 1.
Complex hyp2f1_gauss_series(double a, Complex b, double c, double z,
                            SeriesDiagnostics* diag = nullptr);

// 2F1(a, b; c; z) for real a, c and z <= 0, via the Pfaff transformation
// (1 - z)^-b 2F1(c - a, b; c; z / (z - 1)) and a series in [0, 1).
Complex hyp2f1(double a, Complex b, double c, double z, SeriesDiagnostics* diag = nullptr);

// Real-parameter version for any floating type (used at extended precision).
template<class Real>
Real hyp2f1_real(const Real& a, const Real& b, const Real& c, const Real& z)
{
    using std::exp;
    using std::log;
    detail::check_c(c);
    if (z > 0)
        throw DomainError("hyp2f1: z must be <= 0");
    if (z == 0 || b == 0)
        return Real(1);
    const Real eps = std::numeric_limits<Real>::epsilon();
    Real one(1);
    Real zp = z / (z - one);
    Real series = detail::gauss_series<Real, Real>(c - a, b, c, zp, eps, nullptr);
    return exp(-b * log(one - z)) * series;
}

// 2F1(-delta, b; 1 - delta; -gamma) through the integral
//   (1 + gamma)^-b + b gamma int_0^1 u^-delta (1 + gamma u)^(-b-1) du
// taken along steepest-descent rays; requires Re b >= 0.
Complex hyp2f1_interference_contour(double delta, Complex b, double gamma);

//---------------------------------------------------------------------------//
/*!
 * Interference functional
 *   F(k, alpha, gamma) = 1 + L (2F1(-2/alpha, k; 1 - 2/alpha; -gamma) - 1).
 *
 * The series route is used while it is well conditioned; large |k| with
 * Re k >= 0 switches to the contour integral.
 */
Complex script_f(Complex k, double alpha, double gamma, double load);

template<class Real>
Real script_f_real(const Real& k, const Real& alpha, const Real& gamma, const Real& load)
{
    Real delta = Real(2) / alpha;
    Real h = hyp2f1_real<Real>(-delta, k, Real(1) - delta, -gamma);
    return Real(1) + load * (h - Real(1));
}

double log_beta(double a, double b);

// I_x(a, b) = B(x; a, b) / B(a, b).
double regularized_incomplete_beta(double x, double a, double b);

} // namespace delaygeom
