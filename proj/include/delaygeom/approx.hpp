#pragma once

#include <cmath>
#include <numbers>

#include "delaygeom/analytic.hpp"

namespace delaygeom
{

// Constants of the Euler-summation Laplace inversion.
struct EulerParams
{
    double A = 10 * std::numbers::ln10;
    int N = 21;
    int Q = 15;

    void validate() const;
};

// 1 - P[-log P_cov <= y] through Euler summation of the Bromwich series.
// The transform of the defective CDF already carries the mass at -log 0,
// so no offset is applied under SIR+ASNR.
double euler_ccdf(double y, const DelayQuery& q, const EulerParams& ep = {});

double f2_euler(double T, const DelayQuery& q, const EulerParams& ep = {});
double f3_euler(double x, int tau, const DelayQuery& q, const EulerParams& ep = {});

// Beta distribution matched to the first two moments of P_cov.
struct BetaShape
{
    double a = 1.0;
    double b = 1.0;
    double mu = 0.5;
    double nu = 1.0 / 12;

    void validate() const;
};

BetaShape beta_shape(const DelayQuery& q);

double f2_beta(double T, const BetaShape& shape);
double f3_beta(double x, int tau, const BetaShape& shape);

enum class F3Method
{
    euler,
    gilpelaez,
    beta,
};

inline constexpr int riemann_default_n = 4096;

// Midpoint Riemann sum of F3(x, tau) over x in (0, 1).
double f1_riemann(int tau, const DelayQuery& q, int n = riemann_default_n,
                  F3Method method = F3Method::euler, const EulerParams& ep = {});

} // namespace delaygeom
