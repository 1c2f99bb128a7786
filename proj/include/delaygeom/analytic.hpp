#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "delaygeom/model.hpp"
#include "delaygeom/quadrature.hpp"
#include "delaygeom/special.hpp"

namespace delaygeom
{

//---------------------------------------------------------------------------//
/*!
 * A non-negative delay that may be infinite.
 */
class ExtendedReal
{
  public:
    static ExtendedReal finite(double v) { return ExtendedReal(v); }
    static ExtendedReal infinite() { return ExtendedReal(std::numeric_limits<double>::infinity()); }

    bool is_finite() const { return std::isfinite(value_); }
    bool is_infinite() const { return !is_finite(); }
    // +inf for the infinite branch
    double value() const { return value_; }

  private:
    explicit ExtendedReal(double v) : value_(v) {}
    double value_;
};

struct DelayQuery
{
    NetworkParams params;
    CoverageCriterion criterion = Sir{};
    QuadOptions quad;

    void validate() const;
    double load() const { return active_probability(params.lambda_bs, params.lambda_mt); }
};

// Largest tau served by the exact alternating-sum F1.
inline constexpr int f1_exact_max_tau = 60;
// Raw probabilities outside [-slack, 1 + slack] are numerical failures.
inline constexpr double probability_slack = 1e-6;

enum class DelayMethod
{
    closed_form,
    general_integral,
};

ExtendedReal local_delay(const DelayQuery& q, DelayMethod method = DelayMethod::closed_form);

// E_Phi[P_h[Delta > tau | Phi]] through the binomial alternating sum,
// evaluated at 50 significant digits.
double f1(int tau, const DelayQuery& q);
// F1(0), ..., F1(cap) sharing one set of interference functionals.
std::vector<double> f1_curve(int cap, const DelayQuery& q);

double packet_loss(const DelayQuery& q);

// phi_Z(t) = E[P_cov^{it}]; complex t reaches the moments (t = -i, -2i) and
// the Laplace-inversion abscissae. Defective under SIR+ASNR: phi_Z(0) = 1 - P_e.
Complex char_fn(Complex t, const DelayQuery& q);

// P[Z <= z] by Gil-Pelaez inversion, including the mass P_e at -inf.
double gil_pelaez_cdf(double z, const DelayQuery& q);

double f2_gilpelaez(double T, const DelayQuery& q);
double f3_gilpelaez(double x, int tau, const DelayQuery& q);

struct DelaySumReport
{
    ExtendedReal value = ExtendedReal::finite(0.0); // partial sum, or infinite when diverging
    double partial_sum = 0.0;
    int cap = 0;
    // Power-law fit F1(tau) ~ C tau^-exponent over the last octave of terms.
    double decay_exponent = 0.0;
    // Estimated remainder sum_{tau > cap} F1(tau); +inf when exponent <= 1.
    double tail_estimate = 0.0;
    bool diverging = false;
};

// Partial sum of F1 up to `cap` with a tail report.
DelaySumReport local_delay_from_f1(const DelayQuery& q, int cap);

// Validates raw in [-slack, 1 + slack] and clamps to [0, 1].
double checked_probability(double raw, const char* what);

// 1 - x^(1/tau) without cancellation.
double f3_coverage_level(double x, int tau);

} // namespace delaygeom
