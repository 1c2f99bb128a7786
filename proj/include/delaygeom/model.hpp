#pragma once

#include <string_view>
#include <variant>
#include <vector>

namespace delaygeom
{

//---------------------------------------------------------------------------//
/*!
 * Physical parameters of the downlink network, in linear SI units.
 *
 * Path loss is an attenuation: a BS at distance r delivers P h / (K r^alpha)
 * to the typical user.
 */
struct NetworkParams
{
    double lambda_bs = 0.0;   // BS density [1/m^2]
    double lambda_mt = 0.0;   // MT density [1/m^2]
    double alpha = 4.0;       // path-loss exponent, > 2
    double path_loss_k = 1.0; // path-loss constant K
    double tx_power = 1.0;    // P [W]
    double noise_power = 0.0; // W [W]

    void validate() const;

    // Simulation-setup defaults: alpha = 4, f_c = 2.1 GHz, N0 = -174 dBm/Hz,
    // B_W = 200 MHz, P = 43 dBm, lambda_MT = 1/(pi 50^2), lambda_BS = 0.1 lambda_MT.
    static NetworkParams defaults();
};

struct Sir
{
    double gamma = 1.0;
};

struct Sinr
{
    double gamma = 1.0;
};

struct SirAsnr
{
    double gamma = 1.0;
    double theta = 1.0; // ASNR detection threshold
};

using CoverageCriterion = std::variant<Sir, Sinr, SirAsnr>;

void validate(const CoverageCriterion& criterion);
double decoding_threshold(const CoverageCriterion& criterion);
std::string_view criterion_name(const CoverageCriterion& criterion);

// Same criterion kind with a different decoding threshold.
CoverageCriterion with_threshold(const CoverageCriterion& criterion, double gamma);

//---------------------------------------------------------------------------//
/*!
 * One fixed spatial draw seen from the typical user: serving distance plus the
 * ascending distances of the active interferers, all beyond r0.
 */
struct NetworkRealization
{
    double r0 = 0.0;
    std::vector<double> interferers;

    void validate() const;
};

double active_probability(double lambda_bs, double lambda_mt);

double nearest_distance_pdf(double r0, double lambda_bs);
double nearest_distance_cdf(double r0, double lambda_bs);

// r* = (P / (K W theta))^(1/alpha); +inf when the network is noiseless.
double asnr_radius(const SirAsnr& criterion, const NetworkParams& params);

double gate(double r0, const CoverageCriterion& criterion,
            const NetworkParams& params);

// log of the conditional coverage; -inf when the gate is closed.
double log_conditional_coverage(const NetworkRealization& realization,
                                const CoverageCriterion& criterion,
                                const NetworkParams& params);

double conditional_coverage(const NetworkRealization& realization,
                            const CoverageCriterion& criterion,
                            const NetworkParams& params);

double critical_threshold(double alpha, double load);

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

// K = (4 pi f_c / c)^2 with c = 3e8 m/s.
double path_loss_constant(double carrier_hz);
// W = N0 * B_W.
double noise_power(double n0_dbm_per_hz, double bandwidth_hz);

} // namespace delaygeom
