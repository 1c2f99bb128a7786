#include "delaygeom/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "delaygeom/errors.hpp"
#include "delaygeom/parallel.hpp"

namespace delaygeom
{
namespace
{
constexpr double pi = std::numbers::pi;
constexpr double z95 = 1.959963984540054;
constexpr int max_resample_attempts = 64;

EstimateWithCI mean_ci(const std::vector<double>& values)
{
    EstimateWithCI est;
    est.n = values.size();
    if (values.empty())
        return est;
    const double n = static_cast<double>(values.size());
    est.value = pairwise_sum(values) / n;
    if (values.size() > 1)
    {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            sq[i] = (values[i] - est.value) * (values[i] - est.value);
        est.half_width_95 = z95 * std::sqrt(pairwise_sum(sq) / (n - 1) / n);
    }
    return est;
}

struct Point
{
    double x;
    double y;
};

// Uniform grid over the window for nearest-BS queries.
class BsGrid
{
  public:
    BsGrid(const std::vector<Point>& bs, double radius) : bs_(bs), radius_(radius)
    {
        side_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(bs.size()))));
        cell_ = 2 * radius / side_;
        cells_.resize(static_cast<std::size_t>(side_) * side_);
        for (std::size_t i = 0; i < bs.size(); ++i)
            cells_[index(cell_of(bs[i].x), cell_of(bs[i].y))].push_back(i);
    }

    std::size_t nearest(Point p) const
    {
        const int cx = cell_of(p.x);
        const int cy = cell_of(p.y);
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int ring = 0; ring <= side_; ++ring)
        {
            for (int ix = cx - ring; ix <= cx + ring; ++ix)
            {
                for (int iy = cy - ring; iy <= cy + ring; ++iy)
                {
                    if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring)
                        continue;
                    if (ix < 0 || iy < 0 || ix >= side_ || iy >= side_)
                        continue;
                    for (std::size_t j : cells_[index(ix, iy)])
                    {
                        double dx = bs_[j].x - p.x;
                        double dy = bs_[j].y - p.y;
                        double d2 = dx * dx + dy * dy;
                        if (d2 < best_d2)
                        {
                            best_d2 = d2;
                            best = j;
                        }
                    }
                }
            }
            double reach = ring * cell_;
            if (best_d2 <= reach * reach)
                break;
        }
        return best;
    }

  private:
    int cell_of(double v) const
    {
        int c = static_cast<int>(std::floor((v + radius_) / cell_));
        return std::clamp(c, 0, side_ - 1);
    }
    std::size_t index(int ix, int iy) const
    {
        return static_cast<std::size_t>(ix) * side_ + iy;
    }

    const std::vector<Point>& bs_;
    double radius_;
    int side_;
    double cell_;
    std::vector<std::vector<std::size_t>> cells_;
};

// Path gains r^-alpha of the serving BS and interferers, computed once.
struct SlotKernel
{
    double serving_gain;
    std::vector<double> interferer_gain;
    bool asnr_ok = true;
    double gamma;
    double noise_over_power; // W K / P, zero unless SINR
};

SlotKernel make_kernel(const NetworkRealization& real, const CoverageCriterion& criterion,
                       const NetworkParams& params)
{
    SlotKernel k;
    k.serving_gain = std::pow(real.r0, -params.alpha);
    k.interferer_gain.reserve(real.interferers.size());
    for (double r : real.interferers)
        k.interferer_gain.push_back(std::pow(r, -params.alpha));
    k.gamma = decoding_threshold(criterion);
    k.noise_over_power = 0.0;
    if (std::holds_alternative<Sinr>(criterion))
        k.noise_over_power = params.noise_power * params.path_loss_k / params.tx_power;
    if (const auto* c = std::get_if<SirAsnr>(&criterion))
    {
        // average SNR P / (K r0^alpha W) against theta, no fading
        double asnr = params.tx_power * k.serving_gain
                      / (params.path_loss_k * params.noise_power);
        k.asnr_ok = params.noise_power == 0 || asnr >= c->theta;
    }
    return k;
}

// Signal and interference are both scaled by K / P.
bool run_slot(const SlotKernel& k, CounterRng& rng)
{
    if (!k.asnr_ok)
        return false;
    double signal = rng.exponential() * k.serving_gain;
    double interference = 0.0;
    for (double g : k.interferer_gain)
        interference += rng.exponential() * g;
    return signal >= k.gamma * (interference + k.noise_over_power);
}
} // namespace

void SimConfig::validate() const
{
    if (!(window_radius > 0))
        throw DomainError("simulation: window_radius must be > 0");
    if (n_realizations < 1 || n_slots < 1)
        throw DomainError("simulation: realization and slot counts must be >= 1");
}

SimConfig SimConfig::defaults(const NetworkParams& params)
{
    params.validate();
    SimConfig cfg;
    cfg.window_radius = std::sqrt(default_window_bs / (pi * params.lambda_bs));
    return cfg;
}

NetworkRealization sample_realization(const NetworkParams& params, const SimConfig& cfg,
                                      std::size_t index, std::size_t* resamples)
{
    params.validate();
    cfg.validate();
    const bool voronoi = cfg.activity_mode == ActivityMode::voronoi;
    const double load = active_probability(params.lambda_bs, params.lambda_mt);
    const double radius = cfg.window_radius;

    for (int attempt = 0; attempt < max_resample_attempts; ++attempt)
    {
        // Radial generation: squared distances are Poisson arrival times in
        // units of 1 / (pi lambda), so windows nest under a fixed seed.
        CounterRng rng(cfg.master_seed, purpose_geometry + 16 * attempt, index);
        std::vector<double> dist;
        std::vector<double> thin;
        std::vector<double> angle;
        double area = 0.0;
        while (true)
        {
            area += rng.exponential();
            double r = std::sqrt(area / (pi * params.lambda_bs));
            if (r > radius)
                break;
            dist.push_back(r);
            thin.push_back(rng.uniform());
            if (voronoi)
                angle.push_back(2 * pi * rng.uniform());
        }
        if (dist.empty())
        {
            if (resamples)
                ++*resamples;
            continue;
        }

        std::vector<char> active(dist.size(), 0);
        active[0] = 1;
        if (!voronoi)
        {
            for (std::size_t i = 1; i < dist.size(); ++i)
                active[i] = thin[i] < load;
        }
        else
        {
            std::vector<Point> bs(dist.size());
            for (std::size_t i = 0; i < dist.size(); ++i)
                bs[i] = {dist[i] * std::cos(angle[i]), dist[i] * std::sin(angle[i])};
            BsGrid grid(bs, radius);
            CounterRng mt(cfg.master_seed, purpose_mt + 16 * attempt, index);
            double mt_area = 0.0;
            while (true)
            {
                mt_area += mt.exponential();
                double rho = std::sqrt(mt_area / (pi * params.lambda_mt));
                if (rho > radius)
                    break;
                double phi = 2 * pi * mt.uniform();
                active[grid.nearest({rho * std::cos(phi), rho * std::sin(phi)})] = 1;
            }
        }

        NetworkRealization real;
        real.r0 = dist[0];
        for (std::size_t i = 1; i < dist.size(); ++i)
        {
            // ties have probability zero but would break strict ordering
            if (active[i] && dist[i] > real.r0
                && (real.interferers.empty() || dist[i] > real.interferers.back()))
                real.interferers.push_back(dist[i]);
        }
        return real;
    }
    throw NumericalError("simulation: window stayed empty after repeated resampling");
}

double pcov_oracle(const NetworkRealization& real, const CoverageCriterion& criterion,
                   const NetworkParams& params)
{
    return conditional_coverage(real, criterion, params);
}

bool simulate_slot(const NetworkRealization& real, const CoverageCriterion& criterion,
                   const NetworkParams& params, CounterRng& rng)
{
    return run_slot(make_kernel(real, criterion, params), rng);
}

SlotOutcome simulate_delay_slots(const NetworkRealization& real,
                                 const CoverageCriterion& criterion,
                                 const NetworkParams& params, CounterRng& rng, std::size_t cap)
{
    if (cap < 1)
        throw DomainError("simulate_delay_slots: cap must be >= 1");
    const SlotKernel kernel = make_kernel(real, criterion, params);
    for (std::size_t slot = 1; slot <= cap; ++slot)
    {
        if (run_slot(kernel, rng))
            return {slot, false};
    }
    return {cap, true};
}

CoverageSample simulate_coverage(const NetworkParams& params, const CoverageCriterion& criterion,
                                 const SimConfig& cfg)
{
    params.validate();
    validate(criterion);
    cfg.validate();
    const std::size_t n = cfg.n_realizations;
    CoverageSample s;
    s.mode = cfg.fading_mode;
    s.n_slots = cfg.n_slots;
    s.r0.resize(n);
    s.n_interferers.resize(n);
    s.pcov.resize(n);
    std::vector<std::size_t> resampled(n, 0);
    const bool slots = cfg.fading_mode == FadingMode::slot_level;
    if (slots)
    {
        s.first_success.resize(n);
        s.censored.resize(n);
    }

    parallel_for(
        n,
        [&](std::size_t i) {
            NetworkRealization real = sample_realization(params, cfg, i, &resampled[i]);
            s.r0[i] = real.r0;
            s.n_interferers[i] = real.interferers.size();
            if (!slots)
            {
                s.pcov[i] = std::exp(log_conditional_coverage(real, criterion, params));
                return;
            }
            const SlotKernel kernel = make_kernel(real, criterion, params);
            CounterRng rng(cfg.master_seed, purpose_fading, i);
            std::size_t successes = 0;
            std::size_t first = 0;
            for (std::size_t slot = 1; slot <= cfg.n_slots; ++slot)
            {
                if (i % 64 == 0 && slot % 1024 == 0 && cfg.cancel
                    && cfg.cancel->load(std::memory_order_relaxed))
                    throw Cancelled();
                if (run_slot(kernel, rng))
                {
                    ++successes;
                    if (first == 0)
                        first = slot;
                }
            }
            s.pcov[i] = static_cast<double>(successes) / static_cast<double>(cfg.n_slots);
            s.censored[i] = first == 0;
            s.first_success[i] = first == 0 ? cfg.n_slots : first;
        },
        cfg.cancel);
    for (std::size_t r : resampled)
        s.resampled += r;
    return s;
}

EstimateWithCI estimate_f1(int tau, const CoverageSample& sample)
{
    if (tau < 0)
        throw DomainError("estimate_f1: tau must be >= 0");
    std::vector<double> v(sample.size());
    if (sample.mode == FadingMode::semi_analytic)
    {
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = tau == 0 ? 1.0 : std::exp(tau * std::log1p(-sample.pcov[i]));
    }
    else
    {
        if (static_cast<std::size_t>(tau) >= sample.n_slots)
            throw DomainError("estimate_f1: tau must be below the slot cap");
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = (sample.censored[i] || sample.first_success[i] > static_cast<std::size_t>(tau))
                       ? 1.0
                       : 0.0;
    }
    auto est = mean_ci(v);
    if (!sample.censored.empty())
        est.censored = static_cast<std::size_t>(
            std::count(sample.censored.begin(), sample.censored.end(), 1));
    return est;
}

EstimateWithCI estimate_f2(double T, const CoverageSample& sample)
{
    if (!(T >= 1))
        throw DomainError("estimate_f2: T must be >= 1");
    std::vector<double> v(sample.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = sample.pcov[i] * T <= 1.0 ? 1.0 : 0.0;
    return mean_ci(v);
}

EstimateWithCI estimate_f3(double x, int tau, const CoverageSample& sample)
{
    if (!(x >= 0 && x <= 1))
        throw DomainError("estimate_f3: x must be in [0, 1]");
    if (tau < 0)
        throw DomainError("estimate_f3: tau must be >= 0");
    std::vector<double> v(sample.size());
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        double tail = tau == 0 ? 1.0 : std::exp(tau * std::log1p(-sample.pcov[i]));
        v[i] = tail >= x ? 1.0 : 0.0;
    }
    return mean_ci(v);
}

EstimateWithCI estimate_local_delay(const CoverageSample& sample)
{
    std::vector<double> v;
    v.reserve(sample.size());
    std::size_t unusable = 0;
    for (std::size_t i = 0; i < sample.size(); ++i)
    {
        if (sample.mode == FadingMode::semi_analytic)
        {
            if (sample.pcov[i] > 0)
                v.push_back(1.0 / sample.pcov[i]);
            else
                ++unusable;
        }
        else
        {
            if (sample.censored[i])
                ++unusable;
            else
                v.push_back(static_cast<double>(sample.first_success[i]));
        }
    }
    EstimateWithCI est = mean_ci(v);
    est.censored = unusable;
    if (sample.mode == FadingMode::semi_analytic && unusable > 0)
    {
        // users that are never covered have infinite expected delay
        est.value = std::numeric_limits<double>::infinity();
        est.half_width_95 = std::numeric_limits<double>::infinity();
        est.heavy_tail = true;
        return est;
    }
    if (v.size() >= 2)
    {
        const double total = pairwise_sum(v);
        const double largest = *std::max_element(v.begin(), v.end());
        const std::size_t half = v.size() / 2;
        const double first = pairwise_sum(std::span(v).first(half)) / half;
        const double second = pairwise_sum(std::span(v).subspan(half)) / (v.size() - half);
        est.heavy_tail = largest > 0.1 * total
                         || std::abs(first - second) > 0.1 * est.value;
    }
    return est;
}

EstimateWithCI estimate_ploss(const CoverageSample& sample)
{
    std::vector<double> v(sample.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = sample.pcov[i] == 0.0 ? 1.0 : 0.0;
    return mean_ci(v);
}

EstimateWithCI estimate_pcov_mean(const CoverageSample& sample)
{
    return mean_ci(sample.pcov);
}

EstimateWithCI estimate_pcov_variance(const CoverageSample& sample)
{
    EstimateWithCI est;
    est.n = sample.size();
    if (est.n < 2)
        return est;
    const double n = static_cast<double>(est.n);
    const double mean = pairwise_sum(sample.pcov) / n;
    std::vector<double> d2(est.n);
    std::vector<double> d4(est.n);
    for (std::size_t i = 0; i < est.n; ++i)
    {
        double d = sample.pcov[i] - mean;
        d2[i] = d * d;
        d4[i] = d2[i] * d2[i];
    }
    const double m2 = pairwise_sum(d2) / n;
    const double m4 = pairwise_sum(d4) / n;
    est.value = m2 * n / (n - 1);
    est.half_width_95 = z95 * std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    return est;
}

EstimateWithCI estimate_f1(int tau, const NetworkParams& params,
                           const CoverageCriterion& criterion, const SimConfig& cfg)
{
    return estimate_f1(tau, simulate_coverage(params, criterion, cfg));
}

EstimateWithCI estimate_f2(double T, const NetworkParams& params,
                           const CoverageCriterion& criterion, const SimConfig& cfg)
{
    return estimate_f2(T, simulate_coverage(params, criterion, cfg));
}

EstimateWithCI estimate_f3(double x, int tau, const NetworkParams& params,
                           const CoverageCriterion& criterion, const SimConfig& cfg)
{
    return estimate_f3(x, tau, simulate_coverage(params, criterion, cfg));
}

EstimateWithCI estimate_local_delay(const NetworkParams& params,
                                    const CoverageCriterion& criterion, const SimConfig& cfg)
{
    return estimate_local_delay(simulate_coverage(params, criterion, cfg));
}

EstimateWithCI estimate_ploss(const NetworkParams& params, const CoverageCriterion& criterion,
                              const SimConfig& cfg)
{
    return estimate_ploss(simulate_coverage(params, criterion, cfg));
}

} // namespace delaygeom
