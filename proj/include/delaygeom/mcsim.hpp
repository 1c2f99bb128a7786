#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "delaygeom/model.hpp"
#include "delaygeom/rng.hpp"

namespace delaygeom
{

enum class ActivityMode
{
    independent_thinning,
    voronoi,
};

enum class FadingMode
{
    semi_analytic, // exact conditional coverage per realization
    slot_level,    // per-slot Rayleigh draws
};

// Stream purposes for CounterRng; resampled geometry adds 16 per attempt.
inline constexpr std::uint32_t purpose_geometry = 1;
inline constexpr std::uint32_t purpose_mt = 2;
inline constexpr std::uint32_t purpose_fading = 3;

// Expected BS count in the default window.
inline constexpr double default_window_bs = 1000.0;

struct SimConfig
{
    double window_radius = 1.0;
    std::size_t n_realizations = 5000;
    // Transmissions simulated per realization in slot-level mode; also the
    // censoring cap of the slot count.
    std::size_t n_slots = 5000;
    std::uint64_t master_seed = 0x5eed2024;
    ActivityMode activity_mode = ActivityMode::independent_thinning;
    FadingMode fading_mode = FadingMode::semi_analytic;
    const std::atomic<bool>* cancel = nullptr;

    void validate() const;

    // Window holding default_window_bs expected BSs.
    static SimConfig defaults(const NetworkParams& params);
};

struct EstimateWithCI
{
    double value = 0.0;
    double half_width_95 = 0.0;
    std::size_t n = 0;
    // Local delay only: running mean failed to stabilize.
    bool heavy_tail = false;
    // Slot-level only: realizations without a success within n_slots.
    std::size_t censored = 0;
};

// Realization `index` of the configured network; `resamples` receives the
// number of redraws caused by an empty window.
NetworkRealization sample_realization(const NetworkParams& params, const SimConfig& cfg,
                                      std::size_t index, std::size_t* resamples = nullptr);

double pcov_oracle(const NetworkRealization& real, const CoverageCriterion& criterion,
                   const NetworkParams& params);

struct SlotOutcome
{
    std::size_t slots = 0; // 1-based index of the first success, or the cap
    bool censored = false;
};

// Success of one slot with fresh Rayleigh fading on every link.
bool simulate_slot(const NetworkRealization& real, const CoverageCriterion& criterion,
                   const NetworkParams& params, CounterRng& rng);

SlotOutcome simulate_delay_slots(const NetworkRealization& real,
                                 const CoverageCriterion& criterion,
                                 const NetworkParams& params, CounterRng& rng, std::size_t cap);

//---------------------------------------------------------------------------//
/*!
 * Per-realization coverage draws shared by all estimators.
 */
struct CoverageSample
{
    FadingMode mode = FadingMode::semi_analytic;
    std::size_t n_slots = 0;
    std::vector<double> r0;
    std::vector<std::size_t> n_interferers;
    // Exact conditional coverage, or the success fraction over n_slots.
    std::vector<double> pcov;
    // Slot-level only: first success index (1-based); n_slots when censored.
    std::vector<std::size_t> first_success;
    std::vector<char> censored;
    std::size_t resampled = 0;

    std::size_t size() const { return pcov.size(); }
};

CoverageSample simulate_coverage(const NetworkParams& params, const CoverageCriterion& criterion,
                                 const SimConfig& cfg);

EstimateWithCI estimate_f1(int tau, const CoverageSample& sample);
EstimateWithCI estimate_f2(double T, const CoverageSample& sample);
EstimateWithCI estimate_f3(double x, int tau, const CoverageSample& sample);
EstimateWithCI estimate_local_delay(const CoverageSample& sample);
EstimateWithCI estimate_ploss(const CoverageSample& sample);
EstimateWithCI estimate_pcov_mean(const CoverageSample& sample);
EstimateWithCI estimate_pcov_variance(const CoverageSample& sample);

EstimateWithCI estimate_f1(int tau, const NetworkParams& params,
                           const CoverageCriterion& criterion, const SimConfig& cfg);
EstimateWithCI estimate_f2(double T, const NetworkParams& params,
                           const CoverageCriterion& criterion, const SimConfig& cfg);
EstimateWithCI estimate_f3(double x, int tau, const NetworkParams& params,
                           const CoverageCriterion& criterion, const SimConfig& cfg);
EstimateWithCI estimate_local_delay(const NetworkParams& params,
                                    const CoverageCriterion& criterion, const SimConfig& cfg);
EstimateWithCI estimate_ploss(const NetworkParams& params, const CoverageCriterion& criterion,
                              const SimConfig& cfg);

} // namespace delaygeom
