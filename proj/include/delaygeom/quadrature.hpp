#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <queue>
#include <sstream>
#include <type_traits>
#include <vector>

#include "delaygeom/errors.hpp"

namespace delaygeom
{

struct QuadOptions
{
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
    // Divergence detector for the doubling rule: the partial integral must
    // exceed the bound after growing monotonically over this many doublings.
    double divergence_bound = 1e12;
    int divergence_doublings = 8;
    // Panel cap for the oscillatory rule.
    int max_panels = 4000;
    const std::atomic<bool>* cancel = nullptr;

    void validate() const
    {
        if (!(abs_tol > 0) || !(rel_tol > 0))
            throw DomainError("quadrature tolerances must be > 0");
        if (max_subdivisions < 1)
            throw DomainError("max_subdivisions must be >= 1");
    }

    void check_cancelled() const
    {
        if (cancel && cancel->load(std::memory_order_relaxed))
            throw Cancelled();
    }

    double target(double magnitude) const
    {
        return std::max(abs_tol, rel_tol * magnitude);
    }
};

enum class QuadStatus
{
    converged,
    diverged,
};

template<class T>
struct QuadResult
{
    T value{};
    double error = 0.0;
    QuadStatus status = QuadStatus::converged;
    int evaluations = 0;

    bool diverged() const { return status == QuadStatus::diverged; }
};

// How the semi-infinite tail of [0, inf) is handled.
enum class TailRule
{
    mapped,      // x = scale * w / (1 - w), absolutely integrable integrands
    doubling,    // panels [0,s], [s,2s], [2s,4s], ... with divergence detection
    oscillatory, // half-period panels of width `scale`, Wynn epsilon acceleration
};

struct TailSpec
{
    TailRule rule = TailRule::mapped;
    double scale = 1.0;
};

namespace detail
{
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// 7-point Gauss weights at kronrod_nodes[1], [3], [5], [7]
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v)
{
    return std::abs(v);
}
inline double magnitude(const std::complex<double>& v)
{
    return std::abs(v);
}
inline bool finite(double v)
{
    return std::isfinite(v);
}
inline bool finite(const std::complex<double>& v)
{
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

template<class T>
struct Segment
{
    double a;
    double b;
    T value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

template<class T, class F>
Segment<T> kronrod15(F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T fc = f(center);
    T kronrod = fc * kronrod_weights[7];
    T gauss = fc * gauss_weights[3];
    for (int j = 0; j < 7; ++j)
    {
        double dx = half * kronrod_nodes[j];
        T f1 = f(center - dx);
        T f2 = f(center + dx);
        kronrod += (f1 + f2) * kronrod_weights[j];
        if (j % 2 == 1)
            gauss += (f1 + f2) * gauss_weights[j / 2];
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, magnitude(kronrod - gauss)};
}
} // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Adaptive Gauss-Kronrod (7/15) on a finite interval.
 *
 * A non-finite panel value is returned immediately with status `diverged`;
 * exhausting the subdivision budget throws NumericalError.
 */
template<class F>
auto quad_finite(F&& f, double a, double b, const QuadOptions& opts)
    -> QuadResult<std::decay_t<decltype(f(0.0))>>
{
    using T = std::decay_t<decltype(f(0.0))>;
    QuadResult<T> result;
    if (a == b)
        return result;

    std::priority_queue<detail::Segment<T>> heap;
    auto first = detail::kronrod15<T>(f, a, b);
    result.evaluations = 15;
    T total = first.value;
    double total_error = first.error;
    heap.push(first);

    int subdivisions = 1;
    while (true)
    {
        if (!detail::finite(total) || !std::isfinite(total_error))
        {
            result.value = total;
            result.error = INFINITY;
            result.status = QuadStatus::diverged;
            return result;
        }
        if (total_error <= opts.target(detail::magnitude(total)))
            break;
        if (subdivisions >= opts.max_subdivisions)
        {
            std::ostringstream msg;
            msg << "adaptive quadrature on [" << a << ", " << b
                << "] did not converge: estimate " << detail::magnitude(total)
                << ", error " << total_error << " after " << subdivisions
                << " subdivisions";
            throw NumericalError(msg.str());
        }
        opts.check_cancelled();

        auto worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::kronrod15<T>(f, worst.a, mid);
        auto right = detail::kronrod15<T>(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;

        // Refresh the running sums periodically to bound round-off drift.
        if (subdivisions % 64 == 0)
        {
            auto copy = heap;
            total = T{};
            total_error = 0.0;
            while (!copy.empty())
            {
                total += copy.top().value;
                total_error += copy.top().error;
                copy.pop();
            }
        }
    }
    result.value = total;
    result.error = total_error;
    return result;
}

namespace detail
{
// Wynn epsilon extrapolation over the tail of a sequence of partial sums.
inline double wynn_epsilon(const std::vector<double>& sums, int max_order)
{
    int n = static_cast<int>(sums.size());
    int m = std::min(max_order, (n - 1) / 2);
    if (m <= 0)
        return sums.back();
    std::vector<double> prev(2 * m + 2, 0.0);
    std::vector<double> cur(sums.end() - (2 * m + 1), sums.end());
    double best = cur.back();
    for (int k = 1; k <= 2 * m; ++k)
    {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t j = 0; j + 1 < cur.size(); ++j)
        {
            double diff = cur[j + 1] - cur[j];
            if (diff == 0.0)
                return k % 2 == 1 ? cur[j + 1] : best;
            next[j] = prev[j + 1] + 1.0 / diff;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0)
            best = cur.back();
    }
    return best;
}
} // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Integral of f over [0, inf).
 *
 * The doubling rule reports `diverged` when the partial integral becomes
 * non-finite, or exceeds `divergence_bound` after growing monotonically for
 * `divergence_doublings` consecutive panels.
 */
template<class F>
auto quad_semi_infinite(F&& f, const QuadOptions& opts, TailSpec tail = {})
    -> QuadResult<std::decay_t<decltype(f(0.0))>>
{
    using T = std::decay_t<decltype(f(0.0))>;
    opts.validate();
    if (!(tail.scale > 0))
        throw DomainError("tail scale must be > 0");

    switch (tail.rule)
    {
        case TailRule::mapped: {
            const double s = tail.scale;
            auto mapped = [&](double w) -> T {
                double one_minus = 1.0 - w;
                double x = s * w / one_minus;
                T v = f(x);
                if (v == T{})
                    return v;
                return v * (s / (one_minus * one_minus));
            };
            auto r = quad_finite(mapped, 0.0, 1.0, opts);
            if (r.diverged())
                throw NumericalError("semi-infinite quadrature produced a non-finite value");
            return r;
        }
        case TailRule::doubling: {
            if constexpr (!std::is_same_v<T, double>)
            {
                throw DomainError("doubling tail rule requires a real integrand");
            }
            else
            {
                QuadResult<T> result;
                double lo = 0.0;
                double hi = tail.scale;
                int small_panels = 0;
                int growing = 0;
                double previous = 0.0;
                for (int panel = 0; panel < 1100; ++panel)
                {
                    opts.check_cancelled();
                    QuadOptions inner = opts;
                    inner.abs_tol = 0.1 * opts.abs_tol;
                    auto piece = quad_finite(f, lo, hi, inner);
                    result.evaluations += piece.evaluations;
                    result.value += piece.value;
                    result.error += piece.error;
                    if (piece.diverged() || !std::isfinite(result.value))
                    {
                        result.value = INFINITY;
                        result.status = QuadStatus::diverged;
                        return result;
                    }
                    growing = (panel > 0 && result.value > previous && piece.value > 0)
                                  ? growing + 1
                                  : 0;
                    previous = result.value;
                    if (result.value > opts.divergence_bound
                        && growing >= opts.divergence_doublings)
                    {
                        result.status = QuadStatus::diverged;
                        return result;
                    }
                    if (std::abs(piece.value) <= opts.target(std::abs(result.value)))
                    {
                        if (++small_panels >= 2)
                            return result;
                    }
                    else
                    {
                        small_panels = 0;
                    }
                    lo = hi;
                    hi *= 2;
                }
                throw NumericalError("doubling quadrature: panel cap reached");
            }
        }
        case TailRule::oscillatory: {
            if constexpr (!std::is_same_v<T, double>)
            {
                throw DomainError("oscillatory tail rule requires a real integrand");
            }
            else
            {
                QuadResult<T> result;
                const double h = tail.scale;
                std::vector<double> sums;
                double running = 0.0;
                double last_estimate = NAN;
                int settled = 0;
                QuadOptions inner = opts;
                inner.abs_tol = 0.01 * opts.abs_tol;
                for (int panel = 0; panel < opts.max_panels; ++panel)
                {
                    opts.check_cancelled();
                    auto piece = quad_finite(f, panel * h, (panel + 1) * h, inner);
                    result.evaluations += piece.evaluations;
                    if (piece.diverged())
                        throw NumericalError("oscillatory quadrature: non-finite panel");
                    running += piece.value;
                    sums.push_back(running);
                    if (sums.size() < 5)
                        continue;
                    double estimate = detail::wynn_epsilon(sums, 8);
                    double change = std::abs(estimate - last_estimate);
                    if (change <= opts.target(std::abs(estimate)))
                    {
                        if (++settled >= 3)
                        {
                            result.value = estimate;
                            result.error = change;
                            return result;
                        }
                    }
                    else
                    {
                        settled = 0;
                    }
                    last_estimate = estimate;
                }
                std::ostringstream msg;
                msg << "oscillatory quadrature did not settle after " << opts.max_panels
                    << " panels; last estimate " << last_estimate;
                throw NumericalError(msg.str());
            }
        }
    }
    return {};
}

} // namespace delaygeom
