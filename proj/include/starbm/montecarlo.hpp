// montecarlo.hpp — path-average estimators on top of the simulation engine.
//
// Estimators return an Estimate holding the sample mean, its standard error,
// and (when the caller supplies one) a closed-form reference value, so
// checks read as z-scores.  Per-path results are stored by path index and
// reduced with a pairwise sum: the reported numbers are bit-identical no
// matter how many worker threads produced them.
//
// Time-truncation bias of the discounted integrals is tracked explicitly
// (Estimate::bias_bound); callers should insist on bias_bound << se rather
// than trusting a horizon chosen by eye.
#pragma once

#include <starbm/process.hpp>
#include <starbm/stats.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace starbm {

// Refinement profile for integral statistics: the bridge top-up keeps record
// *levels* exact in law at any resolution, so deep near-record bisection only
// sharpens the time attribution of climbs.  1e-4 keeps that attribution error
// an order of magnitude under the readout grid.
inline RefineParams integral_refine() {
    RefineParams rp;
    rp.dt_fine = 1e-4;
    rp.log_miss_tol = 9.2; // bisect while the bridge may cross at odds > 1e-4
    return rp;
}

struct McSettings {
    std::size_t n_paths = 100'000;
    double horizon = 12.0;
    double dt = 1e-3;
    double truncation_eps = 0.0; // jump-measure truncation fed to the engine
    std::uint64_t seed = 1;
    unsigned threads = 1;
    RefineParams refine = integral_refine();
};

struct Estimate {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
    std::size_t n = 0;
    double reference = std::numeric_limits<double>::quiet_NaN();
    double bias_bound = 0.0; // deterministic truncation part, not in se

    double z() const { return (mean - reference) / se; }
};

namespace detail {

template <class Body> // Body: void(std::size_t path)
inline void run_paths(std::size_t n, unsigned threads, Body&& body) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline Estimate reduce(std::span<const double> per_path) {
    const auto m = moments(per_path);
    Estimate e;
    e.mean = m.mean;
    e.se = m.se();
    e.n = m.n;
    return e;
}

} // namespace detail

// lambda-resolvent applied to g at x0: per-path trapezoid of e^{-lambda t}
// g(X_t) over the grid, zero once the path is dead.  g_sup bounds |g| and
// feeds the discount-tail bias bound.
template <class G>
Estimate estimate_resolvent(const BoundaryParams& p, GraphPoint x0, double lambda, G&& g,
                            const McSettings& s, double g_sup = 1.0) {
    if (!(lambda > 0.0)) throw std::invalid_argument("resolvent: lambda must be positive");
    if (lambda * s.horizon < 8.0)
        throw std::invalid_argument("resolvent: horizon too short for the discount tail");
    std::vector<double> discount;
    {
        const std::size_t n_nodes = static_cast<std::size_t>(std::llround(s.horizon / s.dt)) + 1;
        discount.resize(n_nodes);
        for (std::size_t j = 0; j < n_nodes; ++j)
            discount[j] = std::exp(-lambda * s.dt * static_cast<double>(j));
    }
    std::vector<double> per_path(s.n_paths);
    detail::run_paths(s.n_paths, s.threads, [&](std::size_t i) {
        const auto tr = simulate_full(p, s.truncation_eps, x0, s.horizon, s.dt,
                                      Seed{s.seed}, static_cast<std::uint32_t>(i), s.refine);
        double acc = 0.0;
        const std::size_t alive = std::min(tr.lifetime_index, tr.size());
        for (std::size_t j = 0; j < alive; ++j) {
            const double w = (j == 0 || j + 1 == tr.size()) ? 0.5 : 1.0;
            acc += w * discount[j] * g(tr.x[j]);
        }
        per_path[i] = acc * s.dt;
    });
    Estimate e = detail::reduce(per_path);
    e.bias_bound = std::exp(-lambda * s.horizon) * g_sup / lambda;
    if (e.bias_bound > e.se / 3.0)
        throw std::runtime_error("resolvent: discount tail exceeds the se budget; raise horizon");
    return e;
}

// lambda-potential of the boundary clock at x0: per-path Stieltjes sum of
// e^{-lambda t} dK with midpoint discounts.  The tail bound extrapolates the
// clock's measured growth over the final unit of time.
inline Estimate estimate_potential(const BoundaryParams& p, GraphPoint x0, double lambda,
                                   const McSettings& s) {
    if (!(lambda > 0.0)) throw std::invalid_argument("potential: lambda must be positive");
    if (lambda * s.horizon < 8.0)
        throw std::invalid_argument("potential: horizon too short for the discount tail");
    const std::size_t n_nodes = static_cast<std::size_t>(std::llround(s.horizon / s.dt)) + 1;
    std::vector<double> discount(n_nodes > 1 ? n_nodes - 1 : 0);
    for (std::size_t j = 0; j + 1 < n_nodes; ++j)
        discount[j] = std::exp(-lambda * s.dt * (static_cast<double>(j) + 0.5));
    std::vector<double> per_path(s.n_paths), tail_rate(s.n_paths);
    detail::run_paths(s.n_paths, s.threads, [&](std::size_t i) {
        const auto tr = simulate_full(p, s.truncation_eps, x0, s.horizon, s.dt,
                                      Seed{s.seed}, static_cast<std::uint32_t>(i), s.refine);
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < tr.size(); ++j)
            acc += discount[j] * (tr.local_time[j + 1] - tr.local_time[j]);
        per_path[i] = acc;
        const double t1 = std::max(0.0, s.horizon - 1.0);
        const std::size_t j1 = static_cast<std::size_t>(std::llround(t1 / s.dt));
        tail_rate[i] = tr.local_time.back() - tr.local_time[j1];
    });
    Estimate e = detail::reduce(per_path);
    const double rate = moments(tail_rate).mean;
    e.bias_bound = rate * std::exp(-lambda * s.horizon) / (1.0 - std::exp(-lambda));
    if (e.bias_bound > e.se / 3.0)
        throw std::runtime_error("potential: discount tail exceeds the se budget; raise horizon");
    return e;
}

// Terminal states of n paths at a fixed time, for distributional tests.
// state: edge index, or -1 center, -2 dead, -3 trapped at an edge infinity.
struct EndpointSamples {
    std::vector<int> state;
    std::vector<double> radial; // edge coordinate where state >= 0, else 0
};

inline EndpointSamples sample_states_at(const BoundaryParams& p, GraphPoint x0, double t,
                                        const McSettings& s, bool concatenated = false) {
    EndpointSamples out;
    out.state.resize(s.n_paths);
    out.radial.resize(s.n_paths);
    detail::run_paths(s.n_paths, s.threads, [&](std::size_t i) {
        const auto tr = concatenated
                            ? simulate_concatenation(p, x0, t, s.dt, Seed{s.seed},
                                                     static_cast<std::uint32_t>(i), s.refine)
                            : simulate_full(p, s.truncation_eps, x0, t, s.dt, Seed{s.seed},
                                            static_cast<std::uint32_t>(i), s.refine);
        const auto& gp = tr.x.back();
        int st = -2;
        double r = 0.0;
        switch (gp.kind) {
            case GraphPoint::Kind::Edge: st = gp.edge, r = gp.x; break;
            case GraphPoint::Kind::Center: st = -1; break;
            case GraphPoint::Kind::Cemetery: st = -2; break;
            case GraphPoint::Kind::EdgeInfinity: st = -3; break;
        }
        out.state[i] = st;
        out.radial[i] = r;
    });
    return out;
}

// First passage of the half-line reflected base motion to a fixed level,
// together with the boundary local time spent getting there.  The scan is
// chronological with exact cell-level event laws: a crossing of the target
// is drawn from the bridge crossing probability, the running record absorbs
// the exact bridge minimum, and a drawn crossing is localised by re-sampling
// the cell bridge at fine resolution conditioned on crossing (rejection).
// Only the placement inside a fine step (<= dt_fine/2) and sub-floor
// crossing odds (< 1e-8 per cell) are approximated.
//
// The cell treats the target crossing and the record minimum as independent
// draws; they interfere only when both have visible odds, which requires the
// path to straddle most of (0, level) inside one step -- odds below e^-10
// for the parameters used here.
struct ExitSample {
    double sigma;  // first time at the level
    double level_time; // boundary local time at sigma
};

namespace detail {

inline ExitSample sample_exit(double target, double dt_cell, double dt_fine, Seed seed,
                              std::uint32_t path) {
    RngStream rng(seed, "exit", path);
    const double sd = std::sqrt(dt_cell);
    double b0 = 0.0, m = 0.0, t0 = 0.0;
    const int n_sub = static_cast<int>(std::llround(dt_cell / dt_fine));
    for (;;) {
        const double b1 = b0 + sd * rng.normal();
        const double w0 = b0 + m, w1 = b1 + m;
        bool crossed = false;
        if (w1 >= target) {
            crossed = true;
        } else {
            const double pc = std::exp(-2.0 * (target - w0) * (target - w1) / dt_cell);
            if (pc >= 1e-8 && rng.uniform() < pc) crossed = true;
        }
        if (crossed) {
            // fine re-simulation of the cell bridge until it shows the
            // crossing; first sub-cell at or above the target wins
            for (long tries = 0; tries < 1'000'000; ++tries) {
                double bc = b0, tc = 0.0;
                for (int i = 0; i < n_sub; ++i) {
                    const double r = dt_cell - tc;
                    const double mean = bc + (b1 - bc) * dt_fine / r;
                    const double var = dt_fine * (r - dt_fine) / r;
                    const double bn = mean + (var > 0.0 ? std::sqrt(var) * rng.normal() : 0.0);
                    const double wa = bc + m, wb = bn + m;
                    bool hit = wb >= target;
                    if (!hit && wa < target) {
                        const double ps =
                            std::exp(-2.0 * (target - wa) * (target - wb) / dt_fine);
                        hit = ps >= 1e-12 && rng.uniform() < ps;
                    }
                    if (hit)
                        return {t0 + tc + 0.5 * dt_fine, m};
                    bc = bn;
                    tc += dt_fine;
                }
            }
            return {t0 + 0.5 * dt_cell, m}; // unreachable guard
        }
        // record update: exact bridge minimum of the cell
        const double gap = w0 - w1;
        const double min_w =
            0.5 * (w0 + w1 - std::sqrt(gap * gap - 2.0 * dt_cell * std::log(rng.uniform())));
        if (min_w < 0.0) m -= min_w;
        b0 = b1;
        t0 += dt_cell;
    }
}

} // namespace detail

// Exit statistics of the sticky/killed half-line motion through the level
// set {target}: mean exit time with and without stickiness, and the killing
// transform of the local time.  All three derive from one simulation set,
// since stickiness adds alpha * K deterministically and killing weights by
// e^{-gamma K}.
struct ExitStatistics {
    Estimate plain_exit;      // E sigma
    Estimate sticky_exit;     // E (sigma + alpha K(sigma))
    Estimate clock_transform; // E e^{-gamma K(sigma)}
};

inline ExitStatistics estimate_exit_stats(double target, double alpha, double gamma,
                                          const McSettings& s, double dt_fine = 1e-5) {
    if (!(target > 0.0)) throw std::invalid_argument("exit: target level must be positive");
    std::vector<double> plain(s.n_paths), sticky(s.n_paths), transform(s.n_paths);
    detail::run_paths(s.n_paths, s.threads, [&](std::size_t i) {
        const auto ex = detail::sample_exit(target, s.dt, dt_fine, Seed{s.seed},
                                            static_cast<std::uint32_t>(i));
        plain[i] = ex.sigma;
        sticky[i] = ex.sigma + alpha * ex.level_time;
        transform[i] = std::exp(-gamma * ex.level_time);
    });
    ExitStatistics out;
    out.plain_exit = detail::reduce(plain);
    out.plain_exit.reference = target * target;
    out.sticky_exit = detail::reduce(sticky);
    out.sticky_exit.reference = target * target + alpha * target;
    out.clock_transform = detail::reduce(transform);
    out.clock_transform.reference = 1.0 / (1.0 + target * gamma);
    return out;
}

} // namespace starbm
