// sampler.hpp — path-level building blocks: Brownian drivers with adaptive
// record refinement, Poissonian jump trains, and subordinator assembly.
//
// The refined Brownian sampler is the workhorse.  It lays down a coarse
// lattice and bisects any cell whose Brownian bridge could plausibly touch
// the current running maximum of (-B ∨ 0), down to a fine resolution, using
// bridge midpoint draws.  The committed path is piecewise linear; its record
// structure — the generalized inverse of the running maximum, as a
// MonotonePath from reached level to time — is emitted exactly.  On top of
// the knots, each threatened cell draws its exact bridge maximum and records
// any overshoot as a vertical climb at a time inside the cell, so the record
// *levels* carry no discretization bias at all; only the time attribution
// within a cell is approximate.  Everything downstream operates exactly on
// this structure.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "graph.hpp"
#include "monotone.hpp"
#include "rng.hpp"

namespace starbm {

struct JumpList {
    std::vector<double> time; // strictly increasing, in (0, horizon]
    std::vector<double> size; // positive
    std::size_t count() const { return time.size(); }
};

// Homogeneous Poisson arrivals with rate tail.total(); sizes drawn from the
// tail by inversion.  The tail must be finite.
inline JumpList sample_compound_poisson(const EdgeTail& tail, double horizon,
                                        RngStream& rng) {
    const double rate = tail.total();
    if (!std::isfinite(rate)) throw std::invalid_argument("compound Poisson needs a finite tail");
    JumpList out;
    if (rate <= 0.0) return out;
    double t = rng.exponential(rate);
    while (t <= horizon) {
        out.time.push_back(t);
        out.size.push_back(tail.inverse(rng.uniform() * rate));
        t += rng.exponential(rate);
    }
    return out;
}

// Jumps of size > eps only: arrival rate tail.value(eps), sizes inverted from
// the tail restricted to (eps, ∞).  No compensation is applied.
inline JumpList sample_truncated_ppp(const EdgeTail& tail, double eps, double horizon,
                                     RngStream& rng) {
    if (!(eps > 0.0)) throw std::invalid_argument("truncation level must be positive");
    const double rate = tail.value(eps);
    if (!std::isfinite(rate)) throw std::invalid_argument("tail must be finite beyond eps");
    JumpList out;
    if (rate <= 0.0) return out;
    double t = rng.exponential(rate);
    while (t <= horizon) {
        out.time.push_back(t);
        out.size.push_back(tail.inverse(rng.uniform() * rate));
        t += rng.exponential(rate);
    }
    return out;
}

// U(u) = beta*u + sum of jumps up to u, as an exact piecewise-linear path
// with end_slope beta.
inline MonotonePath build_subordinator(double beta, const JumpList& jumps) {
    if (beta < 0.0) throw std::invalid_argument("subordinator drift must be >= 0");
    MonotonePath u;
    u.append(0.0, 0.0, 0.0);
    double acc = 0.0;
    for (std::size_t j = 0; j < jumps.count(); ++j) {
        const double lv = beta * jumps.time[j] + acc;
        acc += jumps.size[j];
        u.append(jumps.time[j], lv, beta * jumps.time[j] + acc);
    }
    u.end_slope = beta;
    return u;
}

// Values of x0 + B at i*dt for i = 0..n, n = round(horizon/dt).
inline std::vector<double> sample_brownian_grid(double x0, double horizon, double dt,
                                                RngStream& rng) {
    if (!(dt > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("bad grid parameters");
    const std::size_t n = static_cast<std::size_t>(std::llround(horizon / dt));
    std::vector<double> v(n + 1);
    v[0] = x0;
    const double sd = std::sqrt(dt);
    for (std::size_t i = 1; i <= n; ++i) v[i] = v[i - 1] + sd * rng.normal();
    return v;
}

// A committed piecewise-linear Brownian path together with the exact record
// structure of d = (-B ∨ 0): max_inverse maps a level u in [0, max_level] to
// the time the running maximum of d passes u.  Its final breakpoint carries
// the flat [last record time, horizon] at level max_level; beyond max_level
// the path carries no information (end_slope NaN).
struct BrownianKnots {
    std::vector<double> t, b;
    MonotonePath max_inverse;
    double max_level = 0.0;

    void clear() {
        t.clear();
        b.clear();
        max_inverse = MonotonePath{};
        max_level = 0.0;
    }

    // Interpolated value; hint is advanced monotonically for sweep access.
    double value_at(double s, std::size_t& hint) const {
        if (s <= t.front()) return b.front();
        if (s >= t.back()) return b.back();
        while (hint + 1 < t.size() && t[hint + 1] < s) ++hint;
        while (hint > 0 && t[hint] > s) --hint;
        const double w = (s - t[hint]) / (t[hint + 1] - t[hint]);
        return b[hint] + w * (b[hint + 1] - b[hint]);
    }
    double value_at(double s) const {
        std::size_t hint = 0;
        return value_at(s, hint);
    }
};

struct RefineParams {
    double dt_coarse = 2e-3;
    double dt_fine = 1e-5;
    // Bisect while a cell's bridge could cross the running record with
    // probability above exp(-log_miss_tol).
    double log_miss_tol = 20.72;
    // Draw the exact within-cell bridge maximum at commit time and record
    // any overshoot of the running record as a vertical climb.  This makes
    // the sampled record *levels* exact in law at every resolution; only
    // the time attribution inside a cell (<= dt_fine near records) remains
    // approximate.
    bool bridge_top_up = true;
};

// Sample x0 + B on [0, horizon] with record-adaptive resolution; see the
// header comment.  Output arrays are cleared first but keep their capacity.
inline void sample_brownian_refined(double x0, double horizon, const RefineParams& rp,
                                    RngStream& rng, BrownianKnots& out) {
    if (!(x0 >= 0.0)) throw std::invalid_argument("start must be on the edge (x0 >= 0)");
    if (!(horizon > 0.0) || !(rp.dt_coarse > 0.0) || !(rp.dt_fine > 0.0))
        throw std::invalid_argument("bad refinement parameters");
    out.clear();
    out.t.push_back(0.0);
    out.b.push_back(x0);

    double m = 0.0;          // running record of d = (-B ∨ 0)
    double record_end = 0.0; // time the record was last pushed
    struct Cell {
        double t0, d0, t1, d1;
    };
    std::vector<Cell> stack;

    auto commit = [&](double t0, double d0, double t1, double d1, bool threatened) {
        if (d1 > m) {
            const double tx = d0 >= m ? t0 : t0 + (m - d0) / (d1 - d0) * (t1 - t0);
            out.max_inverse.append(m, record_end, tx);
            out.max_inverse.append(d1, t1, t1);
            m = d1;
            record_end = t1;
        }
        if (threatened && rp.bridge_top_up) {
            const double span = t1 - t0, gap = d1 - d0;
            const double peak =
                0.5 * (d0 + d1 +
                       std::sqrt(gap * gap - 2.0 * span * std::log(rng.uniform())));
            if (peak > m) {
                double t_top = record_end;
                if (m > d1) { // record untouched by the knots: place the climb
                    const double denom = (m - d0) + (m - d1);
                    t_top = denom > 0.0 ? t0 + span * (m - d0) / denom
                                        : 0.5 * (t0 + t1);
                    out.max_inverse.append(m, record_end, t_top);
                }
                out.max_inverse.append(peak, t_top, t_top);
                m = peak;
                record_end = t_top;
            }
        }
        out.t.push_back(t1);
        out.b.push_back(-d1);
    };

    double tc = 0.0, dc = -x0;
    while (tc < horizon) {
        const double tn = std::min(tc + rp.dt_coarse, horizon);
        const double dn = dc + std::sqrt(tn - tc) * rng.normal();
        stack.push_back({tc, dc, tn, dn});
        while (!stack.empty()) {
            const Cell c = stack.back();
            stack.pop_back();
            const double span = c.t1 - c.t0;
            const bool threatened =
                2.0 * std::max(0.0, m - c.d0) * std::max(0.0, m - c.d1) <
                rp.log_miss_tol * span;
            if (threatened && span > rp.dt_fine) {
                const double tm = 0.5 * (c.t0 + c.t1);
                const double dm = 0.5 * (c.d0 + c.d1) + 0.5 * std::sqrt(span) * rng.normal();
                stack.push_back({tm, dm, c.t1, c.d1});
                stack.push_back({c.t0, c.d0, tm, dm});
            } else {
                commit(c.t0, c.d0, c.t1, c.d1, threatened);
            }
        }
        tc = tn;
        dc = dn;
    }

    if (out.max_inverse.size() == 0) {
        out.max_inverse.append(0.0, 0.0, horizon);
    } else {
        out.max_inverse.append(m, record_end, horizon);
    }
    out.max_level = m;
}

inline BrownianKnots sample_brownian_refined(double x0, double horizon,
                                             const RefineParams& rp, RngStream& rng) {
    BrownianKnots out;
    sample_brownian_refined(x0, horizon, rp, rng, out);
    return out;
}

} // namespace starbm
