// timechange.hpp — splits global time between edges so that their level
// processes stay balanced.
//
// Input: per-edge level paths ell_i (driver time -> accumulated level),
// nondecreasing with ell_i(0) = 0.  Output: nondecreasing continuous T_i
// with sum_i T_i(s) = s such that ell_i(T_i(s)) has a common value L(s).
//
// The closed form works on the inverses kappa_i = ell_i^{-1}
// (level -> driver time): with kappa = sum_i kappa_i and L = kappa^{-1},
//
//   T_i(s) = kappa_i(u-) + share_i(s - kappa(u-)),   u = L(s),
//
// where a jump of kappa at level u is an excursion window in global time,
// consumed by the jumping edges one after another in decreasing order of
// jump size.  Generic inputs have at most one jumping edge per level, so
// the order is immaterial; the shared flat at level zero that discretised
// drivers always carry is split deterministically by the same rule (the
// longest initial segment goes first), and is therefore exempt from the
// common-constancy error below.
//
// An ell_i with a terminal flat (end_slope == 0) never exceeds its cap
// level; once every other edge has passed that level the capped edge owns
// all remaining global time.  An ell_i that simply runs out of data
// (end_slope NaN) cannot be inverted honestly and is rejected.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monotone.hpp"

namespace starbm {

struct BalanceSolution {
    std::vector<MonotonePath> T; // per-edge share of global time, continuous
    MonotonePath L;              // common level ell_i(T_i(s))
};

// Levels (other than the exempt start level) held constant by two or more
// of the given paths; nonempty means the balancing problem is degenerate.
inline std::vector<double> shared_constancy_levels(std::span<const MonotonePath> ells,
                                                   double tol = 0.0) {
    std::vector<std::pair<double, std::size_t>> tagged; // (level, edge)
    for (std::size_t i = 0; i < ells.size(); ++i)
        for (double c : ells[i].constancy_levels())
            if (c != 0.0) tagged.emplace_back(c, i);
    std::sort(tagged.begin(), tagged.end());
    std::vector<double> shared;
    for (std::size_t a = 0; a + 1 < tagged.size(); ++a) {
        const auto& [ca, ia] = tagged[a];
        const auto& [cb, ib] = tagged[a + 1];
        if (cb - ca <= tol && ia != ib && (shared.empty() || shared.back() != ca))
            shared.push_back(ca);
    }
    return shared;
}

namespace detail {

// Sequential interpolating reader for a path whose queries arrive in
// nondecreasing order; O(1) amortised against MonotonePath::eval's search.
struct PathWalker {
    const MonotonePath* p;
    std::size_t seg = 0;

    void advance(double u) {
        while (seg + 1 < p->t.size() && p->t[seg + 1] <= u) ++seg;
    }
    double left(double u) { // value at u-, with p(0-) pinned to 0
        advance(u);
        if (u == p->t.front()) return 0.0;
        if (u == p->t[seg]) return p->lv[seg];
        return interior(u);
    }
    double right(double u) {
        advance(u);
        if (u == p->t[seg]) return p->rv[seg];
        return interior(u);
    }
    double right_slope(double u) {
        advance(u);
        if (seg + 1 == p->t.size()) return p->end_slope;
        return (p->lv[seg + 1] - p->rv[seg]) / (p->t[seg + 1] - p->t[seg]);
    }

private:
    double interior(double u) const {
        if (seg + 1 == p->t.size()) {
            if (std::isnan(p->end_slope))
                throw std::domain_error("balance: level beyond inverted domain");
            return p->rv[seg] + (u - p->t[seg]) * p->end_slope;
        }
        const double w = (u - p->t[seg]) / (p->t[seg + 1] - p->t[seg]);
        return p->rv[seg] + w * (p->lv[seg + 1] - p->rv[seg]);
    }
};

inline void check_balance_inputs(std::span<const MonotonePath> ells, double level_tol) {
    if (ells.empty()) throw std::invalid_argument("balance: no edges");
    for (const auto& ell : ells) {
        ell.validate();
        // a positive value at time 0 reads as level consumed by a jump at 0
        if (ell.t.front() != 0.0 || ell.rv.front() < 0.0)
            throw std::invalid_argument("balance: level path must start at time 0, level >= 0");
        if (std::isnan(ell.end_slope))
            throw std::invalid_argument("balance: level path ends without extrapolation");
    }
    if (ells.size() > 1 && !shared_constancy_levels(ells, level_tol).empty())
        throw std::domain_error("balance: shared constancy level, split not unique");
}

} // namespace detail

// Closed-form solution on the exact piecewise representation.
inline BalanceSolution solve_time_changes(std::span<const MonotonePath> ells, double horizon,
                                          double level_tol = 0.0) {
    detail::check_balance_inputs(ells, level_tol);
    const std::size_t k = ells.size();
    if (k == 1) {
        BalanceSolution one;
        one.T.push_back(MonotonePath::identity());
        one.L = ells[0];
        return one;
    }

    std::vector<MonotonePath> kappa;
    kappa.reserve(k);
    double level_cap = std::numeric_limits<double>::infinity(); // lowest terminal cap
    std::size_t cap_edge = k;
    for (std::size_t i = 0; i < k; ++i) {
        kappa.push_back(ells[i].generalized_inverse());
        if (kappa.back().domain_end() < level_cap) {
            level_cap = kappa.back().domain_end();
            cap_edge = i; // unique: equal caps are a shared constancy level
        }
    }

    std::vector<double> knots;
    for (const auto& ka : kappa) knots.insert(knots.end(), ka.t.begin(), ka.t.end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    while (!knots.empty() && knots.back() > level_cap) knots.pop_back();

    BalanceSolution sol;
    sol.T.assign(k, MonotonePath{});
    std::vector<detail::PathWalker> walk(k);
    for (std::size_t i = 0; i < k; ++i) {
        walk[i].p = &kappa[i];
        sol.T[i].append(0.0, 0.0, 0.0);
    }

    double s_cur = 0.0;
    std::vector<double> tval(k, 0.0), left(k), jump(k);
    std::vector<std::size_t> order(k);
    auto emit = [&]() {
        for (std::size_t i = 0; i < k; ++i) sol.T[i].append(s_cur, tval[i], tval[i]);
    };
    for (double u : knots) {
        double s_here = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            left[i] = walk[i].left(u);
            jump[i] = walk[i].right(u) - left[i];
            s_here += left[i];
        }
        if (s_here > s_cur) { // record-accrual stretch: every edge advances linearly
            s_cur = s_here;   // resync to the exact knot sum, no drift accumulates
            // left+jump from the previous knot can overshoot the stored value
            // by one ulp; never let the resync step T backwards
            for (std::size_t i = 0; i < k; ++i) tval[i] = std::max(tval[i], left[i]);
            emit();
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return jump[a] > jump[b]; });
        for (std::size_t e : order) {
            if (jump[e] <= 0.0) break;
            tval[e] += jump[e];
            if (s_cur + jump[e] > s_cur) {
                s_cur += jump[e];
                emit();
            } // else: below resolution, folded into the next stretch
        }
    }
    if (cap_edge < k) {
        // the capped edge absorbs all global time past the last joint level
        for (std::size_t i = 0; i < k; ++i) sol.T[i].end_slope = (i == cap_edge) ? 1.0 : 0.0;
    } else {
        double rate = 0.0;
        for (const auto& ka : kappa) rate += ka.end_slope;
        for (std::size_t i = 0; i < k; ++i) sol.T[i].end_slope = kappa[i].end_slope / rate;
    }
    (void)horizon; // any horizon is reachable once inputs pass validation

    sol.L = sum(kappa).generalized_inverse();
    return sol;
}

// Forward-Euler oracle sharing no code with the closed form: at each step
// feed ds to the edge whose level lags the running maximum; when levels
// agree, split ds between edges in proportion to inverse local slope (a
// flat edge absorbs the whole step).  O(ds)-accurate.
inline BalanceSolution brute_force_time_changes(std::span<const MonotonePath> ells,
                                                double horizon, double ds) {
    detail::check_balance_inputs(ells, 0.0);
    if (!(ds > 0.0) || !(horizon > 0.0))
        throw std::invalid_argument("balance oracle: need positive horizon and step");
    const std::size_t k = ells.size();
    if (k == 1) {
        BalanceSolution one;
        one.T.push_back(MonotonePath::identity());
        one.L = ells[0];
        return one;
    }

    std::vector<detail::PathWalker> walk(k), slope_walk(k);
    for (std::size_t i = 0; i < k; ++i) walk[i].p = slope_walk[i].p = &ells[i];

    std::vector<double> tpos(k, 0.0), level(k, 0.0), share(k);
    const std::size_t nsteps = static_cast<std::size_t>(std::ceil(horizon / ds));
    std::vector<std::vector<double>> tgrid(k);
    std::vector<double> sgrid, lgrid;
    sgrid.reserve(nsteps + 1);
    lgrid.reserve(nsteps + 1);
    for (std::size_t i = 0; i < k; ++i) {
        tgrid[i].reserve(nsteps + 1);
        tgrid[i].push_back(0.0);
    }
    sgrid.push_back(0.0);
    lgrid.push_back(0.0);

    double s = 0.0;
    for (std::size_t step = 0; step < nsteps; ++step) {
        const double s_next = std::min(horizon, ds * static_cast<double>(step + 1));
        const double h = s_next - s;
        if (!(h > 0.0)) break;
        const double lmax = *std::max_element(level.begin(), level.end());
        std::size_t lag = k;
        for (std::size_t i = 0; i < k; ++i)
            if (level[i] < lmax && (lag == k || level[i] < level[lag])) lag = i;
        if (lag < k) {
            tpos[lag] += h;
        } else {
            double total = 0.0;
            std::size_t flats = 0;
            for (std::size_t i = 0; i < k; ++i) {
                const double sl = slope_walk[i].right_slope(tpos[i]);
                share[i] = sl > 0.0 ? 1.0 / sl : std::numeric_limits<double>::infinity();
                if (std::isinf(share[i]))
                    ++flats;
                else
                    total += share[i];
            }
            for (std::size_t i = 0; i < k; ++i) {
                const double w = flats > 0 ? (std::isinf(share[i]) ? 1.0 / flats : 0.0)
                                           : share[i] / total;
                tpos[i] += h * w;
            }
        }
        s = s_next;
        double lmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            level[i] = walk[i].right(tpos[i]);
            lmin = std::min(lmin, level[i]);
            tgrid[i].push_back(tpos[i]);
        }
        sgrid.push_back(s);
        lgrid.push_back(lmin);
    }

    BalanceSolution sol;
    for (std::size_t i = 0; i < k; ++i)
        sol.T.push_back(MonotonePath::from_knots(sgrid, std::move(tgrid[i])));
    sol.L = MonotonePath::from_knots(std::move(sgrid), std::move(lgrid));
    return sol;
}

struct FlatSegmentReport {
    std::size_t flats_checked = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// While T_i traverses a flat of ell_i, global time must flow into edge i
// alone: T_i at slope one, every other T_j frozen.
inline FlatSegmentReport check_lemma_det(const BalanceSolution& sol,
                                         std::span<const MonotonePath> ells,
                                         double tol = 1e-9) {
    FlatSegmentReport rep;
    for (std::size_t i = 0; i < ells.size(); ++i) {
        const auto& ell = ells[i];
        const auto& ti = sol.T[i];
        const MonotonePath inv = ti.generalized_inverse();
        const double reach = // largest edge-i time the solution ever allots
            ti.end_slope > 0.0 ? std::numeric_limits<double>::infinity() : ti.rv.back();
        for (std::size_t b = 0; b + 1 < ell.t.size(); ++b) {
            if (ell.lv[b + 1] != ell.rv[b]) continue; // not a flat segment
            const double ta = ell.t[b], tb = std::min(ell.t[b + 1], reach);
            if (!(tb > ta)) continue;
            const double sa = inv.eval(ta), sb = inv.eval_left(tb);
            if (!(sb > sa)) continue; // flat never entered
            ++rep.flats_checked;
            const double dq = (sb - sa) / 4.0;
            for (int q = 0; q < 4; ++q) {
                const double s0 = sa + q * dq, s1 = s0 + dq;
                for (std::size_t j = 0; j < ells.size(); ++j) {
                    const double grow = sol.T[j].eval(s1) - sol.T[j].eval(s0);
                    const double want = (j == i) ? dq : 0.0;
                    if (std::abs(grow - want) > tol * (1.0 + std::abs(want)))
                        rep.violations.push_back(
                            "edge " + std::to_string(j) + " grows " + std::to_string(grow) +
                            " across flat of edge " + std::to_string(i));
                }
            }
        }
    }
    return rep;
}

} // namespace starbm
