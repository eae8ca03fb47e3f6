// monotone.hpp — exact algebra of nondecreasing càdlàg piecewise-affine paths.
//
// A path is a breakpoint list (t[i], lv[i], rv[i]): value rv[i] at t[i],
// left limit lv[i], affine between breakpoints, optional affine
// extrapolation beyond the last breakpoint (end_slope; NaN = undefined).
// Jumps are breakpoints with lv < rv; flats are zero-slope segments.
// The generalized inverse inf{u : f(u) > s} is computed as a pure swap of
// stored coordinates (no arithmetic), so inversion round-trips bitwise.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace starbm {

struct MonotonePath {
    std::vector<double> t, lv, rv;
    double end_slope = std::numeric_limits<double>::quiet_NaN();

    static MonotonePath identity() {
        MonotonePath p;
        p.t = {0.0};
        p.lv = {0.0};
        p.rv = {0.0};
        p.end_slope = 1.0;
        return p;
    }

    // Continuous path through knots (times[i], values[i]).
    static MonotonePath from_knots(std::vector<double> times, std::vector<double> values,
                                   double slope_after = std::numeric_limits<double>::quiet_NaN()) {
        if (times.size() != values.size() || times.empty())
            throw std::invalid_argument("from_knots: need equally many times and values");
        MonotonePath p;
        p.t = std::move(times);
        p.lv = values;
        p.rv = std::move(values);
        p.end_slope = slope_after;
        p.validate();
        return p;
    }

    std::size_t size() const { return t.size(); }

    double domain_end() const {
        return std::isnan(end_slope) ? t.back() : std::numeric_limits<double>::infinity();
    }

    bool has_jumps() const {
        for (std::size_t i = 0; i < size(); ++i)
            if (rv[i] > lv[i]) return true;
        return false;
    }

    void append(double time, double left, double right) {
        if (!t.empty()) {
            if (time < t.back())
                throw std::invalid_argument("append: time not increasing");
            if (time == t.back()) { // extend the jump at the existing breakpoint
                if (left != rv.back() && left != lv.back())
                    throw std::invalid_argument("append: inconsistent left value");
                rv.back() = std::max(rv.back(), right);
                return;
            }
            if (left < rv.back())
                throw std::invalid_argument("append: value not nondecreasing");
        }
        if (right < left) throw std::invalid_argument("append: rv < lv");
        t.push_back(time);
        lv.push_back(left);
        rv.push_back(right);
    }

    void validate() const {
        if (t.empty()) throw std::invalid_argument("path: empty");
        for (std::size_t i = 0; i < size(); ++i) {
            if (!std::isfinite(t[i]) || !std::isfinite(lv[i]) || !std::isfinite(rv[i]))
                throw std::invalid_argument("path: non-finite entry");
            if (rv[i] < lv[i]) throw std::invalid_argument("path: rv < lv");
            if (i > 0 && !(t[i] > t[i - 1]))
                throw std::invalid_argument("path: times not strictly increasing");
            if (i > 0 && lv[i] < rv[i - 1])
                throw std::invalid_argument("path: values not nondecreasing");
        }
        if (!std::isnan(end_slope) && end_slope < 0.0)
            throw std::invalid_argument("path: negative end slope");
    }

    // Index of the last breakpoint with t[i] <= s.
    std::size_t segment_index(double s) const {
        if (s < t.front()) throw std::domain_error("eval: before domain start");
        auto it = std::upper_bound(t.begin(), t.end(), s);
        return static_cast<std::size_t>(it - t.begin()) - 1;
    }

    double eval(double s) const {
        const std::size_t i = segment_index(s);
        if (s == t[i]) return rv[i];
        if (i + 1 == size()) {
            if (std::isnan(end_slope)) throw std::domain_error("eval: beyond domain end");
            return rv[i] + (s - t[i]) * end_slope;
        }
        const double w = (s - t[i]) / (t[i + 1] - t[i]);
        return rv[i] + w * (lv[i + 1] - rv[i]);
    }

    double eval_left(double s) const {
        const std::size_t i = segment_index(s);
        if (s == t[i]) return lv[i];
        return eval(s);
    }

    // inf{u : f(u) > s}, as a path in s.  Flats become jumps and vice versa;
    // all breakpoint coordinates are copied, never recomputed.
    MonotonePath generalized_inverse() const {
        if (rv[0] < 0.0)
            throw std::invalid_argument("generalized_inverse: path must start at a nonnegative value");
        MonotonePath inv;
        inv.t.reserve(size() + 1);
        inv.lv.reserve(size() + 1);
        inv.rv.reserve(size() + 1);
        auto push = [&inv](double v, double left, double right) {
            if (!inv.t.empty() && v == inv.t.back()) {
                inv.rv.back() = std::max(inv.rv.back(), right);
                return;
            }
            inv.t.push_back(v);
            inv.lv.push_back(left);
            inv.rv.push_back(right);
        };
        if (rv[0] > 0.0) push(0.0, 0.0, 0.0); // values below f(0) are exceeded at time 0
        // Each breakpoint of f contributes its jump interval as a flat; each
        // flat segment contributes a jump.
        for (std::size_t i = 0; i < size(); ++i) {
            if (i == 0) {
                push(rv[0], 0.0, 0.0);
            } else {
                if (lv[i] == rv[i - 1]) // flat segment [t[i-1], t[i]] -> jump at that value
                    push(lv[i], t[i - 1], t[i]);
                else // rising segment -> rising segment with swapped axes
                    push(lv[i], t[i], t[i]);
                if (rv[i] > lv[i]) push(rv[i], t[i], t[i]); // jump of f -> flat of inverse
            }
        }
        // Tail duality: an undefined tail (NaN: the path is +∞ beyond its
        // domain) inverts to a terminal flat at the last time, and vice
        // versa, so inversion round-trips.
        if (std::isnan(end_slope))
            inv.end_slope = 0.0;
        else if (end_slope == 0.0)
            inv.end_slope = std::numeric_limits<double>::quiet_NaN();
        else
            inv.end_slope = 1.0 / end_slope;
        inv.lv[0] = inv.rv[0];
        return inv;
    }

    // Remove interior non-jump breakpoints whose neighbouring slopes agree
    // exactly, and normalise the time-0 left value.
    MonotonePath canonical() const {
        MonotonePath c;
        c.end_slope = end_slope;
        c.t.reserve(size());
        c.lv.reserve(size());
        c.rv.reserve(size());
        auto slope = [this](std::size_t i) { // slope of segment i -> i+1
            return (lv[i + 1] - rv[i]) / (t[i + 1] - t[i]);
        };
        for (std::size_t i = 0; i < size(); ++i) {
            const bool jump = rv[i] > lv[i];
            bool keep = jump || i == 0 || i + 1 == size();
            if (!keep) {
                const double sl = slope(i - 1), sr = slope(i);
                keep = !(sl == sr);
            }
            if (keep) {
                c.t.push_back(t[i]);
                c.lv.push_back(lv[i]);
                c.rv.push_back(rv[i]);
            }
        }
        c.lv[0] = c.rv[0];
        // a trailing breakpoint collinear with end_slope is redundant
        if (!std::isnan(c.end_slope) && c.t.size() >= 2) {
            const std::size_t n = c.t.size();
            if (c.rv[n - 1] == c.lv[n - 1]) {
                const double sl = (c.lv[n - 1] - c.rv[n - 2]) / (c.t[n - 1] - c.t[n - 2]);
                if (sl == c.end_slope) {
                    c.t.pop_back();
                    c.lv.pop_back();
                    c.rv.pop_back();
                }
            }
        }
        return c;
    }

    bool same_breakpoints(const MonotonePath& o) const {
        auto nan_eq = [](double a, double b) {
            return (std::isnan(a) && std::isnan(b)) || a == b;
        };
        return t == o.t && lv == o.lv && rv == o.rv && nan_eq(end_slope, o.end_slope);
    }

    // Flat levels: values attained on an interval of times (including a
    // terminal flat when end_slope == 0).
    std::vector<double> constancy_levels() const {
        std::vector<double> out;
        for (std::size_t i = 0; i + 1 < size(); ++i)
            if (lv[i + 1] == rv[i]) out.push_back(rv[i]);
        if (end_slope == 0.0) out.push_back(rv.back());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

// h(s) = f(g(s)).  The inner path may jump: f's variation across a jump
// interval of g is swallowed by a jump of h, with the left value resolved by
// whether g was rising or flat just before.  When f has a finite domain the
// composition is capped: once g's values pass f's last breakpoint, h ends
// (end_slope NaN) at the crossing point.  h's stored lv[0] is f's left value
// at g's starting value, so a jump of f at the start survives composition.
inline MonotonePath compose(const MonotonePath& f, const MonotonePath& g) {
    MonotonePath h;
    h.t.reserve(f.size() + g.size());
    h.lv.reserve(f.size() + g.size());
    h.rv.reserve(f.size() + g.size());
    auto push = [&h](double s, double left, double right) {
        if (!h.t.empty() && s == h.t.back()) {
            h.rv.back() = std::max(h.rv.back(), right);
            h.lv.back() = std::min(h.lv.back(), left);
            return;
        }
        h.t.push_back(s);
        h.lv.push_back(left);
        h.rv.push_back(right);
    };
    const bool f_capped = std::isnan(f.end_slope);
    const double f_top =
        f_capped ? f.t.back() : std::numeric_limits<double>::infinity();
    auto finish_capped = [&h]() {
        h.end_slope = std::numeric_limits<double>::quiet_NaN();
        return h;
    };

    if (g.rv.front() > f_top) { // no data at all beyond f's domain
        push(g.t.front(), f.rv.back(), f.rv.back());
        return finish_capped();
    }
    {
        const double left = g.lv.front() >= f.t.front() ? f.eval_left(g.lv.front())
                                                        : f.lv.front();
        push(g.t.front(), left, f.eval(g.rv.front()));
    }
    const std::size_t gn = g.size();
    bool rose = false; // did g rise on the stretch just processed?
    for (std::size_t seg = 0; seg < gn; ++seg) {
        const bool last = (seg + 1 == gn);
        const double sa = g.t[seg], va = g.rv[seg];
        if (last) {
            if (std::isnan(g.end_slope) || g.end_slope == 0.0) break;
            // walk f's remaining breakpoints along g's extrapolated tail
            auto lo = std::upper_bound(f.t.begin(), f.t.end(), va);
            for (auto it = lo; it != f.t.end(); ++it) {
                const std::size_t j = static_cast<std::size_t>(it - f.t.begin());
                push(sa + (f.t[j] - va) / g.end_slope, f.lv[j], f.rv[j]);
            }
            if (f_capped) return finish_capped();
            break;
        }
        const double sb = g.t[seg + 1], vb = g.lv[seg + 1];
        if (vb > va) {
            // f's breakpoints strictly inside (va, vb); the endpoint vb is
            // pushed below with jump-aware left value
            auto lo = std::upper_bound(f.t.begin(), f.t.end(), va);
            for (auto it = lo; it != f.t.end() && *it < vb; ++it) {
                const std::size_t j = static_cast<std::size_t>(it - f.t.begin());
                const double s =
                    std::min(sb, sa + (f.t[j] - va) / (vb - va) * (sb - sa));
                push(s, f.lv[j], f.rv[j]);
            }
            if (vb > f_top) return finish_capped(); // f_top's breakpoint was pushed above
            auto at = std::lower_bound(f.t.begin(), f.t.end(), vb);
            if (at != f.t.end() && *at == vb) {
                const std::size_t j = static_cast<std::size_t>(at - f.t.begin());
                push(sb, f.lv[j], f.rv[j]);
            } else {
                const double v = f.eval(vb);
                push(sb, v, v);
            }
            rose = true;
        } else {
            const double v = f.eval(vb);
            push(sb, v, v);
            rose = false;
        }
        const double jb = g.rv[seg + 1];
        if (jb > vb) { // jump of g at sb: f's variation over [vb, jb] collapses
            const double left = rose ? f.eval_left(vb) : f.eval(vb);
            if (jb > f_top) {
                push(sb, left, f.rv.back());
                return finish_capped();
            }
            push(sb, left, f.eval(jb));
        }
    }
    if (!std::isnan(g.end_slope)) {
        if (g.end_slope == 0.0)
            h.end_slope = 0.0;
        else if (!std::isnan(f.end_slope) && std::isinf(f.domain_end()))
            h.end_slope = f.end_slope * g.end_slope;
    }
    return h;
}

inline MonotonePath sum(std::span<const MonotonePath> parts) {
    if (parts.empty()) throw std::invalid_argument("sum: no paths");
    std::vector<double> times;
    double dom_end = std::numeric_limits<double>::infinity();
    bool slope_ok = true;
    double slope = 0.0;
    for (const auto& p : parts) {
        times.insert(times.end(), p.t.begin(), p.t.end());
        dom_end = std::min(dom_end, p.domain_end());
        if (std::isnan(p.end_slope))
            slope_ok = false;
        else
            slope += p.end_slope;
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    while (!times.empty() && times.back() > dom_end) times.pop_back();
    MonotonePath s;
    s.t.reserve(times.size());
    s.lv.reserve(times.size());
    s.rv.reserve(times.size());
    for (double tau : times) {
        double left = 0.0, right = 0.0;
        for (const auto& p : parts) {
            left += p.eval_left(tau);
            right += p.eval(tau);
        }
        s.t.push_back(tau);
        s.lv.push_back(left);
        s.rv.push_back(right);
    }
    s.end_slope = slope_ok ? slope : std::numeric_limits<double>::quiet_NaN();
    if (!slope_ok && std::isfinite(dom_end) && (s.t.empty() || s.t.back() < dom_end)) {
        double left = 0.0, right = 0.0;
        for (const auto& p : parts) {
            left += p.eval_left(dom_end);
            right += p.eval(dom_end);
        }
        s.t.push_back(dom_end);
        s.lv.push_back(left);
        s.rv.push_back(right);
    }
    s.lv[0] = s.rv[0];
    return s;
}

// Levels at which two or more of the given paths are simultaneously constant.
inline std::vector<double> common_constancy_levels(std::span<const MonotonePath> paths) {
    std::vector<double> all, shared;
    for (const auto& p : paths) {
        auto lv = p.constancy_levels();
        std::sort(lv.begin(), lv.end());
        lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
        all.insert(all.end(), lv.begin(), lv.end());
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
        if (all[i] == all[i + 1] && (shared.empty() || shared.back() != all[i]))
            shared.push_back(all[i]);
    return shared;
}

} // namespace starbm
