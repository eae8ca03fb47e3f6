#pragma once
// Path-level simulation: per-edge drivers, the balance readout, and the
// pipeline that turns them into trajectories (base motion -> sticky clock ->
// killing), plus the restart-concatenation construction and lumping.
//
// A path is assembled in three layers.
//
//   * Per active edge, a driver: a refined Brownian path B (sampler.hpp)
//     together with a jump subordinator U(u) = beta*u + jumps.  The edge
//     motion is W = B + U(U^{-1}(record)), i.e. whenever the running record
//     of (-B v 0) crosses a jump of U the path is relocated outward by the
//     remainder of that jump; without jumps W is plain reflection.
//   * The balance solve (timechange.hpp) splits global time s among edges so
//     that all edges sit at a common level L(s); each edge occupies the time
//     T_i(s).  From the solved L we derive an owner schedule: on each stretch
//     either exactly one edge advances (the path is inside one of its
//     excursions) or the level itself moves (the path is at the center).
//   * Readout renders the path on a uniform grid, optionally through the
//     sticky clock A(s) = s + alpha*L(s) (a jump of A is a center sojourn of
//     length alpha*dL), and finally cuts at the first grid node whose local
//     time exceeds an independent exponential level (rate gamma).
//
// Stream layout (all draws derive from one master seed; counter-based, so
// streams never collide and paths are reproducible in any order):
//   "drv"  (path<<24)|(piece<<8)|edge           Brownian driver
//   "jmp"  (path<<28)|(piece<<12)|(edge<<6)|b   jumps for level block b
//   "kill" path                                 lifetime level
//   "clk" /"flip"/"rst"  (path<<16)|piece       concatenation clock, the
//                                               restart-vs-death flip, and
//                                               the restart location
// Jump blocks tile the level axis as [0,1),[1,2),[2,4),[4,8),...  Extending
// the horizon only appends blocks and Brownian cells, so a path re-sampled
// with a larger horizon extends its shorter version exactly; estimators use
// this to stop early on killed paths without selection bias.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <starbm/graph.hpp>
#include <starbm/monotone.hpp>
#include <starbm/rng.hpp>
#include <starbm/sampler.hpp>
#include <starbm/timechange.hpp>

namespace starbm {

struct TrajectoryMeta {
    BoundaryParams params;
    std::uint64_t seed = 0;
    std::uint32_t path_index = 0;
    double dt = 0.0;
    double truncation_eps = 0.0; // 0 when no truncation was needed
    RefineParams refine;
};

// Uniform-grid rendering of one path.  x[j] is the state at t[j];
// local_time[j] is nondecreasing and frozen once the path is dead.
// lifetime_index is the first grid node in the cemetery (== size() while
// the path is alive at the final node).
struct Trajectory {
    std::vector<double> t;
    std::vector<GraphPoint> x;
    std::vector<double> local_time;
    std::size_t lifetime_index = 0;
    TrajectoryMeta meta;

    std::size_t size() const { return t.size(); }
    bool alive_at(std::size_t j) const { return j < lifetime_index; }
};

struct EdgeDriver {
    int edge = -1; // edge id in the parameter set
    BrownianKnots knots;
    JumpList jumps;            // concatenated level blocks, times increasing
    MonotonePath subordinator; // U on the level axis
    MonotonePath sub_inverse;  // U^{-1} on the value axis
    MonotonePath record;       // running record of (-B v 0) as a time path
    bool relocating = false;   // any jumps sampled
};

struct PathBundle {
    std::vector<EdgeDriver> drivers; // active edges only
    std::vector<int> active;         // drivers[j].edge == active[j]
    std::vector<MonotonePath> ells;  // level vs edge time, solver input
    BalanceSolution balance;         // T (active order) and L on [0, horizon]
    std::vector<double> seg_end;     // owner schedule, segment right ends
    std::vector<std::int32_t> seg_owner; // active index, -1 = center
    double horizon = 0.0;
    GraphPoint start;

    int owner_count() const { return static_cast<int>(active.size()); }
};

namespace detail {

inline std::uint64_t drv_index(std::uint32_t path, std::uint32_t piece, int edge) {
    return (static_cast<std::uint64_t>(path) << 24) | (static_cast<std::uint64_t>(piece) << 8) |
           static_cast<std::uint64_t>(edge);
}
inline std::uint64_t jmp_index(std::uint32_t path, std::uint32_t piece, int edge,
                               std::uint32_t block) {
    return (static_cast<std::uint64_t>(path) << 28) | (static_cast<std::uint64_t>(piece) << 12) |
           (static_cast<std::uint64_t>(edge) << 6) | static_cast<std::uint64_t>(block);
}
inline std::uint64_t piece_index(std::uint32_t path, std::uint32_t piece) {
    return (static_cast<std::uint64_t>(path) << 16) | static_cast<std::uint64_t>(piece);
}

// Sample the edge's jumps over level blocks until the subordinator's reach
// beta*C + sum(jumps) covers target_level, so every later inverse lookup
// stays inside the sampled region.  Block b >= 1 covers [2^{b-1}, 2^b).
inline void sample_jump_blocks(const EdgeTail& tail, double beta, double eps, double target_level,
                               Seed seed, std::uint32_t path, std::uint32_t piece, int edge,
                               JumpList& out) {
    out.time.clear();
    out.size.clear();
    if (tail.is_zero()) return;
    const bool finite = tail.finite();
    if (!finite && !(eps > 0.0))
        throw std::invalid_argument("simulate: infinite jump measure needs a truncation eps > 0");
    double lo = 0.0, hi = 1.0, mass = 0.0;
    for (std::uint32_t block = 0; block < 60; ++block) {
        RngStream rng(seed, "jmp", jmp_index(path, piece, edge, block));
        JumpList part = finite ? sample_compound_poisson(tail, hi - lo, rng)
                               : sample_truncated_ppp(tail, eps, hi - lo, rng);
        for (std::size_t j = 0; j < part.count(); ++j) {
            out.time.push_back(lo + part.time[j]);
            out.size.push_back(part.size[j]);
            mass += part.size[j];
        }
        if (beta * hi + mass >= target_level) return;
        lo = hi;
        hi *= 2.0;
    }
    throw std::runtime_error("simulate: jump blocks failed to cover the needed levels");
}

inline void build_edge_driver(const BoundaryParams& p, int edge_id, double eps, double start_x,
                              double horizon, const RefineParams& rp, Seed seed,
                              std::uint32_t path, std::uint32_t piece, EdgeDriver& d,
                              MonotonePath& ell) {
    d.edge = edge_id;
    RngStream rng(seed, "drv", drv_index(path, piece, edge_id));
    sample_brownian_refined(start_x, horizon, rp, rng, d.knots);
    const double beta = p.beta[static_cast<std::size_t>(edge_id)];
    sample_jump_blocks(p.measure.edges[static_cast<std::size_t>(edge_id)], beta, eps,
                       d.knots.max_level, seed, path, piece, edge_id, d.jumps);
    d.relocating = d.jumps.count() > 0;
    d.subordinator = build_subordinator(beta, d.jumps);
    d.sub_inverse = d.subordinator.generalized_inverse();
    d.record = d.knots.max_inverse.generalized_inverse();
    // level consumed as a function of edge time: invert kappa(u) = time the
    // record reaches U(u).  kappa is capped where U passes the sampled record
    // range; the inverse then ends flat, which the balance solver reads as
    // "this edge's window is exhausted".
    ell = compose(d.knots.max_inverse, d.subordinator).generalized_inverse();
}

// Owner schedule from the solved level process: stretches where L moves (or
// jumps) belong to the center; on every other stretch exactly one edge's T
// advances with unit slope.  Zero-length center events between consecutive
// stretches of the same owner are absorbed.
inline void build_schedule(PathBundle& pb) {
    pb.seg_end.clear();
    pb.seg_owner.clear();
    const MonotonePath& L = pb.balance.L;
    const std::size_t k = pb.ells.size();
    std::vector<PathWalker> tw;
    tw.reserve(k);
    for (const auto& T : pb.balance.T) tw.push_back(PathWalker{&T});
    auto push = [&pb](double end, std::int32_t owner) {
        if (!pb.seg_owner.empty() && pb.seg_owner.back() == owner) {
            pb.seg_end.back() = end;
            return;
        }
        pb.seg_end.push_back(end);
        pb.seg_owner.push_back(owner);
    };
    auto segment_owner = [&tw, k](double s0) -> std::int32_t {
        std::int32_t best = -1;
        double best_slope = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double sl = tw[i].right_slope(s0);
            if (sl > best_slope) {
                best_slope = sl;
                best = static_cast<std::int32_t>(i);
            }
        }
        return best_slope > 0.5 ? best : -1;
    };
    // ownership is probed at stretch midpoints: L and T knots at the same
    // event can disagree by an ulp, so endpoint queries may read the slope
    // of the neighbouring micro-segment
    const std::size_t n = L.size();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double s0 = L.t[j], s1 = L.t[j + 1];
        if (!(s1 > s0)) continue;
        const bool climbing = L.lv[j + 1] > L.rv[j];
        push(s1, climbing ? -1 : segment_owner(0.5 * (s0 + s1)));
    }
    if (L.t.back() < pb.horizon) {
        const bool climbing = !std::isnan(L.end_slope) && L.end_slope > 0.0;
        push(pb.horizon, climbing ? -1 : segment_owner(0.5 * (L.t.back() + pb.horizon)));
    }
    if (pb.seg_end.empty()) push(pb.horizon, segment_owner(0.5 * pb.horizon));
    pb.seg_end.back() = std::max(pb.seg_end.back(), pb.horizon);
}

} // namespace detail

// Build the base-motion bundle (alpha and gamma play no role here; they act
// in the readout).  x0 must be the center or a point on an active edge --
// callers deal with degenerate starts before coming here.
inline void build_bundle(const BoundaryParams& p, double eps, GraphPoint x0, double horizon,
                         const RefineParams& rp, Seed seed, std::uint32_t path,
                         std::uint32_t piece, PathBundle& pb) {
    const int k = p.k();
    if (k < 1) throw std::invalid_argument("simulate: no edges");
    if (static_cast<int>(p.measure.edges.size()) != k)
        throw std::invalid_argument("simulate: measure edge count mismatch");
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate: horizon must be positive");
    pb.active.clear();
    for (int i = 0; i < k; ++i)
        if (p.beta[static_cast<std::size_t>(i)] > 0.0 ||
            !p.measure.edges[static_cast<std::size_t>(i)].is_zero())
            pb.active.push_back(i);
    if (pb.active.empty())
        throw std::invalid_argument("simulate: no active edges, nothing can leave the center");
    int start_active = -1;
    if (x0.kind == GraphPoint::Kind::Edge) {
        for (std::size_t j = 0; j < pb.active.size(); ++j)
            if (pb.active[j] == x0.edge) start_active = static_cast<int>(j);
        if (start_active < 0)
            throw std::invalid_argument("simulate: start edge cannot be re-entered");
    } else if (x0.kind != GraphPoint::Kind::Center) {
        throw std::invalid_argument("simulate: start must be the center or an edge point");
    }
    pb.horizon = horizon;
    pb.start = x0;
    pb.drivers.resize(pb.active.size());
    pb.ells.resize(pb.active.size());
    for (std::size_t j = 0; j < pb.active.size(); ++j) {
        const double sx = (static_cast<int>(j) == start_active) ? x0.x : 0.0;
        detail::build_edge_driver(p, pb.active[j], eps, sx, horizon, rp, seed, path, piece,
                                  pb.drivers[j], pb.ells[j]);
    }
    pb.balance = solve_time_changes(pb.ells, horizon);
    detail::build_schedule(pb);
}

// Sequential reader of the bundle: states and levels at nondecreasing times.
class BundleReader {
  public:
    explicit BundleReader(const PathBundle& pb) : pb_(&pb), lw_{&pb.balance.L} {
        const std::size_t k = pb.drivers.size();
        tw_.reserve(k);
        rw_.reserve(k);
        uw_.reserve(k);
        vw_.reserve(k);
        bh_.assign(k, 0);
        for (std::size_t j = 0; j < k; ++j) {
            tw_.push_back(detail::PathWalker{&pb.balance.T[j]});
            rw_.push_back(detail::PathWalker{&pb.drivers[j].record});
            uw_.push_back(detail::PathWalker{&pb.drivers[j].subordinator});
            vw_.push_back(detail::PathWalker{&pb.drivers[j].sub_inverse});
        }
    }

    GraphPoint state_at(double s) {
        while (seg_ + 1 < pb_->seg_end.size() && pb_->seg_end[seg_] <= s) ++seg_;
        const std::int32_t owner = pb_->seg_owner[seg_];
        if (owner < 0) return GraphPoint::center();
        const auto j = static_cast<std::size_t>(owner);
        const double u = tw_[j].right(s);
        const EdgeDriver& d = pb_->drivers[j];
        const double m = rw_[j].right(u);
        const double reloc = d.relocating ? uw_[j].right(vw_[j].right(m)) : m;
        const double w = d.knots.value_at(u, bh_[j]) + reloc;
        return GraphPoint::edge_at(pb_->active[j], w > 0.0 ? w : 0.0);
    }

    double level_at(double s) { return lw_.right(s); }

  private:
    const PathBundle* pb_;
    std::size_t seg_ = 0;
    detail::PathWalker lw_;
    std::vector<detail::PathWalker> tw_, rw_, uw_, vw_;
    std::vector<std::size_t> bh_;
};

// The sticky clock A(s) = s + alpha*L(s) as an inverse lookup: real time t
// maps either into a stretch (the base path runs, slowed near the center) or
// into a jump gap of A (the path sits at the center while local time climbs
// at rate 1/alpha).
class StickyClock {
  public:
    StickyClock(const MonotonePath& L, double alpha) : L_(&L), alpha_(alpha) {
        end_slope_ = 1.0 + alpha * (std::isnan(L.end_slope) ? 0.0 : L.end_slope);
    }

    struct At {
        double s;       // base time
        bool in_gap;    // inside a center sojourn
        double level;   // local time at the queried real time
    };

    At lookup(double t) {
        const auto& tt = L_->t;
        const std::size_t n = tt.size();
        while (cur_ + 1 < n && a_left(cur_ + 1) <= t) ++cur_;
        const double a0 = a_right(cur_);
        if (t < a0) { // inside the gap at knot cur_ (A jumps with L)
            const double gap_start = a_left(cur_);
            return {tt[cur_], true, L_->lv[cur_] + (t - gap_start) / alpha_};
        }
        if (cur_ + 1 == n) {
            const double s = tt[cur_] + (t - a0) / end_slope_;
            const double lvl = L_->rv[cur_] +
                               (std::isnan(L_->end_slope) ? 0.0 : L_->end_slope) * (s - tt[cur_]);
            return {s, false, lvl};
        }
        const double a1 = a_left(cur_ + 1);
        const double w = a1 > a0 ? (t - a0) / (a1 - a0) : 0.0;
        const double s = tt[cur_] + w * (tt[cur_ + 1] - tt[cur_]);
        return {s, false, L_->rv[cur_] + w * (L_->lv[cur_ + 1] - L_->rv[cur_])};
    }

  private:
    double a_left(std::size_t i) const { return L_->t[i] + alpha_ * L_->lv[i]; }
    double a_right(std::size_t i) const { return L_->t[i] + alpha_ * L_->rv[i]; }
    const MonotonePath* L_;
    double alpha_, end_slope_;
    std::size_t cur_ = 0;
};

namespace detail {

inline void init_grid(Trajectory& tr, double horizon, double dt) {
    const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
    if (!(dt > 0.0) || n < 1 || std::abs(n * dt - horizon) > 1e-9 * horizon)
        throw std::invalid_argument("simulate: horizon must be a multiple of dt");
    tr.t.resize(n + 1);
    tr.x.resize(n + 1);
    tr.local_time.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) tr.t[j] = static_cast<double>(j) * dt;
    tr.lifetime_index = n + 1;
}

// Render the bundle through the sticky clock onto the grid already present
// in tr.t, starting at node first and measuring bundle time from offset.
// alpha == 0 bypasses the clock entirely.
inline void render_sticky(const PathBundle& pb, double alpha, Trajectory& tr,
                          std::size_t first = 0, double offset = 0.0) {
    BundleReader reader(pb);
    if (alpha == 0.0) {
        for (std::size_t j = first; j < tr.t.size(); ++j) {
            tr.x[j] = reader.state_at(tr.t[j] - offset);
            tr.local_time[j] = reader.level_at(tr.t[j] - offset);
        }
        return;
    }
    StickyClock clock(pb.balance.L, alpha);
    for (std::size_t j = first; j < tr.t.size(); ++j) {
        const auto at = clock.lookup(tr.t[j] - offset);
        tr.x[j] = at.in_gap ? GraphPoint::center() : reader.state_at(at.s);
        tr.local_time[j] = at.level;
    }
}

// Base motion plus sticky readout onto tr's grid.  A start on an edge
// without weight or jump mass is transient: a plain Brownian head runs
// there (accruing no local time, so the sticky clock is idle) until the
// first center visit, after which the active system takes over (piece 1).
inline void render_pipeline(const BoundaryParams& base, double eps, GraphPoint x0,
                            const RefineParams& rp, Seed seed, std::uint32_t path_index,
                            double alpha, Trajectory& tr) {
    bool transient_start = false;
    if (x0.kind == GraphPoint::Kind::Edge) {
        if (x0.edge < 0 || x0.edge >= base.k())
            throw std::invalid_argument("simulate: start edge out of range");
        const auto i = static_cast<std::size_t>(x0.edge);
        transient_start = base.beta[i] == 0.0 && base.measure.edges[i].is_zero();
    }
    if (!transient_start) {
        PathBundle pb;
        build_bundle(base, eps, x0, tr.t.back(), rp, seed, path_index, 0, pb);
        render_sticky(pb, alpha, tr);
        return;
    }
    RngStream rng(seed, "drv", drv_index(path_index, 0, x0.edge));
    BrownianKnots head;
    sample_brownian_refined(x0.x, tr.t.back(), rp, rng, head);
    const double tau = head.max_level > 0.0 ? head.max_inverse.rv[0] : tr.t.back();
    std::size_t hint = 0;
    std::size_t j = 0;
    for (; j < tr.t.size() && tr.t[j] < tau; ++j) {
        tr.x[j] = GraphPoint::edge_at(x0.edge, head.value_at(tr.t[j], hint));
        tr.local_time[j] = 0.0;
    }
    if (j < tr.t.size()) {
        PathBundle pb;
        build_bundle(base, eps, GraphPoint::center(), tr.t.back() - tau, rp, seed, path_index, 1,
                     pb);
        render_sticky(pb, alpha, tr, j, tau);
    }
}

} // namespace detail

// Base motion with alpha = gamma = 0: the edges' relocated reflections glued
// by the balance solve.  eps is the truncation level for infinite jump
// measures (ignored otherwise).  A start on an inactive edge is transient:
// the path runs as plain Brownian motion there until it first reaches the
// center and never returns to that edge.
inline Trajectory simulate_w0(const BoundaryParams& p, double eps, GraphPoint x0, double horizon,
                              double dt, Seed seed, std::uint32_t path_index = 0,
                              const RefineParams& rp = {}) {
    if (p.alpha != 0.0 || p.gamma != 0.0)
        throw std::invalid_argument("simulate_w0: alpha and gamma must be zero here");
    Trajectory tr;
    detail::init_grid(tr, horizon, dt);
    tr.meta = {p, seed.master, path_index, dt, eps, rp};
    detail::render_pipeline(p, eps, x0, rp, seed, path_index, 0.0, tr);
    return tr;
}

// The Walsh process: excursion weights beta, no stickiness, no killing, no
// jumps.  Identical draws to simulate_w0 with a zero measure by definition.
inline Trajectory simulate_walsh(const std::vector<double>& beta, GraphPoint x0, double horizon,
                                 double dt, Seed seed, std::uint32_t path_index = 0,
                                 const RefineParams& rp = {}) {
    double s = 0.0;
    for (double b : beta) {
        if (!(b > 0.0)) throw std::invalid_argument("walsh: weights must be positive");
        s += b;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("walsh: weights must sum to one");
    BoundaryParams p;
    p.beta = beta;
    p.measure = JumpMeasure::zero(static_cast<int>(beta.size()));
    return simulate_w0(p, 0.0, x0, horizon, dt, seed, path_index, rp);
}

// Time-change an already built base path by A = s + alpha*L, re-rendered on
// the same grid.  alpha == 0 returns the base rendering unchanged.
inline Trajectory apply_sticky(const Trajectory& base, const PathBundle& pb, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("sticky: alpha must be nonnegative");
    Trajectory tr = base;
    tr.meta.params.alpha = alpha;
    if (alpha == 0.0) return tr;
    detail::render_sticky(pb, alpha, tr);
    return tr;
}

// Kill at the first grid node whose local time reaches an independent
// exponential level (rate gamma).  The cut is right-continuous on the grid:
// death lands on the first node at or past the true killing time, an O(dt)
// attribution error.  Local time is capped at the killing level.
inline Trajectory apply_killing(const Trajectory& base, double gamma, RngStream& rng) {
    if (gamma < 0.0) throw std::invalid_argument("killing: gamma must be nonnegative");
    Trajectory tr = base;
    if (gamma == 0.0) return tr;
    const double zeta = rng.exponential(gamma);
    for (std::size_t j = 0; j < tr.size(); ++j) {
        if (tr.local_time[j] >= zeta) {
            tr.lifetime_index = std::min(tr.lifetime_index, j);
            break;
        }
    }
    for (std::size_t j = tr.lifetime_index; j < tr.size(); ++j) {
        tr.x[j] = GraphPoint::cemetery();
        tr.local_time[j] = zeta;
    }
    return tr;
}

inline Trajectory apply_killing(const Trajectory& base, double gamma, Seed seed,
                                std::uint32_t path_index) {
    RngStream rng(seed, "kill", path_index);
    return apply_killing(base, gamma, rng);
}

// Full pipeline: base motion, sticky clock, killing.  Parameters must pass
// validation.  The one genuinely degenerate admissible case -- every edge
// weightless and jump-free but alpha > 0 -- stops at the center for good,
// accruing local time at rate 1/alpha until killed.
inline Trajectory simulate_full(const BoundaryParams& p, double eps, GraphPoint x0,
                                double horizon, double dt, Seed seed,
                                std::uint32_t path_index = 0, const RefineParams& rp = {}) {
    const auto report = validate_params(p);
    if (!report.ok()) {
        std::string why = "simulate_full: parameters rejected";
        for (const auto& r : report.reasons) why += "; " + r;
        throw std::invalid_argument(why);
    }
    bool any_active = false;
    for (int i = 0; i < p.k(); ++i)
        any_active = any_active || p.beta[static_cast<std::size_t>(i)] > 0.0 ||
                     !p.measure.edges[static_cast<std::size_t>(i)].is_zero();

    Trajectory tr;
    detail::init_grid(tr, horizon, dt);
    tr.meta = {p, seed.master, path_index, dt, eps, rp};

    if (!any_active) { // alpha > 0 by validation: absorbed at the center
        double tau = 0.0;
        std::size_t j = 0;
        if (x0.kind == GraphPoint::Kind::Edge) {
            RngStream rng(seed, "drv", detail::drv_index(path_index, 0, x0.edge));
            BrownianKnots head;
            sample_brownian_refined(x0.x, horizon, rp, rng, head);
            tau = head.max_level > 0.0 ? head.max_inverse.rv[0] : horizon;
            std::size_t hint = 0;
            for (; j < tr.t.size() && tr.t[j] < tau; ++j) {
                tr.x[j] = GraphPoint::edge_at(x0.edge, head.value_at(tr.t[j], hint));
                tr.local_time[j] = 0.0;
            }
        }
        for (; j < tr.t.size(); ++j) {
            tr.x[j] = GraphPoint::center();
            tr.local_time[j] = (tr.t[j] - tau) / p.alpha;
        }
    } else {
        BoundaryParams base = p;
        base.alpha = 0.0;
        base.gamma = 0.0;
        detail::render_pipeline(base, eps, x0, rp, seed, path_index, p.alpha, tr);
    }
    RngStream kill(seed, "kill", path_index);
    return apply_killing(tr, p.gamma, kill);
}

// Restart construction for finite jump measures: run the jump-free sticky
// process, and at an exponential local-time clock of rate gamma + |m| either
// die (probability gamma/(gamma+|m|)) or restart from m/|m|.  Local time
// accumulates across pieces.
inline Trajectory simulate_concatenation(const BoundaryParams& p, GraphPoint x0, double horizon,
                                         double dt, Seed seed, std::uint32_t path_index = 0,
                                         const RefineParams& rp = {}) {
    const int k = p.k();
    for (int i = 0; i < k; ++i)
        if (!(p.beta[static_cast<std::size_t>(i)] > 0.0))
            throw std::invalid_argument("concatenation: needs positive weights on every edge");
    if (!p.measure.finite())
        throw std::invalid_argument("concatenation: needs a finite jump measure");
    const double delta = p.measure.total();
    const double rate = p.gamma + delta;

    Trajectory tr;
    detail::init_grid(tr, horizon, dt);
    tr.meta = {p, seed.master, path_index, dt, 0.0, rp};

    BoundaryParams piece_params = p;
    piece_params.alpha = 0.0;
    piece_params.gamma = 0.0;
    piece_params.measure = JumpMeasure::zero(k);

    std::vector<double> edge_mass(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        edge_mass[static_cast<std::size_t>(i)] =
            p.measure.edges[static_cast<std::size_t>(i)].total();

    GraphPoint cur = x0;
    std::size_t j0 = 0;     // first grid node owned by the current piece
    double level_off = 0.0; // local time accumulated by finished pieces
    Trajectory piece;
    for (std::uint32_t pc = 0; j0 + 1 < tr.t.size(); ++pc) {
        const double rem = tr.t.back() - tr.t[j0];
        piece.t.assign(tr.t.begin() + static_cast<std::ptrdiff_t>(j0), tr.t.end());
        for (auto& s : piece.t) s -= tr.t[j0];
        piece.t.front() = 0.0;
        piece.x.resize(piece.t.size());
        piece.local_time.resize(piece.t.size());
        piece.lifetime_index = piece.t.size();
        PathBundle pb;
        build_bundle(piece_params, 0.0, cur, rem, rp, seed, path_index, pc, pb);
        detail::render_sticky(pb, p.alpha, piece);

        std::size_t jk = piece.size(); // first node at or past the clock
        double zeta = std::numeric_limits<double>::infinity();
        if (rate > 0.0) {
            RngStream clk(seed, "clk", detail::piece_index(path_index, pc));
            zeta = clk.exponential(rate);
            for (std::size_t j = 0; j < piece.size(); ++j)
                if (piece.local_time[j] >= zeta) {
                    jk = j;
                    break;
                }
        }
        for (std::size_t j = 0; j < jk; ++j) {
            tr.x[j0 + j] = piece.x[j];
            tr.local_time[j0 + j] = level_off + piece.local_time[j];
        }
        if (jk == piece.size()) return tr; // horizon reached alive

        level_off += zeta;
        j0 += jk;
        RngStream flip(seed, "flip", detail::piece_index(path_index, pc));
        if (flip.uniform() * rate >= delta) { // death
            tr.lifetime_index = j0;
            for (std::size_t j = j0; j < tr.size(); ++j) {
                tr.x[j] = GraphPoint::cemetery();
                tr.local_time[j] = level_off;
            }
            return tr;
        }
        RngStream rst(seed, "rst", detail::piece_index(path_index, pc));
        double pick = rst.uniform() * delta;
        int edge = k - 1;
        for (int i = 0; i < k; ++i) {
            pick -= edge_mass[static_cast<std::size_t>(i)];
            if (pick < 0.0) {
                edge = i;
                break;
            }
        }
        const auto& tail = p.measure.edges[static_cast<std::size_t>(edge)];
        const double u = (1.0 - rst.uniform()) * tail.total(); // in (0, total]
        cur = GraphPoint::edge_at(edge, tail.inverse(u));
        // the node at the clock shows the restart point (right continuity);
        // the next piece renders it as its own first node
    }
    if (j0 + 1 == tr.t.size()) { // restart landed on the final grid node
        tr.x.back() = cur;
        tr.local_time.back() = level_off;
    }
    return tr;
}

// Relabel edges through the surjection psi onto a smaller star; states map
// pointwise, local time is untouched.
inline Trajectory lump_trajectory(const Trajectory& tr, const std::vector<int>& psi, int n) {
    Trajectory out = tr;
    out.meta.params = lump_map(tr.meta.params, psi, n);
    for (auto& gp : out.x) {
        if (gp.kind == GraphPoint::Kind::Edge || gp.kind == GraphPoint::Kind::EdgeInfinity) {
            if (gp.edge < 0 || gp.edge >= static_cast<int>(psi.size()))
                throw std::invalid_argument("lump: trajectory edge out of range");
            gp.edge = psi[static_cast<std::size_t>(gp.edge)];
        }
    }
    return out;
}

// Occupation-band estimate of the symmetric local time: cumulative
// (1/2eps) * measure{s <= t : 0 < |X(s)| <= eps} read off the grid.
inline std::vector<double> estimate_symmetric_local_time(const Trajectory& tr, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("band estimate: eps must be positive");
    std::vector<double> out(tr.size(), 0.0);
    for (std::size_t j = 1; j < tr.size(); ++j) {
        const double dt = tr.t[j] - tr.t[j - 1];
        const bool in_band = tr.x[j].kind == GraphPoint::Kind::Edge && tr.x[j].x <= eps;
        out[j] = out[j - 1] + (in_band ? dt / (2.0 * eps) : 0.0);
    }
    return out;
}

} // namespace starbm
