// analytic.hpp — closed-form ground truth: resolvents, lifetime Laplace
// transforms, the λ-potential of the boundary local time, skew-walsh
// transition densities, and the singular-regime pseudo-resolvent.
//
// Everything reduces to four quadrature primitives built on the kernel
// e^{-sq·|x-y|} with sq = √(2λ):
//   C_i(g)      = (1/sq) ∫₀^∞ e^{-sq·y} g_i(y) dy
//   (R⁰g)_i(x)  = minimal (absorbed-at-center) resolvent
//   I1          = ∫ (1 - e^{-sq·x}) dm     (via tails: sq ∫ e^{-sq·x} N dx)
//   Ig          = ∫ R⁰g dm                 (via tails: ∫ (R⁰g)' N dx)
// The measure integrals use ∫ h dm = ∫₀^∞ h'(x) N(x) dx, valid whenever
// h(0) = 0, h is C¹ and bounded, and x·N(x) → 0 at both ends; the boundary
// terms of integration by parts cancel across any split point, so one
// formula covers finite and infinite measures alike.
//
// The full resolvent is R_λg = R⁰g + cbar(g)·e^{-sq·x} with
//   cbar(g) = [α g(0) + 2 sq Σ β_i C_i(g) + Ig] / [λα + sq Σβ + γ + I1],
// a single expression valid for every admissible parameter choice,
// including the singular regime α = Σβ = 0 with finite nonzero measure
// (then it is only a pseudo-resolvent; see singular_resolvent).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "quadrature.hpp"

namespace starbm {

struct QuadratureBudget {
    double abs_tol = 1e-9;
};

// Member of ℭ(S): bounded per-edge functions with declared limits at the
// edge ends, agreeing at the center.
struct EdgeFunction {
    std::vector<std::function<double(double)>> edge;
    std::vector<double> limit; // value at the far end of each edge
    // optional per-edge sorted abscissae where the function is not smooth;
    // the quadratures split there instead of hunting for the break adaptively
    std::vector<std::vector<double>> kinks;

    int k() const { return static_cast<int>(edge.size()); }
    const std::vector<double>& kinks_at(int i) const {
        static const std::vector<double> none;
        return kinks.size() == edge.size() ? kinks[static_cast<std::size_t>(i)] : none;
    }
    double at(int i, double y) const { return edge[static_cast<std::size_t>(i)](y); }
    double center() const { return edge.front()(0.0); }

    double operator()(const GraphPoint& p) const {
        switch (p.kind) {
            case GraphPoint::Kind::Center: return center();
            case GraphPoint::Kind::Edge: return at(p.edge, p.x);
            case GraphPoint::Kind::EdgeInfinity: return limit[static_cast<std::size_t>(p.edge)];
            case GraphPoint::Kind::Cemetery: return 0.0;
        }
        return 0.0;
    }

    void check_center_consistency(double tol = 1e-9) const {
        if (edge.empty() || edge.size() != limit.size())
            throw std::invalid_argument("EdgeFunction: empty or inconsistent arrays");
        const double c = center();
        for (const auto& f : edge)
            if (std::abs(f(0.0) - c) > tol * (1.0 + std::abs(c)))
                throw std::invalid_argument("EdgeFunction: discontinuous at the center");
    }

    static EdgeFunction constant(int k, double v) {
        EdgeFunction g;
        for (int i = 0; i < k; ++i) {
            g.edge.emplace_back([v](double) { return v; });
            g.limit.push_back(v);
        }
        return g;
    }
    static EdgeFunction exp_decay(int k, double rate) {
        if (rate <= 0.0) throw std::invalid_argument("exp_decay: rate > 0 required");
        EdgeFunction g;
        for (int i = 0; i < k; ++i) {
            g.edge.emplace_back([rate](double y) { return std::exp(-rate * y); });
            g.limit.push_back(0.0);
        }
        return g;
    }
    // Smooth compactly supported bump on one edge, vanishing at the center.
    static EdgeFunction bump(int k, int on_edge, double center, double width) {
        if (center - width <= 0.0 || width <= 0.0)
            throw std::invalid_argument("bump: need 0 < width < center");
        EdgeFunction g = constant(k, 0.0);
        g.edge[static_cast<std::size_t>(on_edge)] = [center, width](double y) {
            const double z = (y - center) / width;
            return std::abs(z) < 1.0 ? std::exp(-1.0 / (1.0 - z * z)) : 0.0;
        };
        g.kinks.assign(static_cast<std::size_t>(k), {});
        g.kinks[static_cast<std::size_t>(on_edge)] = {center - width, center + width};
        return g;
    }
    static EdgeFunction indicator_band(int k, int on_edge, double lo, double hi) {
        if (!(0.0 < lo && lo < hi)) throw std::invalid_argument("indicator_band: need 0 < lo < hi");
        EdgeFunction g = constant(k, 0.0);
        g.edge[static_cast<std::size_t>(on_edge)] = [lo, hi](double y) {
            return (lo <= y && y <= hi) ? 1.0 : 0.0;
        };
        g.kinks.assign(static_cast<std::size_t>(k), {});
        g.kinks[static_cast<std::size_t>(on_edge)] = {lo, hi};
        return g;
    }
};

namespace detail {

inline double require_sq(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda > 0 required");
    return std::sqrt(2.0 * lambda);
}

// ∫_a^b f with b possibly infinite, partitioned into doubling blocks of
// initial length `scale` so the adaptive rule tracks exponential decay.
template <typename F>
QuadratureResult integrate_scaled(const F& f, double a, double b, double tol, double scale) {
    if (std::isinf(b)) return integrate_to_inf(f, a, tol, scale, 128);
    QuadratureResult out;
    double lo = a, len = scale;
    while (lo < b) {
        const double hi = std::min(lo + len, b);
        const QuadratureResult piece = integrate(f, lo, hi, 0.25 * tol);
        out.value += piece.value;
        out.error += piece.error;
        out.converged = out.converged && piece.converged;
        lo = hi;
        len *= 2.0;
    }
    return out;
}

inline void accumulate(QuadratureResult& out, const QuadratureResult& piece, double factor = 1.0) {
    out.value += factor * piece.value;
    out.error += std::abs(factor) * piece.error;
    out.converged = out.converged && piece.converged;
}

// ∫_a^b f split at interior cut points, blocks scaled for exponential decay.
template <typename F>
QuadratureResult integrate_with_cuts(const F& f, double a, double b, double tol, double scale,
                                     const std::vector<double>& cuts) {
    QuadratureResult out;
    double lo = a;
    const double each = tol / static_cast<double>(cuts.size() + 1);
    for (double cut : cuts) {
        if (!(cut > lo && cut < b)) continue;
        accumulate(out, integrate_scaled(f, lo, cut, each, scale));
        lo = cut;
    }
    accumulate(out, integrate_scaled(f, lo, b, each, scale));
    return out;
}

// ∫₀^∞ w(x) N(x) dx, component by component.  Power tails N = c x^{-a} get
// the substitution x = u^{1/(1-a)}, under which c x^{-a} dx = c/(1-a) du and
// the singularity at zero disappears; tabulated tails integrate piecewise
// between their knots; smooth tails go straight to the block rule.
template <typename F>
QuadratureResult integrate_against_tail(const EdgeTail& tail, const F& w, double tol,
                                        double scale) {
    QuadratureResult out;
    const double part_tol = tol / static_cast<double>(tail.parts.size() + 1);
    for (const auto& part : tail.parts) {
        switch (part.kind) {
            case TailComponent::Kind::StableLike: {
                const double pw = 1.0 / (1.0 - part.a);
                const double factor = part.c * pw;
                accumulate(out,
                           integrate_to_inf([&](double u) { return w(std::pow(u, pw)); }, 0.0,
                                            part_tol / factor, std::pow(scale, 1.0 - part.a), 128),
                           factor);
                break;
            }
            case TailComponent::Kind::Tabulated: {
                auto f = [&](double x) { return w(x) * part.value(x); };
                double lo = 0.0;
                const double each = part_tol / static_cast<double>(part.xs.size());
                for (double cut : part.xs) {
                    accumulate(out, integrate(f, lo, cut, each));
                    lo = cut;
                }
                break; // the tabulated tail vanishes beyond its last knot
            }
            default: {
                auto f = [&](double x) { return w(x) * part.value(x); };
                accumulate(out, integrate_to_inf(f, 0.0, part_tol, scale, 128));
            }
        }
    }
    return out;
}

// Near/far pieces shared by the minimal resolvent and its x-derivative:
//   near(x) = ∫₀ˣ e^{-sq(x-y)} (1 - e^{-2 sq y}) g(y) dy
//   far(x)  = ∫₀^∞ e^{-sq z} g(x+z) dz
// value  = (near + (1 - e^{-2 sq x})·far) / sq
// deriv  = -near + (1 + e^{-2 sq x})·far
inline const std::vector<double> no_kinks{};

template <typename Gi>
std::pair<double, double> min_resolvent_pieces(double sq, const Gi& gi, double x, double tol,
                                               const std::vector<double>& kinks = no_kinks) {
    const double scale = 1.0 / sq;
    std::vector<double> below_cuts, above_cuts;
    for (double kx : kinks) {
        if (kx < x) below_cuts.push_back(x - kx); // integrand sampled at x - z
        if (kx > x) above_cuts.push_back(kx - x); // integrand sampled at x + z
    }
    std::sort(below_cuts.begin(), below_cuts.end());
    std::sort(above_cuts.begin(), above_cuts.end());
    const double below =
        integrate_with_cuts([&](double z) { return std::exp(-sq * z) *
                                                    (-std::expm1(-2.0 * sq * (x - z))) *
                                                    gi(x - z); },
                            0.0, x, tol, scale, below_cuts)
            .value;
    const double above =
        integrate_with_cuts([&](double z) { return std::exp(-sq * z) * gi(x + z); }, 0.0,
                            std::numeric_limits<double>::infinity(), tol, scale, above_cuts)
            .value;
    return {below, above};
}

template <typename Gi>
double min_resolvent_value(double sq, const Gi& gi, double x, double tol,
                           const std::vector<double>& kinks = no_kinks) {
    if (x == 0.0) return 0.0;
    const auto [below, above] = min_resolvent_pieces(sq, gi, x, tol, kinks);
    return (below + (-std::expm1(-2.0 * sq * x)) * above) / sq;
}

template <typename Gi>
double min_resolvent_deriv(double sq, const Gi& gi, double x, double tol,
                           const std::vector<double>& kinks = no_kinks) {
    const auto [below, above] = min_resolvent_pieces(sq, gi, x, tol, kinks);
    return -below + (1.0 + std::exp(-2.0 * sq * x)) * above;
}

inline double i1_integral(double sq, const JumpMeasure& m, double tol) {
    double total = 0.0;
    for (const auto& tail : m.edges) {
        if (tail.is_zero()) continue;
        if (!std::isfinite(tail.integral_01()))
            throw std::domain_error("jump measure fails the (1 ∧ x)-integrability requirement");
        total += sq * integrate_against_tail(
                          tail, [&](double x) { return std::exp(-sq * x); }, tol, 1.0 / sq)
                          .value;
    }
    return total;
}

inline double ig_integral(double sq, const JumpMeasure& m, const EdgeFunction& g, double tol) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.edges.size(); ++i) {
        const auto& tail = m.edges[i];
        if (tail.is_zero()) continue;
        const auto& gi = g.edge[i];
        const auto& kinks = g.kinks_at(static_cast<int>(i));
        total += integrate_against_tail(
                     tail,
                     [&](double x) { return min_resolvent_deriv(sq, gi, x, tol, kinks); }, tol,
                     1.0 / sq)
                     .value;
    }
    return total;
}

// ∫_eps^∞ w(x) N(x) dx.  Starting past zero clears the power-law
// singularity, so every component takes the plain block rule; tabulated
// tails still split at their knots.
template <typename F>
QuadratureResult integrate_against_tail_from(const EdgeTail& tail, double eps, const F& w,
                                             double tol, double scale) {
    QuadratureResult out;
    const double part_tol = tol / static_cast<double>(tail.parts.size() + 1);
    for (const auto& part : tail.parts) {
        auto f = [&](double x) { return w(x) * part.value(x); };
        if (part.kind == TailComponent::Kind::Tabulated) {
            double lo = eps;
            const double each = part_tol / static_cast<double>(part.xs.size() + 1);
            for (double cut : part.xs) {
                if (!(cut > lo)) continue;
                accumulate(out, integrate(f, lo, cut, each));
                lo = cut;
            } // the tabulated tail vanishes beyond its last knot
        } else {
            accumulate(out, integrate_to_inf(f, eps, part_tol, scale, 128));
        }
    }
    return out;
}

// Integrals of h against the measure restricted to jumps larger than eps,
// by parts: ∫_{(eps,∞)} h dm = h(eps) N(eps) + ∫_eps^∞ h'(x) N(x) dx.
inline double i1_integral_from(double sq, const JumpMeasure& m, double eps, double tol) {
    double total = 0.0;
    for (const auto& tail : m.edges) {
        if (tail.is_zero()) continue;
        total += -std::expm1(-sq * eps) * tail.value(eps) +
                 sq * integrate_against_tail_from(
                          tail, eps, [&](double x) { return std::exp(-sq * x); }, tol, 1.0 / sq)
                          .value;
    }
    return total;
}

inline double ig_integral_from(double sq, const JumpMeasure& m, const EdgeFunction& g, double eps,
                               double tol) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.edges.size(); ++i) {
        const auto& tail = m.edges[i];
        if (tail.is_zero()) continue;
        const auto& gi = g.edge[i];
        const auto& kinks = g.kinks_at(static_cast<int>(i));
        total += min_resolvent_value(sq, gi, eps, tol, kinks) * tail.value(eps) +
                 integrate_against_tail_from(
                     tail, eps,
                     [&](double x) { return min_resolvent_deriv(sq, gi, x, tol, kinks); }, tol,
                     1.0 / sq)
                     .value;
    }
    return total;
}

} // namespace detail

inline std::vector<double> coeff_c(double lambda, const EdgeFunction& g,
                                   QuadratureBudget q = {}) {
    const double sq = detail::require_sq(lambda);
    std::vector<double> out;
    out.reserve(g.edge.size());
    for (int i = 0; i < g.k(); ++i) {
        const auto& gi = g.edge[static_cast<std::size_t>(i)];
        out.push_back(detail::integrate_with_cuts(
                          [&](double y) { return std::exp(-sq * y) * gi(y); }, 0.0,
                          std::numeric_limits<double>::infinity(), q.abs_tol, 1.0 / sq,
                          g.kinks_at(i))
                          .value /
                      sq);
    }
    return out;
}

inline double minimal_resolvent(double lambda, const EdgeFunction& g, const GraphPoint& x,
                                QuadratureBudget q = {}) {
    const double sq = detail::require_sq(lambda);
    switch (x.kind) {
        case GraphPoint::Kind::Center: return 0.0;
        case GraphPoint::Kind::Edge:
            return detail::min_resolvent_value(sq, g.edge[static_cast<std::size_t>(x.edge)], x.x,
                                               q.abs_tol, g.kinks_at(x.edge));
        case GraphPoint::Kind::EdgeInfinity:
            return g.limit[static_cast<std::size_t>(x.edge)] / lambda;
        case GraphPoint::Kind::Cemetery: return 0.0;
    }
    return 0.0;
}

inline double lifetime_transform_min(double lambda, const GraphPoint& x) {
    const double sq = detail::require_sq(lambda);
    switch (x.kind) {
        case GraphPoint::Kind::Center: return 1.0;
        case GraphPoint::Kind::Edge: return std::exp(-sq * x.x);
        case GraphPoint::Kind::EdgeInfinity: return 0.0;
        case GraphPoint::Kind::Cemetery: return 0.0;
    }
    return 0.0;
}

struct MeasureIntegrals {
    double i1 = 0.0;                                // ∫ (1 - e^{-sq x}) dm
    std::function<double(const EdgeFunction&)> ig;  // g ↦ ∫ R⁰g dm
};

inline MeasureIntegrals measure_integrals(double lambda, const JumpMeasure& m,
                                          QuadratureBudget q = {}) {
    const double sq = detail::require_sq(lambda);
    MeasureIntegrals out;
    out.i1 = detail::i1_integral(sq, m, q.abs_tol);
    if (!std::isfinite(out.i1)) throw std::domain_error("measure integral diverges");
    out.ig = [sq, m, q](const EdgeFunction& g) { return detail::ig_integral(sq, m, g, q.abs_tol); };
    return out;
}

// Same integrals for the measure restricted to jumps larger than eps — the
// law the simulator realises when told to truncate.  As eps decreases the
// integrals increase monotonically towards their untruncated values.
inline MeasureIntegrals measure_integrals_truncated(double lambda, const JumpMeasure& m,
                                                    double eps, QuadratureBudget q = {}) {
    if (!(eps > 0.0)) return measure_integrals(lambda, m, q);
    const double sq = detail::require_sq(lambda);
    MeasureIntegrals out;
    out.i1 = detail::i1_integral_from(sq, m, eps, q.abs_tol);
    out.ig = [sq, m, eps, q](const EdgeFunction& g) {
        return detail::ig_integral_from(sq, m, g, eps, q.abs_tol);
    };
    return out;
}

// ∫ g dm for a finite measure, through the inverse-tail parametrization
// ∫₀^{|m_i|} g_i(N_i^{-1}(u)) du (atoms become flat stretches of N^{-1}).
inline double measure_expectation(const JumpMeasure& m, const EdgeFunction& g,
                                  QuadratureBudget q = {}) {
    if (!m.finite()) throw std::invalid_argument("measure_expectation: finite measure required");
    double total = 0.0;
    for (std::size_t i = 0; i < m.edges.size(); ++i) {
        const auto& tail = m.edges[i];
        const double mass = tail.total();
        if (mass == 0.0) continue;
        const auto& gi = g.edge[i];
        total += integrate([&](double u) { return gi(tail.inverse(u)); }, 0.0, mass, q.abs_tol)
                     .value;
    }
    return total;
}

// Full resolvent R_λ g evaluated through the unified coefficient; caches
// the coefficient so many points x are cheap.  A positive truncation_eps
// evaluates the process whose jump measure keeps only jumps larger than
// eps, matching the simulator's truncated sampling.
class ResolventFull {
  public:
    ResolventFull(BoundaryParams p, double lambda, EdgeFunction g, QuadratureBudget q = {},
                  double truncation_eps = 0.0)
        : p_(std::move(p)), g_(std::move(g)), lambda_(lambda),
          sq_(detail::require_sq(lambda)), q_(q) {
        if (p_.k() != g_.k()) throw std::invalid_argument("resolvent: g edge count mismatch");
        if (p_.measure.k() != p_.k())
            throw std::invalid_argument("resolvent: measure edge count mismatch");
        g_.check_center_consistency();
        double weighted = 0.0;
        const std::vector<double> c = coeff_c(lambda_, g_, q_);
        for (int i = 0; i < p_.k(); ++i) weighted += p_.beta[static_cast<std::size_t>(i)] * c[i];
        if (!p_.measure.is_zero()) {
            if (truncation_eps > 0.0) {
                i1_ = detail::i1_integral_from(sq_, p_.measure, truncation_eps, q_.abs_tol);
                ig_ = detail::ig_integral_from(sq_, p_.measure, g_, truncation_eps, q_.abs_tol);
            } else {
                i1_ = detail::i1_integral(sq_, p_.measure, q_.abs_tol);
                ig_ = detail::ig_integral(sq_, p_.measure, g_, q_.abs_tol);
            }
            if (!std::isfinite(i1_)) throw std::domain_error("resolvent: measure integral diverges");
        }
        const double denom = lambda_ * p_.alpha + sq_ * p_.beta_sum() + p_.gamma + i1_;
        if (!(denom > 0.0))
            throw std::domain_error("resolvent: no boundary condition (zero denominator)");
        cbar_ = (p_.alpha * g_.center() + 2.0 * sq_ * weighted + ig_) / denom;
        denom_ = denom;
    }

    double operator()(const GraphPoint& x) const {
        switch (x.kind) {
            case GraphPoint::Kind::Center: return cbar_;
            case GraphPoint::Kind::Edge:
                return detail::min_resolvent_value(sq_, g_.edge[static_cast<std::size_t>(x.edge)],
                                                   x.x, q_.abs_tol, g_.kinks_at(x.edge)) +
                       cbar_ * std::exp(-sq_ * x.x);
            case GraphPoint::Kind::EdgeInfinity:
                return g_.limit[static_cast<std::size_t>(x.edge)] / lambda_;
            case GraphPoint::Kind::Cemetery: return 0.0;
        }
        return 0.0;
    }

    double coefficient() const { return cbar_; }    // value at the center
    double measure_i1() const { return i1_; }
    double measure_ig() const { return ig_; }
    double denominator() const { return denom_; }
    double limit_at(int i) const { return g_.limit[static_cast<std::size_t>(i)] / lambda_; }
    int k() const { return p_.k(); }

  private:
    BoundaryParams p_;
    EdgeFunction g_;
    double lambda_, sq_;
    QuadratureBudget q_;
    double i1_ = 0.0, ig_ = 0.0, cbar_ = 0.0, denom_ = 0.0;
};

inline double resolvent_full(const BoundaryParams& p, double lambda, const EdgeFunction& g,
                             const GraphPoint& x, QuadratureBudget q = {}) {
    return ResolventFull(p, lambda, g, q)(x);
}

// Wrap an evaluated resolvent as a new ℭ(S) member (for nested
// resolvent-of-resolvent identities).
inline EdgeFunction to_edge_function(std::shared_ptr<const ResolventFull> r) {
    EdgeFunction g;
    for (int i = 0; i < r->k(); ++i) {
        g.edge.emplace_back([r, i](double y) { return (*r)(GraphPoint::edge_at(i, y)); });
        g.limit.push_back(r->limit_at(i));
    }
    return g;
}

// Alternative route for finite measures: split the jumps off as restarts
// of the jump-free process at rate δ from the normalized measure μ,
//   R̃_λ g = R'g + M(g)·l'      with R' the (α, β, γ+δ, 0)-resolvent,
//   M(g) = δ ∫ R'g dμ / (γ + δ λ ∫ R'1 dμ),
//   l'(x) = (γ+δ) e^{-sq x} / (λα + sq + γ+δ),
// requiring Σβ = 1.  Algebraically a disguise of the unified formula;
// kept as an independent cross-check path.
inline double resolvent_finite_alt(const BoundaryParams& p, double lambda, const EdgeFunction& g,
                                   const GraphPoint& x, QuadratureBudget q = {}) {
    if (!p.measure.finite())
        throw std::invalid_argument("resolvent_finite_alt: finite measure required");
    if (std::abs(p.beta_sum() - 1.0) > 1e-12)
        throw std::invalid_argument("resolvent_finite_alt: sum(beta) must be 1");
    const double sq = detail::require_sq(lambda);
    const double delta = p.measure.total();

    BoundaryParams inner = p;
    inner.gamma = p.gamma + delta;
    inner.measure = JumpMeasure::zero(p.k());
    const auto shifted = std::make_shared<const ResolventFull>(inner, lambda, g, q);
    if (delta == 0.0) return (*shifted)(x);

    JumpMeasure mu = p.measure; // normalized restart distribution
    for (auto& e : mu.edges) e.scale(1.0 / delta);
    const double avg_g = measure_expectation(mu, to_edge_function(shifted), q);
    const auto shifted_one =
        std::make_shared<const ResolventFull>(inner, lambda, EdgeFunction::constant(p.k(), 1.0), q);
    const double avg_one = measure_expectation(mu, to_edge_function(shifted_one), q);

    const double m_of_g = delta * avg_g / (p.gamma + delta * lambda * avg_one);
    const double dist = x.kind == GraphPoint::Kind::Center ? 0.0 : x.x;
    const double l_shift = std::isinf(dist) || x.kind == GraphPoint::Kind::Cemetery
                               ? 0.0
                               : (p.gamma + delta) * std::exp(-sq * dist) /
                                     (lambda * p.alpha + sq + p.gamma + delta);
    return (*shifted)(x) + m_of_g * l_shift;
}

// λα + sq Σβ + γ + I1 — the recurring boundary denominator.
inline double boundary_denominator(const BoundaryParams& p, double lambda,
                                   QuadratureBudget q = {}) {
    const double sq = detail::require_sq(lambda);
    const double i1 = p.measure.is_zero() ? 0.0 : detail::i1_integral(sq, p.measure, q.abs_tol);
    return lambda * p.alpha + sq * p.beta_sum() + p.gamma + i1;
}

// E e^{-λ K(σ)} where σ is the hitting level of the boundary local time at
// an independent Exp(γ) clock — algebraic reduction of 1 - λ R_λ 1.
inline double lifetime_transform_full(const BoundaryParams& p, double lambda, const GraphPoint& x,
                                      QuadratureBudget q = {}) {
    const double denom = boundary_denominator(p, lambda, q);
    if (!(denom > 0.0)) throw std::domain_error("lifetime: no boundary condition");
    return p.gamma * lifetime_transform_min(lambda, x) / denom;
}

// λ-potential u_λ(x) = E ∫₀^∞ e^{-λt} dK(t) of the boundary local time.
inline double potential_local_time(const BoundaryParams& p, double lambda, const GraphPoint& x,
                                   QuadratureBudget q = {}) {
    for (int i = 0; i < p.k(); ++i)
        if (p.beta[static_cast<std::size_t>(i)] == 0.0 &&
            p.measure.edges[static_cast<std::size_t>(i)].finite())
            throw std::domain_error(
                "potential_local_time: zero-weight edges need infinite jump mass");
    const double denom = boundary_denominator(p, lambda, q);
    if (!(denom > 0.0)) throw std::domain_error("potential: no boundary condition");
    return lifetime_transform_min(lambda, x) / denom;
}

// Transition density of the jump-free, conservative process (α = γ = 0,
// m = 0) with Σβ = 1, against length measure on the edges.
inline double walsh_density(const std::vector<double>& beta, double t, const GraphPoint& from,
                            int to_edge, double y) {
    if (!(t > 0.0)) throw std::invalid_argument("walsh_density: t > 0 required");
    double bsum = 0.0;
    for (double b : beta) {
        if (!(b >= 0.0)) throw std::invalid_argument("walsh_density: beta >= 0 required");
        bsum += b;
    }
    if (std::abs(bsum - 1.0) > 1e-9)
        throw std::invalid_argument("walsh_density: beta must be normalized");
    if (from.kind == GraphPoint::Kind::Cemetery)
        throw std::invalid_argument("walsh_density: no density from the cemetery");
    if (y < 0.0) throw std::invalid_argument("walsh_density: y >= 0 required");
    const auto phi = [t](double z) {
        return std::exp(-z * z / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
    };
    const double bj = beta[static_cast<std::size_t>(to_edge)];
    if (from.kind == GraphPoint::Kind::EdgeInfinity) return 0.0;
    if (from.kind == GraphPoint::Kind::Center) return 2.0 * bj * phi(y);
    const double x = from.x;
    if (from.edge == to_edge) return phi(x - y) + (2.0 * bj - 1.0) * phi(x + y);
    return 2.0 * bj * phi(x + y);
}

// Singular regime α = Σβ = 0 with finite nonzero measure δμ: the unified
// formula still yields a pseudo-resolvent whose range lies in the kernel
// of Fg = δ ∫ g dμ - (γ+δ) g(center).
inline double singular_resolvent(double gamma, double delta, const JumpMeasure& mu, double lambda,
                                 const EdgeFunction& g, const GraphPoint& x,
                                 QuadratureBudget q = {}) {
    if (!(delta > 0.0) || !mu.finite() || std::abs(mu.total() - 1.0) > 1e-9)
        throw std::invalid_argument("singular_resolvent: need delta > 0 and probability mu");
    BoundaryParams p;
    p.alpha = 0.0;
    p.gamma = gamma;
    p.beta.assign(static_cast<std::size_t>(mu.k()), 0.0);
    p.measure = mu;
    for (auto& e : p.measure.edges) e.scale(delta);
    return resolvent_full(p, lambda, g, x, q);
}

inline double singular_functional(double gamma, double delta, const JumpMeasure& mu,
                                  const EdgeFunction& g, QuadratureBudget q = {}) {
    if (!(delta > 0.0) || !mu.finite() || std::abs(mu.total() - 1.0) > 1e-9)
        throw std::invalid_argument("singular_functional: need delta > 0 and probability mu");
    return delta * measure_expectation(mu, g, q) - (gamma + delta) * g.center();
}

} // namespace starbm
