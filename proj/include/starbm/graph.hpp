// graph.hpp — star-graph state space, boundary parameters, jump measures.
//
// Measures are stored per edge as mixtures of primitive tail components
// N(x) = mass of (x, ∞).  Tails are the representation of choice because
// both the closed-form integrals and truncated sampling consume tails;
// mixtures make edge-lumping exact (concatenation of component lists).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace starbm {

struct StarGraph {
    int k = 1;
    explicit StarGraph(int edges) : k(edges) {
        if (k < 1) throw std::invalid_argument("StarGraph: k >= 1 required");
    }
};

struct GraphPoint {
    enum class Kind { Center, Edge, EdgeInfinity, Cemetery };
    Kind kind = Kind::Center;
    int edge = -1;  // 0-based edge index for Edge / EdgeInfinity
    double x = 0.0; // distance from center, > 0 for Edge

    static GraphPoint center() { return {}; }
    static GraphPoint edge_at(int i, double x) {
        if (x < 0.0 || !std::isfinite(x)) throw std::invalid_argument("GraphPoint: bad coordinate");
        if (x == 0.0) return center();
        return {Kind::Edge, i, x};
    }
    static GraphPoint infinity(int i) {
        return {Kind::EdgeInfinity, i, std::numeric_limits<double>::infinity()};
    }
    static GraphPoint cemetery() {
        return {Kind::Cemetery, -1, std::numeric_limits<double>::quiet_NaN()};
    }
    bool operator==(const GraphPoint& o) const {
        if (kind != o.kind) return false;
        if (kind == Kind::Edge) return edge == o.edge && x == o.x;
        if (kind == Kind::EdgeInfinity) return edge == o.edge;
        return true;
    }
};

// One primitive tail N(x), x > 0: nonincreasing, finite for every x > 0,
// vanishing at infinity.
struct TailComponent {
    enum class Kind { Exponential, Pareto, StableLike, Tabulated };
    Kind kind = Kind::Exponential;
    double c = 0.0;    // overall mass scale
    double rate = 1.0; // Exponential: N(x) = c e^{-rate x}
    double a = 0.5;    // Pareto: c (1+x)^{-a}; StableLike: c x^{-a}, 0<a<1
    // Tabulated: N = n_left[i] just before xs[i], n_right[i] at xs[i],
    // affine between knots, n_left[0] on (0, xs[0]), 0 beyond xs.back().
    std::vector<double> xs, n_left, n_right;

    static TailComponent exponential(double mass, double decay) {
        if (mass < 0.0 || decay <= 0.0) throw std::invalid_argument("exponential tail: bad params");
        TailComponent t;
        t.kind = Kind::Exponential;
        t.c = mass;
        t.rate = decay;
        return t;
    }
    static TailComponent pareto(double mass, double exponent) {
        if (mass < 0.0 || exponent <= 0.0) throw std::invalid_argument("pareto tail: bad params");
        TailComponent t;
        t.kind = Kind::Pareto;
        t.c = mass;
        t.a = exponent;
        return t;
    }
    static TailComponent stable_like(double scale, double exponent) {
        if (scale < 0.0 || exponent <= 0.0 || exponent >= 1.0)
            throw std::invalid_argument("stable-like tail: need 0 < a < 1");
        TailComponent t;
        t.kind = Kind::StableLike;
        t.c = scale;
        t.a = exponent;
        return t;
    }
    static TailComponent tabulated(std::vector<double> x, std::vector<double> left,
                                   std::vector<double> right) {
        if (x.empty() || x.size() != left.size() || x.size() != right.size())
            throw std::invalid_argument("tabulated tail: inconsistent arrays");
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] <= 0.0 || left[i] < right[i])
                throw std::invalid_argument("tabulated tail: knots must have x>0, left>=right");
            if (i > 0 && (x[i] <= x[i - 1] || left[i] > right[i - 1]))
                throw std::invalid_argument("tabulated tail: must be nonincreasing");
        }
        if (right.back() != 0.0)
            throw std::invalid_argument("tabulated tail: must vanish at infinity");
        TailComponent t;
        t.kind = Kind::Tabulated;
        t.xs = std::move(x);
        t.n_left = std::move(left);
        t.n_right = std::move(right);
        return t;
    }

    double value(double x) const {
        switch (kind) {
            case Kind::Exponential: return c * std::exp(-rate * x);
            case Kind::Pareto: return c * std::pow(1.0 + x, -a);
            case Kind::StableLike: return c * std::pow(x, -a);
            case Kind::Tabulated: {
                if (x < xs.front()) return n_left.front();
                if (x >= xs.back()) return n_right.back();
                std::size_t i = 0;
                while (xs[i + 1] <= x) ++i;
                if (x == xs[i]) return n_right[i];
                const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
                return n_right[i] + w * (n_left[i + 1] - n_right[i]);
            }
        }
        return 0.0;
    }

    double total() const { // mass of (0, ∞)
        switch (kind) {
            case Kind::Exponential:
            case Kind::Pareto: return c;
            case Kind::StableLike:
                return c == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            case Kind::Tabulated: return n_left.front();
        }
        return 0.0;
    }

    bool finite() const { return std::isfinite(total()); }

    // Smallest x with N(x) <= n; inverse-tail sampling primitive.
    double inverse(double n) const {
        switch (kind) {
            case Kind::Exponential: return n >= c ? 0.0 : std::log(c / n) / rate;
            case Kind::Pareto: return n >= c ? 0.0 : std::pow(c / n, 1.0 / a) - 1.0;
            case Kind::StableLike: return std::pow(c / n, 1.0 / a);
            case Kind::Tabulated: {
                if (n >= n_left.front()) return 0.0;
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    if (n >= n_right[i]) return xs[i]; // atoms cover [n_right, n_left)
                    if (i + 1 < xs.size() && n >= n_left[i + 1]) {
                        const double w = (n_right[i] - n) / (n_right[i] - n_left[i + 1]);
                        return xs[i] + w * (xs[i + 1] - xs[i]);
                    }
                }
                return xs.back();
            }
        }
        return 0.0;
    }

    double integral_01() const { // ∫₀¹ N(x) dx, exact per kind
        switch (kind) {
            case Kind::Exponential: return c * (1.0 - std::exp(-rate)) / rate;
            case Kind::Pareto:
                return a == 1.0 ? c * std::log(2.0)
                                : c * (std::pow(2.0, 1.0 - a) - 1.0) / (1.0 - a);
            case Kind::StableLike: return c / (1.0 - a);
            case Kind::Tabulated: {
                double acc = 0.0, prev_x = 0.0, prev_n = n_left.front();
                for (std::size_t i = 0; i < xs.size() && prev_x < 1.0; ++i) {
                    const double x1 = std::min(xs[i], 1.0);
                    const double v1 = (xs[i] <= 1.0)
                                          ? n_left[i]
                                          : prev_n + (n_left[i] - prev_n) * (1.0 - prev_x) /
                                                         (xs[i] - prev_x);
                    acc += 0.5 * (prev_n + v1) * (x1 - prev_x);
                    prev_x = xs[i];
                    prev_n = n_right[i];
                }
                if (prev_x < 1.0) acc += prev_n * (1.0 - prev_x);
                return acc;
            }
        }
        return 0.0;
    }

    void scale(double f) {
        if (f < 0.0) throw std::invalid_argument("tail scale: negative factor");
        c *= f;
        for (auto& v : n_left) v *= f;
        for (auto& v : n_right) v *= f;
    }

    // Abscissae where the tail is not smooth (quadrature split points).
    std::vector<double> knots() const {
        return kind == Kind::Tabulated ? xs : std::vector<double>{};
    }
};

// Mixture of components on one edge.
struct EdgeTail {
    std::vector<TailComponent> parts;

    double value(double x) const {
        double s = 0.0;
        for (const auto& p : parts) s += p.value(x);
        return s;
    }
    double total() const {
        double s = 0.0;
        for (const auto& p : parts) s += p.total();
        return s;
    }
    bool finite() const {
        for (const auto& p : parts)
            if (!p.finite()) return false;
        return true;
    }
    bool is_zero() const { return total() == 0.0; }
    double integral_01() const {
        double s = 0.0;
        for (const auto& p : parts) s += p.integral_01();
        return s;
    }
    void scale(double f) {
        for (auto& p : parts) p.scale(f);
    }
    std::vector<double> knots() const {
        std::vector<double> out;
        for (const auto& p : parts) {
            auto k = p.knots();
            out.insert(out.end(), k.begin(), k.end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    // Smallest x with value(x) <= n (exact for one part, bisection for mixtures).
    double inverse(double n) const {
        if (parts.size() == 1) return parts[0].inverse(n);
        if (n >= total()) return 0.0;
        double hi = 1.0;
        while (value(hi) > n) hi *= 2.0;
        double lo = 0.0;
        for (int it = 0; it < 200 && (hi - lo) > 1e-15 * (1.0 + hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (value(mid) > n ? lo : hi) = mid;
        }
        return hi;
    }
};

struct JumpMeasure {
    std::vector<EdgeTail> edges;

    static JumpMeasure zero(int k) {
        JumpMeasure m;
        m.edges.resize(static_cast<std::size_t>(k));
        return m;
    }

    bool is_zero() const {
        for (const auto& e : edges)
            if (!e.is_zero()) return false;
        return true;
    }
    bool finite() const {
        for (const auto& e : edges)
            if (!e.finite()) return false;
        return true;
    }
    double total() const {
        double s = 0.0;
        for (const auto& e : edges) s += e.total();
        return s;
    }
    int k() const { return static_cast<int>(edges.size()); }
};

struct BoundaryParams {
    double alpha = 0.0;
    std::vector<double> beta;
    double gamma = 0.0;
    JumpMeasure measure;

    int k() const { return static_cast<int>(beta.size()); }
    double beta_sum() const {
        double s = 0.0;
        for (double b : beta) s += b;
        return s;
    }
};

enum class ParamStatus { Ok, AnalyticOnly, Invalid };

struct ValidationReport {
    ParamStatus status = ParamStatus::Ok;
    std::vector<std::string> reasons;
    std::vector<int> transient_edges; // zero-weight edges kept alive by jump mass

    bool ok() const { return status == ParamStatus::Ok; }
};

inline ValidationReport validate_params(const BoundaryParams& p) {
    ValidationReport r;
    auto fail = [&r](const std::string& why) {
        r.status = ParamStatus::Invalid;
        r.reasons.push_back(why);
    };
    auto downgrade = [&r](const std::string& why) {
        if (r.status == ParamStatus::Ok) r.status = ParamStatus::AnalyticOnly;
        r.reasons.push_back(why);
    };

    if (p.beta.empty()) fail("no edges");
    if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha)) fail("alpha must be finite and >= 0");
    if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) fail("gamma must be finite and >= 0");
    for (std::size_t i = 0; i < p.beta.size(); ++i)
        if (!(p.beta[i] >= 0.0) || !std::isfinite(p.beta[i]))
            fail("beta[" + std::to_string(i) + "] must be finite and >= 0");
    if (p.measure.k() != p.k()) fail("measure edge count differs from k");
    if (r.status == ParamStatus::Invalid) return r;

    for (int i = 0; i < p.k(); ++i) {
        const auto& tail = p.measure.edges[static_cast<std::size_t>(i)];
        for (double x : {1.0, 0.1, 0.01, 0.001})
            if (!std::isfinite(tail.value(x))) {
                fail("tail not finite on edge " + std::to_string(i));
                return r;
            }
        if (!std::isfinite(tail.integral_01())) {
            fail("integral of tail near 0 diverges on edge " + std::to_string(i));
            return r;
        }
    }

    const double mass = p.alpha + p.beta_sum();
    const bool m_zero = p.measure.is_zero();
    const bool m_finite = p.measure.finite();
    if (mass == 0.0) {
        if (m_zero) {
            fail("alpha + sum(beta) = 0 with zero jump measure: no boundary condition");
            return r;
        }
        if (m_finite) {
            downgrade("alpha + sum(beta) = 0 with finite jump measure: resolvent is not Feller");
            return r;
        }
        // infinite measure: pure-jump boundary, admissible
    }
    for (int i = 0; i < p.k(); ++i) {
        if (p.beta[static_cast<std::size_t>(i)] > 0.0) continue;
        const auto& tail = p.measure.edges[static_cast<std::size_t>(i)];
        if (!tail.finite()) continue; // infinite mass keeps the edge recurrent
        if (tail.is_zero()) {
            r.reasons.push_back("edge " + std::to_string(i) + " inert (no weight, no jump mass)");
        } else {
            r.transient_edges.push_back(i);
            r.reasons.push_back("edge " + std::to_string(i) +
                                " transient (no weight, finite jump mass)");
        }
    }
    return r;
}

inline BoundaryParams normalize_params(const BoundaryParams& p) {
    const double bs = p.beta_sum();
    if (bs <= 0.0) throw std::invalid_argument("normalize_params: sum(beta) must be positive");
    BoundaryParams q = p;
    q.alpha /= bs;
    q.gamma /= bs;
    for (auto& b : q.beta) b /= bs;
    for (auto& e : q.measure.edges) e.scale(1.0 / bs);
    return q;
}

// Push parameters through an edge surjection psi: {0..k-1} -> {0..n-1}.
inline BoundaryParams lump_map(const BoundaryParams& p, const std::vector<int>& psi, int n) {
    if (static_cast<int>(psi.size()) != p.k())
        throw std::invalid_argument("lump_map: psi size mismatch");
    std::vector<bool> hit(static_cast<std::size_t>(n), false);
    for (int target : psi) {
        if (target < 0 || target >= n) throw std::invalid_argument("lump_map: psi out of range");
        hit[static_cast<std::size_t>(target)] = true;
    }
    for (bool h : hit)
        if (!h) throw std::invalid_argument("lump_map: psi not surjective");
    BoundaryParams q;
    q.alpha = p.alpha;
    q.gamma = p.gamma;
    q.beta.assign(static_cast<std::size_t>(n), 0.0);
    q.measure.edges.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < p.k(); ++i) {
        const auto j = static_cast<std::size_t>(psi[static_cast<std::size_t>(i)]);
        q.beta[j] += p.beta[static_cast<std::size_t>(i)];
        const auto& src = p.measure.edges[static_cast<std::size_t>(i)].parts;
        q.measure.edges[j].parts.insert(q.measure.edges[j].parts.end(), src.begin(), src.end());
    }
    return q;
}

} // namespace starbm
