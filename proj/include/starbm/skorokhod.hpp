// skorokhod.hpp — reflection of càdlàg paths on a uniform grid.
//
// CadlagPath holds right-continuous node values on a uniform grid plus an
// explicit jump list (node index, left limit); between nodes the path is
// affine.  reflect() solves the half-line Skorokhod problem; the pushing
// term is constructed so that, in exact float arithmetic, the reflected
// path is 0.0 at every point where the pushing term increases.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "monotone.hpp"

namespace starbm {

struct CadlagPath {
    double dt = 0.0;
    std::vector<double> v;                       // value at node i (right limit)
    std::vector<std::size_t> jump_node;          // sorted node indices with a jump
    std::vector<double> jump_left;               // left limit at those nodes

    static CadlagPath from_values(double step, std::vector<double> values) {
        if (step <= 0.0 || values.empty())
            throw std::invalid_argument("CadlagPath: need positive step and values");
        CadlagPath p;
        p.dt = step;
        p.v = std::move(values);
        return p;
    }

    std::size_t nodes() const { return v.size(); }
    double node_time(std::size_t i) const { return static_cast<double>(i) * dt; }

    void add_jump(std::size_t node, double left_limit) {
        if (node == 0 || node >= nodes())
            throw std::invalid_argument("add_jump: node out of range");
        if (!jump_node.empty() && node <= jump_node.back())
            throw std::invalid_argument("add_jump: nodes must be added in order");
        jump_node.push_back(node);
        jump_left.push_back(left_limit);
    }

    // Left limit at node i (== previous segment's endpoint).
    double left_value(std::size_t i) const {
        if (i == 0) return v[0];
        for (std::size_t j = 0; j < jump_node.size(); ++j)
            if (jump_node[j] == i) return jump_left[j];
        return v[i];
    }
};

struct ReflectResult {
    CadlagPath reflected;
    std::vector<double> pushed;       // pushing term at node i
    std::vector<double> pushed_left;  // its left limit at node i
};

namespace detail {

// Running supremum of (-omega ∨ 0), resolved into (left limit, value) at
// each node.  Linear segments attain their extremes at the endpoints, so
// node resolution is exact.
inline void neg_running_sup(const CadlagPath& w, std::vector<double>& sup_left,
                            std::vector<double>& sup_at) {
    const std::size_t n = w.nodes();
    sup_left.resize(n);
    sup_at.resize(n);
    double run = 0.0;
    std::size_t jp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double left = w.v[i];
        if (jp < w.jump_node.size() && w.jump_node[jp] == i) left = w.jump_left[jp++];
        if (i > 0 && -left > run) run = -left;
        sup_left[i] = run;
        if (-w.v[i] > run) run = -w.v[i];
        sup_at[i] = run;
    }
}

} // namespace detail

// Half-line Skorokhod reflection: pushed = sup_{s<=t}(-omega(s) ∨ 0),
// reflected = omega + pushed.
inline ReflectResult reflect(const CadlagPath& w) {
    ReflectResult out;
    detail::neg_running_sup(w, out.pushed_left, out.pushed);
    out.reflected.dt = w.dt;
    out.reflected.v.resize(w.nodes());
    for (std::size_t i = 0; i < w.nodes(); ++i) out.reflected.v[i] = w.v[i] + out.pushed[i];
    for (std::size_t j = 0; j < w.jump_node.size(); ++j) {
        const std::size_t i = w.jump_node[j];
        out.reflected.add_jump(i, w.jump_left[j] + out.pushed_left[i]);
    }
    return out;
}

// Reflection driven through a strictly increasing clock psi (psi(0)=0,
// unbounded): pushed = psi^{-1}(k), reflected = omega + psi(psi^{-1}(k))
// with k the plain running supremum.  Where the compensator psi∘psi^{-1}
// jumps inside a segment, the resulting path jump is anchored at the node
// closing that segment (grid resolution).
inline ReflectResult generalized_reflect(const CadlagPath& w, const MonotonePath& psi) {
    if (psi.rv[0] != 0.0)
        throw std::invalid_argument("generalized_reflect: psi(0) must be 0");
    const MonotonePath psi_inv = psi.generalized_inverse();
    const MonotonePath round_trip = compose(psi, psi_inv); // psi∘psi^{-1}
    std::vector<double> k_left, k_at;
    detail::neg_running_sup(w, k_left, k_at);

    ReflectResult out;
    const std::size_t n = w.nodes();
    out.pushed.resize(n);
    out.pushed_left.resize(n);
    out.reflected.dt = w.dt;
    out.reflected.v.resize(n);
    std::vector<double> comp(n), comp_left(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.pushed_left[i] = psi_inv.eval(k_left[i]);
        out.pushed[i] = psi_inv.eval(k_at[i]);
        // The compensator's left limit at the node: if k climbed during the
        // segment, approach the level from below (a psi jump crossed on the
        // way up belongs to the node).
        const bool rose = i > 0 && k_left[i] > k_at[i - 1];
        comp_left[i] = rose ? round_trip.eval_left(k_left[i]) : round_trip.eval(k_left[i]);
        comp[i] = round_trip.eval(k_at[i]);
        out.reflected.v[i] = w.v[i] + comp[i];
    }
    std::size_t jp = 0;
    for (std::size_t i = 1; i < n; ++i) {
        double wl = w.v[i];
        bool w_jumps = false;
        if (jp < w.jump_node.size() && w.jump_node[jp] == i) {
            wl = w.jump_left[jp++];
            w_jumps = true;
        }
        const double left = wl + comp_left[i];
        if (w_jumps || left != out.reflected.v[i]) out.reflected.add_jump(i, left);
    }
    return out;
}

// Σ Δpushed·1{reflected > tol} over all increase points, computed from the
// output representation (segment part at the node's left limit, node part
// at the node value).
inline double flux_integral(const ReflectResult& r, double tol) {
    double total = 0.0;
    for (std::size_t i = 0; i < r.reflected.nodes(); ++i) {
        const double seg_inc = r.pushed_left[i] - (i == 0 ? 0.0 : r.pushed[i - 1]);
        if (seg_inc > 0.0 && r.reflected.left_value(i) > tol) total += seg_inc;
        const double node_inc = r.pushed[i] - r.pushed_left[i];
        if (node_inc > 0.0 && r.reflected.v[i] > tol) total += node_inc;
    }
    return total;
}

} // namespace starbm
