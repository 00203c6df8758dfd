#pragma once

// Shannon-entropic geometry of a set of binary random variables: subset
// entropies, conditional entropies, the Rokhlin-Rajski distance, and the
// leave-one-out area/volume family built from conditional entropies.

#include <algorithm>
#include <cmath>
#include <vector>

#include "qreact/qstate.hpp"

namespace qreact {

/// Entropy (bits) of every subset of the variables, indexed by VarSet mask.
template <typename Scalar = double>
class EntropyTable {
  public:
    EntropyTable(int num_vars, std::vector<Scalar> by_mask) : vars_(num_vars), h_(std::move(by_mask)) {
        if (h_.size() != pow2(num_vars)) throw InvalidArgument("entropy table has the wrong size");
    }

    int num_vars() const { return vars_; }
    Scalar operator()(VarSet s) const {
        if ((s.mask() >> vars_) != 0) throw InvalidArgument("entropy lookup: variable index out of range");
        return h_[s.mask()];
    }
    Scalar operator()(std::initializer_list<int> vars) const { return (*this)(VarSet::of(vars)); }
    const std::vector<Scalar> &by_mask() const { return h_; }

  private:
    int vars_;
    std::vector<Scalar> h_;
};

template <typename Scalar>
Scalar shannon_entropy(const RArray<Scalar> &p) {
    Scalar h = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > Scalar(0)) h -= p(i) * std::log2(p(i));
    return h;
}

/// All 2^d - 1 subset entropies in one pass; the empty set has entropy 0.
template <typename Scalar>
EntropyTable<Scalar> entropy_table(const JointDistribution<Scalar> &p) {
    const int d = p.num_vars();
    std::vector<Scalar> h(pow2(d), Scalar(0));
    const RArray<Scalar> &probs = p.probs();
    // Index bit (d-1-k) holds variable k, so the variable mask of a subset maps to
    // an index mask by bit reversal over d bits.
    std::vector<Scalar> marg(pow2(d));
    for (std::uint32_t mask = 1; mask < pow2(d); ++mask) {
        std::uint32_t index_mask = 0;
        for (int k = 0; k < d; ++k)
            if ((mask >> k) & 1u) index_mask |= std::uint32_t{1} << (d - 1 - k);
        std::fill(marg.begin(), marg.end(), Scalar(0));
        for (Eigen::Index idx = 0; idx < probs.size(); ++idx) marg[static_cast<std::size_t>(idx) & index_mask] += probs(idx);
        Scalar acc = 0;
        for (Scalar q : marg)
            if (q > Scalar(0)) acc -= q * std::log2(q);
        h[mask] = acc;
    }
    return EntropyTable<Scalar>(d, std::move(h));
}

/// H(target | given) = H(target u given) - H(given).
template <typename Scalar>
Scalar conditional_entropy(const EntropyTable<Scalar> &t, VarSet target, VarSet given) {
    if (target.empty()) throw InvalidArgument("conditional entropy: empty target");
    if (!target.disjoint(given)) throw InvalidArgument("conditional entropy: target and given overlap");
    const Scalar v = t(target | given) - t(given);
    if (v < Scalar(0)) {
        if (v < -Scalar(tol::conditional_entropy_clamp))
            throw InvalidState("conditional entropy is negative beyond round-off");
        return Scalar(0);
    }
    return v;
}

/// D_ab = H(a|b) + H(b|a) = 2 H_ab - H_a - H_b; zero when a == b.
template <typename Scalar>
Scalar info_distance(const EntropyTable<Scalar> &t, int a, int b) {
    if (a == b) return Scalar(0);
    const VarSet sa = VarSet::single(a), sb = VarSet::single(b);
    return conditional_entropy(t, sa, sb) + conditional_entropy(t, sb, sa);
}

/// Elementary symmetric polynomial e_{n-1} of h_i = H(v_i | rest of vars):
/// the sum of the n leave-one-out products. n = 3 is the information area,
/// n = 4 the tetrahedral information volume.
template <typename Scalar>
Scalar info_volume(const EntropyTable<Scalar> &t, std::span<const int> vars) {
    const int n = static_cast<int>(vars.size());
    if (n < 3) throw InvalidArgument("info_volume needs at least 3 variables");
    const VarSet all = VarSet::of(vars);
    if (all.size() != n) throw InvalidArgument("info_volume: repeated variable");
    if ((all.mask() >> t.num_vars()) != 0) throw InvalidArgument("info_volume: variable index out of range");
    // Canonical ascending order makes the result exactly permutation-invariant.
    const std::vector<int> sorted = all.members();
    std::vector<Scalar> h(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) h[i] = conditional_entropy(t, VarSet::single(sorted[i]), all.without(sorted[i]));
    Scalar sum = 0;
    for (int skip = 0; skip < n; ++skip) {
        Scalar prod = 1;
        for (int i = 0; i < n; ++i)
            if (i != skip) prod *= h[i];
        sum += prod;
    }
    return sum;
}

template <typename Scalar>
Scalar info_volume(const EntropyTable<Scalar> &t, std::initializer_list<int> vars) {
    return info_volume(t, std::span<const int>(vars.begin(), vars.size()));
}

/// A_abc = H(a|bc) H(b|ca) + H(b|ca) H(c|ab) + H(c|ab) H(a|bc).
template <typename Scalar>
Scalar info_area(const EntropyTable<Scalar> &t, int a, int b, int c) {
    const int vars[] = {a, b, c};
    return info_volume(t, std::span<const int>(vars));
}

template <typename Scalar = double>
struct SimplexMeasure {
    VarSet vars;
    Scalar value = 0;
};

/// Pairwise distances, triple areas, quadruple volumes and their sums.
template <typename Scalar = double>
struct GeometryReport {
    int num_vars = 0;
    std::vector<SimplexMeasure<Scalar>> distances;
    std::vector<SimplexMeasure<Scalar>> areas;
    std::vector<SimplexMeasure<Scalar>> volumes;
    Scalar perimeter = 0;
    Scalar surface = 0;
    Scalar volume_total = 0;

    Scalar distance(int a, int b) const { return find(distances, VarSet::of({a, b})); }
    Scalar area(int a, int b, int c) const { return find(areas, VarSet::of({a, b, c})); }
    Scalar volume(int a, int b, int c, int e) const { return find(volumes, VarSet::of({a, b, c, e})); }

  private:
    static Scalar find(const std::vector<SimplexMeasure<Scalar>> &v, VarSet s) {
        for (const auto &m : v)
            if (m.vars == s) return m.value;
        throw InvalidArgument("no such simplex in report: " + observer_label(s));
    }
};

namespace detail {

inline std::vector<VarSet> make_subsets(int d, int k) {
    std::vector<VarSet> out;
    for (std::uint32_t m = 0; m < pow2(d); ++m)
        if (std::popcount(m) == k) out.emplace_back(m);
    // Lexicographic order over members: AB, AC, BC for d = 3.
    std::sort(out.begin(), out.end(), [](VarSet x, VarSet y) { return x.members() < y.members(); });
    return out;
}

inline const std::vector<VarSet> &subsets_of_size(int d, int k) {
    static const auto cache = [] {
        std::vector<std::vector<std::vector<VarSet>>> c(max_qubits + 1);
        for (int n = 0; n <= max_qubits; ++n)
            for (int j = 0; j <= max_qubits; ++j) c[n].push_back(make_subsets(n, j));
        return c;
    }();
    if (d <= max_qubits) return cache[d][k];
    thread_local std::vector<VarSet> scratch;
    scratch = make_subsets(d, k);
    return scratch;
}

}  // namespace detail

template <typename Scalar>
GeometryReport<Scalar> geometry_report(const EntropyTable<Scalar> &t) {
    const int d = t.num_vars();
    GeometryReport<Scalar> r;
    r.num_vars = d;
    for (VarSet s : detail::subsets_of_size(d, 2)) {
        const auto m = s.members();
        const Scalar v = info_distance(t, m[0], m[1]);
        r.distances.push_back({s, v});
        r.perimeter += v;
    }
    for (VarSet s : detail::subsets_of_size(d, 3)) {
        const auto m = s.members();
        const Scalar v = info_volume(t, std::span<const int>(m));
        r.areas.push_back({s, v});
        r.surface += v;
    }
    for (VarSet s : detail::subsets_of_size(d, 4)) {
        const auto m = s.members();
        const Scalar v = info_volume(t, std::span<const int>(m));
        r.volumes.push_back({s, v});
        r.volume_total += v;
    }
    return r;
}

/// Upper bounds for binary variables: D <= 2, A <= 3, V <= 4 (log2 s = 1).
template <typename Scalar>
bool within_bounds(const GeometryReport<Scalar> &r, Scalar slack = Scalar(1e-12)) {
    auto ok = [&](const std::vector<SimplexMeasure<Scalar>> &v, Scalar hi) {
        return std::all_of(v.begin(), v.end(),
                           [&](const auto &m) { return m.value >= -slack && m.value <= hi + slack; });
    };
    return ok(r.distances, Scalar(2)) && ok(r.areas, Scalar(3)) && ok(r.volumes, Scalar(4));
}

}  // namespace qreact
