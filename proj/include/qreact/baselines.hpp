#pragma once

// Reference two-qubit correlation measures: Wootters concurrence and
// Ollivier-Zurek discord (with its von Neumann building blocks).

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "qreact/reactivity.hpp"

namespace qreact {

namespace detail {

template <typename Scalar>
void require_two_qubits(const DensityMatrix<Scalar> &rho, const char *what) {
    if (rho.num_qubits() != 2) throw InvalidArgument(std::string(what) + " is defined for two-qubit states only");
}

template <typename Scalar>
Scalar entropy_of_spectrum(const RArray<Scalar> &eig) {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < eig.size(); ++i)
        if (eig(i) > Scalar(0)) s -= eig(i) * std::log2(eig(i));
    return s;
}

// Spectrum of a 2x2 Hermitian matrix.
template <typename Scalar>
RArray<Scalar> spectrum2(const CMatrix2<Scalar> &m) {
    const Scalar a = m(0, 0).real(), d = m(1, 1).real();
    const Scalar r = std::sqrt((a - d) * (a - d) + 4 * std::norm(m(0, 1)));
    RArray<Scalar> e(2);
    e << (a + d - r) / 2, (a + d + r) / 2;
    return e;
}

}  // namespace detail

/// S(rho) = -sum lambda_i log2 lambda_i; round-off negative eigenvalues count as 0.
template <typename Scalar>
Scalar von_neumann_entropy(const DensityMatrix<Scalar> &rho) {
    return detail::entropy_of_spectrum<Scalar>(rho.eigenvalues());
}

/// I = S(rho_A) + S(rho_B) - S(rho_AB).
template <typename Scalar>
Scalar mutual_information(const DensityMatrix<Scalar> &rho) {
    detail::require_two_qubits(rho, "mutual_information");
    const Scalar i = von_neumann_entropy(partial_trace(rho, VarSet::single(0))) +
                     von_neumann_entropy(partial_trace(rho, VarSet::single(1))) - von_neumann_entropy(rho);
    return std::max(i, Scalar(0));
}

/// max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)), l_i the eigenvalues of
/// rho rho~ with rho~ = (sy (x) sy) rho* (sy (x) sy), conjugation in the
/// computational basis. The sqrt(l_i) are taken as singular values of
/// sqrt(rho) sqrt(rho~), which avoids square roots of round-off zeros.
template <typename Scalar>
Scalar concurrence(const DensityMatrix<Scalar> &rho) {
    detail::require_two_qubits(rho, "concurrence");
    using M = CMatrix<Scalar>;
    Eigen::SelfAdjointEigenSolver<M> es(rho.matrix());
    RArray<Scalar> ev = es.eigenvalues().array();
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) < Scalar(1e-13) ? Scalar(0) : std::sqrt(ev(i));
    const M root = es.eigenvectors() * ev.matrix().template cast<Complex<Scalar>>().asDiagonal() *
                   es.eigenvectors().adjoint();
    M flip = M::Zero(4, 4);
    // sigma_y (x) sigma_y
    flip(0, 3) = flip(3, 0) = Scalar(-1);
    flip(1, 2) = flip(2, 1) = Scalar(1);
    const M root_tilde = flip * root.conjugate() * flip;
    Eigen::JacobiSVD<M> svd(root * root_tilde);
    const auto s = svd.singularValues();  // descending
    const Scalar c = s(0) - s(1) - s(2) - s(3);
    // Separable states land within a few ulps of zero.
    if (c < Scalar(1e-14)) return Scalar(0);
    return std::min(c, Scalar(1));
}

struct DiscordConfig {
    int n_theta = 64;
    int n_phi = 32;
    int refine_iterations = 3;
    double tolerance = 1e-10;

    void validate() const {
        if (n_theta < 8 || n_phi < 8) throw InvalidArgument("discord grid needs at least 8x8 points");
        if (!(tolerance > 0)) throw InvalidArgument("discord tolerance must be positive");
        if (refine_iterations < 0) throw InvalidArgument("refine_iterations must be >= 0");
    }
};

template <typename Scalar = double>
struct DiscordResult {
    Scalar value = 0;
    Scalar mutual_information = 0;
    /// max over A-side projective measurements of J = S(rho_B) - sum_j p_j S(rho_B|j)
    Scalar classical_correlation = 0;
    Scalar theta = 0;
    Scalar phi = 0;
    bool converged = true;
};

/// J for the A-side measurement {Pi^0, Pi^1} along (theta, phi).
template <typename Scalar>
Scalar classical_correlation(const DensityMatrix<Scalar> &rho, Scalar theta, Scalar phi) {
    detail::require_two_qubits(rho, "classical_correlation");
    const CMatrix<Scalar> &m = rho.matrix();
    const CMatrix2<Scalar> basis = detector_basis(theta, phi);
    const Scalar s_b = von_neumann_entropy(partial_trace(rho, VarSet::single(1)));
    Scalar conditional = 0;
    for (int j = 0; j < 2; ++j) {
        // Tr_A((Pi_j (x) I) rho (Pi_j (x) I)) = sum_{a,a'} conj(v_a) v_a' rho[(a,.),(a',.)]
        CMatrix2<Scalar> cond = CMatrix2<Scalar>::Zero();
        for (int a = 0; a < 2; ++a)
            for (int ap = 0; ap < 2; ++ap)
                cond += std::conj(basis(a, j)) * basis(ap, j) * m.template block<2, 2>(2 * a, 2 * ap);
        const Scalar p = cond.trace().real();
        if (p <= Scalar(1e-15)) continue;
        conditional += p * detail::entropy_of_spectrum<Scalar>(detail::spectrum2<Scalar>(cond / p));
    }
    return s_b - conditional;
}

namespace detail {

// Golden-section maximisation of f on [lo, hi].
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> golden_max(F &&f, Scalar lo, Scalar hi) {
    const Scalar g = (std::sqrt(Scalar(5)) - 1) / 2;
    Scalar x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    Scalar f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80 && hi - lo > Scalar(1e-12); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

template <typename Scalar>
Scalar wrap_phi(Scalar phi) {
    const Scalar two_pi = 2 * pi_v<Scalar>;
    phi = std::fmod(phi, two_pi);
    if (phi < 0) phi += two_pi;
    return phi >= two_pi ? Scalar(0) : phi;
}

}  // namespace detail

/// D_A = I - max J over rank-1 projective measurements on A; coarse grid then
/// alternating golden-section refinement of theta and phi.
template <typename Scalar>
DiscordResult<Scalar> discord(const DensityMatrix<Scalar> &rho, const DiscordConfig &cfg = {}) {
    detail::require_two_qubits(rho, "discord");
    cfg.validate();
    const Scalar pi = pi_v<Scalar>;
    const std::size_t nt = static_cast<std::size_t>(cfg.n_theta), np = static_cast<std::size_t>(cfg.n_phi);
    auto theta_at = [&](std::size_t i) { return pi * Scalar(i) / Scalar(nt - 1); };
    auto phi_at = [&](std::size_t j) { return 2 * pi * Scalar(j) / Scalar(np); };

    std::vector<Scalar> grid(nt * np);
    parallel_for(grid.size(), [&](std::size_t k) { grid[k] = classical_correlation(rho, theta_at(k / np), phi_at(k % np)); });
    std::size_t best_k = 0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (grid[k] > grid[best_k]) best_k = k;

    DiscordResult<Scalar> r;
    r.theta = theta_at(best_k / np);
    r.phi = phi_at(best_k % np);
    Scalar best = grid[best_k];
    Scalar improvement = 0;
    const Scalar dtheta = pi / Scalar(nt - 1), dphi = 2 * pi / Scalar(np);
    for (int pass = 0; pass < cfg.refine_iterations; ++pass) {
        const Scalar before = best;
        auto [t, ft] = detail::golden_max<Scalar>([&](Scalar x) { return classical_correlation(rho, x, r.phi); },
                                                  std::max(Scalar(0), r.theta - dtheta), std::min(pi, r.theta + dtheta));
        if (ft > best) {
            best = ft;
            r.theta = t;
        }
        auto [p, fp] = detail::golden_max<Scalar>(
            [&](Scalar x) { return classical_correlation(rho, r.theta, detail::wrap_phi(x)); }, r.phi - dphi, r.phi + dphi);
        if (fp > best) {
            best = fp;
            r.phi = detail::wrap_phi(p);
        }
        improvement = best - before;
    }
    r.converged = cfg.refine_iterations == 0 || improvement < Scalar(cfg.tolerance);
    r.classical_correlation = best;
    r.mutual_information = mutual_information(rho);
    r.value = std::max(r.mutual_information - best, Scalar(0));
    return r;
}

template <typename Scalar = double>
struct ComparisonRow {
    Scalar lambda = 0;
    Scalar concurrence = 0;
    Scalar discord = 0;
    Scalar reactivity_normalized = 0;
    Scalar reactivity_raw = 0;
};

/// Concurrence, discord and normalized reactivity of werner2 at each lambda;
/// the lambda list must contain 0 and 1.
template <typename Scalar = double>
std::vector<ComparisonRow<Scalar>> comparison_sweep(const std::vector<Scalar> &lambdas, const DiscordConfig &discord_cfg,
                                                    const IntegratorConfig &integrator_cfg) {
    for (Scalar l : lambdas)
        if (!(l >= Scalar(0) && l <= Scalar(1))) throw InvalidArgument("lambda values must lie in [0, 1]");
    const auto results = reactivity_sweep<Scalar>(StateFamily::werner2, lambdas, integrator_cfg);
    std::vector<std::pair<Scalar, Scalar>> curve;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (results[i].degenerate) throw InvalidState("degenerate reactivity in comparison sweep");
        curve.emplace_back(lambdas[i], results[i].reactivity);
    }
    const auto normalized = normalize_curve(curve);
    std::vector<ComparisonRow<Scalar>> rows;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const auto rho = make_state<Scalar>(StateFamily::werner2, lambdas[i]);
        rows.push_back({lambdas[i], concurrence(rho), discord(rho, discord_cfg).value, normalized[i].second,
                        results[i].reactivity});
    }
    return rows;
}

}  // namespace qreact
