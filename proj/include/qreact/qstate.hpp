#pragma once

// Dense qubit states, Bloch-sphere projective detectors and the classical
// outcome distributions they induce.

#include <algorithm>
#include <bit>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qreact/core.hpp"

namespace qreact {

/// Set of observer (variable) indices, bit k set when variable k is present.
class VarSet {
  public:
    constexpr VarSet() = default;
    constexpr explicit VarSet(std::uint32_t mask) : mask_(mask) {}

    static VarSet of(std::initializer_list<int> vars) { return of(std::span<const int>(vars.begin(), vars.size())); }
    static VarSet of(std::span<const int> vars) {
        std::uint32_t m = 0;
        for (int v : vars) {
            if (v < 0 || v >= 32) throw InvalidArgument("variable index out of range: " + std::to_string(v));
            m |= std::uint32_t{1} << v;
        }
        return VarSet(m);
    }
    static constexpr VarSet all(int n) { return VarSet((std::uint32_t{1} << n) - 1); }
    static constexpr VarSet single(int v) { return VarSet(std::uint32_t{1} << v); }

    constexpr std::uint32_t mask() const { return mask_; }
    constexpr int size() const { return std::popcount(mask_); }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr bool contains(int v) const { return (mask_ >> v) & 1u; }
    constexpr bool disjoint(VarSet o) const { return (mask_ & o.mask_) == 0; }
    constexpr VarSet without(int v) const { return VarSet(mask_ & ~(std::uint32_t{1} << v)); }
    constexpr VarSet operator|(VarSet o) const { return VarSet(mask_ | o.mask_); }
    constexpr VarSet operator&(VarSet o) const { return VarSet(mask_ & o.mask_); }
    constexpr bool operator==(const VarSet &) const = default;

    std::vector<int> members() const {
        std::vector<int> out;
        for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
        return out;
    }

  private:
    std::uint32_t mask_ = 0;
};

/// Observer names used in reports: A, B, C, E, F, G (D is reserved for distance).
inline char observer_name(int v) {
    static constexpr char names[] = {'A', 'B', 'C', 'E', 'F', 'G'};
    return v >= 0 && v < 6 ? names[v] : '?';
}

inline std::string observer_label(VarSet s) {
    std::string out;
    for (int v : s.members()) out.push_back(observer_name(v));
    return out;
}

template <typename Scalar = double>
class PureState {
  public:
    using VectorType = CVector<Scalar>;

    explicit PureState(VectorType amplitudes) : amps_(std::move(amplitudes)) {
        qubits_ = qubits_for_dim(amps_.size());
        const Scalar n = amps_.norm();
        if (std::abs(n - Scalar(1)) > Scalar(tol::unit_norm))
            throw InvalidState("pure state is not normalized (norm " + std::to_string(double(n)) + ")");
    }

    static PureState normalized(VectorType v) {
        const Scalar n = v.norm();
        if (n == Scalar(0)) throw InvalidArgument("cannot normalize the zero vector");
        return PureState(v / n);
    }

    int num_qubits() const { return qubits_; }
    const VectorType &amplitudes() const { return amps_; }

    static int qubits_for_dim(Eigen::Index dim) {
        if (dim < 2 || (dim & (dim - 1)) != 0)
            throw InvalidArgument("state dimension must be a power of two >= 2, got " + std::to_string(dim));
        const int q = std::countr_zero(static_cast<std::uint64_t>(dim));
        if (q > max_qubits) throw InvalidArgument("at most " + std::to_string(max_qubits) + " qubits supported");
        return q;
    }

  private:
    VectorType amps_;
    int qubits_ = 0;
};

/// Hermitian, unit-trace, positive semidefinite operator on d qubits.
/// Qubit 0 is the leftmost tensor factor (most significant index bit).
template <typename Scalar = double>
class DensityMatrix {
  public:
    using MatrixType = CMatrix<Scalar>;

    explicit DensityMatrix(MatrixType entries) : m_(std::move(entries)) {
        if (m_.rows() != m_.cols()) throw InvalidArgument("density matrix must be square");
        qubits_ = PureState<Scalar>::qubits_for_dim(m_.rows());
        validate();
    }

    explicit DensityMatrix(const PureState<Scalar> &psi)
        : DensityMatrix(MatrixType(psi.amplitudes() * psi.amplitudes().adjoint())) {}

    static DensityMatrix maximally_mixed(int qubits) {
        const auto n = static_cast<Eigen::Index>(pow2(qubits));
        return DensityMatrix(MatrixType(MatrixType::Identity(n, n) / Scalar(n)));
    }

    int num_qubits() const { return qubits_; }
    Eigen::Index dim() const { return m_.rows(); }
    const MatrixType &matrix() const { return m_; }

    /// Ascending eigenvalues.
    RArray<Scalar> eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<MatrixType> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().array();
    }

  private:
    void validate() const {
        const Scalar herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
        if (herm > Scalar(tol::hermitian)) throw InvalidState("density matrix is not Hermitian");
        const Complex<Scalar> tr = m_.trace();
        if (std::abs(tr.real() - Scalar(1)) > Scalar(tol::trace) || std::abs(tr.imag()) > Scalar(tol::trace))
            throw InvalidState("density matrix trace is not 1");
        if (eigenvalues().minCoeff() < -Scalar(tol::psd))
            throw InvalidState("density matrix is not positive semidefinite");
    }

    MatrixType m_;
    int qubits_ = 0;
};

enum class StateFamily { werner2, werner3_ghz, werner3_w, werner4_ghz, singlet, ghz3, w3, ghz4, product_zero };

inline constexpr std::pair<StateFamily, std::string_view> state_family_names[] = {
    {StateFamily::werner2, "werner2"},       {StateFamily::werner3_ghz, "werner3_ghz"},
    {StateFamily::werner3_w, "werner3_w"},   {StateFamily::werner4_ghz, "werner4_ghz"},
    {StateFamily::singlet, "singlet"},       {StateFamily::ghz3, "ghz3"},
    {StateFamily::w3, "w3"},                 {StateFamily::ghz4, "ghz4"},
    {StateFamily::product_zero, "product_zero"},
};

inline StateFamily parse_state_family(std::string_view name) {
    for (const auto &[f, n] : state_family_names)
        if (n == name) return f;
    throw InvalidArgument("unknown state family: " + std::string(name));
}

inline std::string_view to_string(StateFamily f) {
    for (const auto &[g, n] : state_family_names)
        if (g == f) return n;
    return "?";
}

inline int family_qubits(StateFamily f) {
    switch (f) {
    case StateFamily::werner2:
    case StateFamily::singlet:
    case StateFamily::product_zero: return 2;
    case StateFamily::werner3_ghz:
    case StateFamily::werner3_w:
    case StateFamily::ghz3:
    case StateFamily::w3: return 3;
    case StateFamily::werner4_ghz:
    case StateFamily::ghz4: return 4;
    }
    return 0;
}

inline bool is_mixture_family(StateFamily f) {
    return f == StateFamily::werner2 || f == StateFamily::werner3_ghz || f == StateFamily::werner3_w ||
           f == StateFamily::werner4_ghz;
}

template <typename Scalar = double>
PureState<Scalar> ghz_state(int qubits) {
    CVector<Scalar> v = CVector<Scalar>::Zero(static_cast<Eigen::Index>(pow2(qubits)));
    v(0) = v(v.size() - 1) = Scalar(1) / std::sqrt(Scalar(2));
    return PureState<Scalar>(std::move(v));
}

/// (|001> + |010> + |100>) / sqrt(3)
template <typename Scalar = double>
PureState<Scalar> w_state() {
    CVector<Scalar> v = CVector<Scalar>::Zero(8);
    v(1) = v(2) = v(4) = Scalar(1) / std::sqrt(Scalar(3));
    return PureState<Scalar>(std::move(v));
}

/// (|01> - |10>) / sqrt(2)
template <typename Scalar = double>
PureState<Scalar> singlet_state() {
    CVector<Scalar> v = CVector<Scalar>::Zero(4);
    v(1) = Scalar(1) / std::sqrt(Scalar(2));
    v(2) = -v(1);
    return PureState<Scalar>(std::move(v));
}

template <typename Scalar = double>
PureState<Scalar> product_zero_state(int qubits) {
    CVector<Scalar> v = CVector<Scalar>::Zero(static_cast<Eigen::Index>(pow2(qubits)));
    v(0) = 1;
    return PureState<Scalar>(std::move(v));
}

/// lambda |psi><psi| + (1 - lambda) / 2^d I
template <typename Scalar = double>
DensityMatrix<Scalar> werner_mixture(const PureState<Scalar> &psi, Scalar lambda) {
    if (!(lambda >= Scalar(0) && lambda <= Scalar(1)))
        throw InvalidArgument("lambda must lie in [0, 1], got " + std::to_string(double(lambda)));
    const auto n = static_cast<Eigen::Index>(pow2(psi.num_qubits()));
    CMatrix<Scalar> m = lambda * (psi.amplitudes() * psi.amplitudes().adjoint());
    m.diagonal().array() += (Scalar(1) - lambda) / Scalar(n);
    return DensityMatrix<Scalar>(std::move(m));
}

/// Hard-coded state families; lambda is ignored (but still range-checked) for pure ones.
template <typename Scalar = double>
DensityMatrix<Scalar> make_state(StateFamily family, Scalar lambda = Scalar(1)) {
    if (!(lambda >= Scalar(0) && lambda <= Scalar(1)))
        throw InvalidArgument("lambda must lie in [0, 1], got " + std::to_string(double(lambda)));
    switch (family) {
    case StateFamily::werner2: return werner_mixture(singlet_state<Scalar>(), lambda);
    case StateFamily::werner3_ghz: return werner_mixture(ghz_state<Scalar>(3), lambda);
    case StateFamily::werner3_w: return werner_mixture(w_state<Scalar>(), lambda);
    case StateFamily::werner4_ghz: return werner_mixture(ghz_state<Scalar>(4), lambda);
    case StateFamily::singlet: return DensityMatrix<Scalar>(singlet_state<Scalar>());
    case StateFamily::ghz3: return DensityMatrix<Scalar>(ghz_state<Scalar>(3));
    case StateFamily::w3: return DensityMatrix<Scalar>(w_state<Scalar>());
    case StateFamily::ghz4: return DensityMatrix<Scalar>(ghz_state<Scalar>(4));
    case StateFamily::product_zero: return DensityMatrix<Scalar>(product_zero_state<Scalar>(2));
    }
    throw InvalidArgument("unknown state family");
}

template <typename Scalar = double>
DensityMatrix<Scalar> make_state(std::string_view family, Scalar lambda = Scalar(1)) {
    return make_state<Scalar>(parse_state_family(family), lambda);
}

/// Stokes angles of one detector: theta in [0, pi], phi in [0, 2 pi).
template <typename Scalar = double>
struct DetectorAngles {
    Scalar theta = 0;
    Scalar phi = 0;

    void validate() const {
        if (!(theta >= Scalar(0) && theta <= pi_v<Scalar>))
            throw InvalidArgument("theta out of [0, pi]: " + std::to_string(double(theta)));
        if (!(phi >= Scalar(0) && phi < 2 * pi_v<Scalar>))
            throw InvalidArgument("phi out of [0, 2pi): " + std::to_string(double(phi)));
    }
};

template <typename Scalar = double>
class MeasurementSetting {
  public:
    MeasurementSetting() = default;
    explicit MeasurementSetting(std::vector<DetectorAngles<Scalar>> angles) : angles_(std::move(angles)) {
        for (const auto &a : angles_) a.validate();
    }
    MeasurementSetting(std::initializer_list<DetectorAngles<Scalar>> angles)
        : MeasurementSetting(std::vector<DetectorAngles<Scalar>>(angles)) {}

    int size() const { return static_cast<int>(angles_.size()); }
    const DetectorAngles<Scalar> &operator[](int k) const { return angles_[static_cast<std::size_t>(k)]; }
    std::span<const DetectorAngles<Scalar>> angles() const { return angles_; }

  private:
    std::vector<DetectorAngles<Scalar>> angles_;
};

/// Pi^1 = (I + n.sigma)/2 with n = (sin t cos p, sin t sin p, cos t); Pi^0 = I - Pi^1.
/// Outcome 1 means the detector fired; at theta = 0 that is the projector onto |0>.
template <typename Scalar = double>
CMatrix2<Scalar> build_projector(Scalar theta, Scalar phi, int outcome) {
    DetectorAngles<Scalar>{theta, phi}.validate();
    if (outcome != 0 && outcome != 1) throw InvalidArgument("outcome must be 0 or 1");
    const Scalar nx = std::sin(theta) * std::cos(phi);
    const Scalar ny = std::sin(theta) * std::sin(phi);
    const Scalar nz = std::cos(theta);
    CMatrix2<Scalar> fired;
    fired << Complex<Scalar>((1 + nz) / 2, 0), Complex<Scalar>(nx / 2, -ny / 2),
        Complex<Scalar>(nx / 2, ny / 2), Complex<Scalar>((1 - nz) / 2, 0);
    if (outcome == 1) return fired;
    return CMatrix2<Scalar>::Identity() - fired;
}

/// Columns are the unit vectors v^0, v^1 with Pi^a = v^a v^a^dagger.
template <typename Scalar = double>
CMatrix2<Scalar> detector_basis(Scalar theta, Scalar phi) {
    const Scalar c = std::cos(theta / 2);
    const Scalar s = std::sin(theta / 2);
    const Complex<Scalar> e = std::polar(Scalar(1), phi);
    CMatrix2<Scalar> b;
    b << Complex<Scalar>(s), Complex<Scalar>(c), -e * c, e * s;
    return b;
}

/// Probability table over s^d outcomes; variable 0 is the most significant digit.
template <typename Scalar = double>
class JointDistribution {
  public:
    JointDistribution(int num_vars, RArray<Scalar> probs, int outcomes_per_var = 2)
        : vars_(num_vars), outcomes_(outcomes_per_var), p_(std::move(probs)) {
        if (outcomes_ != 2) throw InvalidArgument("only binary outcomes are supported");
        if (vars_ < 1 || vars_ > 20) throw InvalidArgument("number of variables out of range");
        if (p_.size() != static_cast<Eigen::Index>(pow2(vars_)))
            throw InvalidArgument("probability table has the wrong size");
        if ((p_ < Scalar(0)).any()) throw InvalidState("negative probability");
        if (std::abs(p_.sum() - Scalar(1)) > Scalar(tol::probability_sum))
            throw InvalidState("probabilities do not sum to 1");
    }

    int num_vars() const { return vars_; }
    int outcomes_per_var() const { return outcomes_; }
    const RArray<Scalar> &probs() const { return p_; }
    Eigen::Index size() const { return p_.size(); }

    /// Probability of the outcome string (a_0, ..., a_{d-1}).
    Scalar operator()(std::initializer_list<int> outcome) const {
        if (static_cast<int>(outcome.size()) != vars_) throw InvalidArgument("outcome length mismatch");
        Eigen::Index idx = 0;
        for (int a : outcome) idx = (idx << 1) | (a ? 1 : 0);
        return p_(idx);
    }

    /// Marginal table over `keep`, in ascending variable order; no validation.
    RArray<Scalar> marginal_table(VarSet keep) const {
        const std::vector<int> kept = keep.members();
        const int k = static_cast<int>(kept.size());
        RArray<Scalar> out = RArray<Scalar>::Zero(static_cast<Eigen::Index>(pow2(k)));
        for (Eigen::Index idx = 0; idx < p_.size(); ++idx) {
            Eigen::Index sub = 0;
            for (int j = 0; j < k; ++j) sub = (sub << 1) | ((idx >> (vars_ - 1 - kept[j])) & 1);
            out(sub) += p_(idx);
        }
        return out;
    }

  private:
    int vars_;
    int outcomes_;
    RArray<Scalar> p_;
};

template <typename Scalar>
JointDistribution<Scalar> marginalize(const JointDistribution<Scalar> &p, VarSet keep) {
    if (keep.empty()) throw InvalidArgument("marginalize: empty variable subset");
    if ((keep.mask() >> p.num_vars()) != 0) throw InvalidArgument("marginalize: variable index out of range");
    if (keep == VarSet::all(p.num_vars())) return p;
    return JointDistribution<Scalar>(keep.size(), p.marginal_table(keep));
}

template <typename Scalar>
JointDistribution<Scalar> marginalize(const JointDistribution<Scalar> &p, std::span<const int> keep) {
    for (int v : keep)
        if (v < 0 || v >= p.num_vars()) throw InvalidArgument("marginalize: variable index out of range");
    const VarSet s = VarSet::of(keep);
    if (s.size() != static_cast<int>(keep.size())) throw InvalidArgument("marginalize: repeated variable");
    return marginalize(p, s);
}

template <typename Scalar>
JointDistribution<Scalar> marginalize(const JointDistribution<Scalar> &p, std::initializer_list<int> keep) {
    return marginalize(p, std::span<const int>(keep.begin(), keep.size()));
}

namespace detail {

// M <- (I (x) B^dagger (x) I) M (I (x) B (x) I) with B acting on `qubit`.
template <typename Scalar>
void conjugate_local(CMatrix<Scalar> &m, int qubits, int qubit, const CMatrix2<Scalar> &b) {
    const Eigen::Index n = m.rows();
    const Eigen::Index stride = Eigen::Index{1} << (qubits - 1 - qubit);
    const CMatrix2<Scalar> bh = b.adjoint();
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index i0 = 0; i0 < n; ++i0) {
            if (i0 & stride) continue;
            const Eigen::Index i1 = i0 | stride;
            const Complex<Scalar> x0 = m(i0, c), x1 = m(i1, c);
            m(i0, c) = bh(0, 0) * x0 + bh(0, 1) * x1;
            m(i1, c) = bh(1, 0) * x0 + bh(1, 1) * x1;
        }
    }
    for (Eigen::Index j0 = 0; j0 < n; ++j0) {
        if (j0 & stride) continue;
        const Eigen::Index j1 = j0 | stride;
        for (Eigen::Index r = 0; r < n; ++r) {
            const Complex<Scalar> x0 = m(r, j0), x1 = m(r, j1);
            m(r, j0) = x0 * b(0, 0) + x1 * b(1, 0);
            m(r, j1) = x0 * b(0, 1) + x1 * b(1, 1);
        }
    }
}

}  // namespace detail

/// Clamps round-off negatives (|p| <= 1e-10) to zero and renormalizes.
template <typename Scalar>
JointDistribution<Scalar> clamp_distribution(int num_vars, RArray<Scalar> raw) {
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        if (raw(i) < -Scalar(tol::probability_clamp))
            throw InvalidState("outcome probability " + std::to_string(double(raw(i))) + " is significantly negative");
        if (raw(i) < Scalar(0)) raw(i) = 0;
    }
    const Scalar total = raw.sum();
    if (std::abs(total - Scalar(1)) > Scalar(tol::probability_sum))
        throw InvalidState("outcome probabilities sum to " + std::to_string(double(total)));
    raw /= total;
    return JointDistribution<Scalar>(num_vars, std::move(raw));
}

/// p(a_0..a_{d-1}) = Re Tr(rho (x)_k Pi^{a_k}(theta_k, phi_k)).
template <typename Scalar>
JointDistribution<Scalar> joint_distribution(const DensityMatrix<Scalar> &rho,
                                             const MeasurementSetting<Scalar> &setting) {
    const int d = rho.num_qubits();
    if (setting.size() != d)
        throw InvalidArgument("setting has " + std::to_string(setting.size()) + " detectors for a " +
                              std::to_string(d) + "-qubit state");
    // Rotating every qubit into its detector basis leaves the outcome probabilities on the diagonal.
    CMatrix<Scalar> m = rho.matrix();
    for (int k = 0; k < d; ++k) detail::conjugate_local(m, d, k, detector_basis(setting[k].theta, setting[k].phi));
    return clamp_distribution<Scalar>(d, m.diagonal().real().array());
}

template <typename Scalar>
CMatrix<Scalar> kron(const CMatrix<Scalar> &a, const CMatrix<Scalar> &b) {
    CMatrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Applies U on one qubit: rho -> U_k rho U_k^dagger.
template <typename Scalar>
DensityMatrix<Scalar> apply_local_unitary(const DensityMatrix<Scalar> &rho, int qubit, const CMatrix2<Scalar> &u) {
    if (qubit < 0 || qubit >= rho.num_qubits()) throw InvalidArgument("qubit index out of range");
    if (!(u * u.adjoint()).isIdentity(Scalar(1e-12))) throw InvalidArgument("matrix is not unitary");
    CMatrix<Scalar> m = rho.matrix();
    detail::conjugate_local<Scalar>(m, rho.num_qubits(), qubit, u.adjoint());
    return DensityMatrix<Scalar>(std::move(m));
}

/// Reduced state on the qubits in `keep` (ascending order).
template <typename Scalar>
DensityMatrix<Scalar> partial_trace(const DensityMatrix<Scalar> &rho, VarSet keep) {
    const int d = rho.num_qubits();
    if (keep.empty() || (keep.mask() >> d) != 0) throw InvalidArgument("partial_trace: invalid qubit subset");
    const std::vector<int> kept = keep.members();
    const int k = static_cast<int>(kept.size());
    const auto n = static_cast<Eigen::Index>(pow2(d));
    auto sub = [&](Eigen::Index idx) {
        Eigen::Index s = 0;
        for (int j = 0; j < k; ++j) s = (s << 1) | ((idx >> (d - 1 - kept[j])) & 1);
        return s;
    };
    const Eigen::Index traced_mask = (n - 1) & ~[&] {
        Eigen::Index m = 0;
        for (int q : kept) m |= Eigen::Index{1} << (d - 1 - q);
        return m;
    }();
    CMatrix<Scalar> out = CMatrix<Scalar>::Zero(static_cast<Eigen::Index>(pow2(k)), static_cast<Eigen::Index>(pow2(k)));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if ((i & traced_mask) == (j & traced_mask)) out(sub(i), sub(j)) += rho.matrix()(i, j);
    // Restore exact Hermiticity lost to summation order.
    out = (out + out.adjoint()).eval() / Scalar(2);
    return DensityMatrix<Scalar>(std::move(out));
}

}  // namespace qreact
