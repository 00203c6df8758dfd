#pragma once

// Averages of entropic geometry over the space of detector settings and the
// boundary-to-bulk reactivity ratio for 2, 3 and 4 observers.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "qreact/infogeo.hpp"
#include "qreact/parallel.hpp"

namespace qreact {

enum class IntegrationMethod { grid, monte_carlo };

struct IntegratorConfig {
    IntegrationMethod method = IntegrationMethod::grid;
    int grid_points_per_angle = 32;
    std::int64_t mc_samples = 100000;
    std::uint64_t rng_seed = 20190415;
    bool fix_first_detector = true;

    void validate() const {
        if (grid_points_per_angle < 2) throw InvalidArgument("grid_points_per_angle must be >= 2");
        if (mc_samples < 1) throw InvalidArgument("mc_samples must be >= 1");
    }

    /// Grid for two observers, Monte Carlo above that.
    static IntegratorConfig default_for(int qubits) {
        IntegratorConfig c;
        if (qubits <= 2) {
            c.method = IntegrationMethod::grid;
            c.grid_points_per_angle = 128;
        } else {
            c.method = IntegrationMethod::monte_carlo;
        }
        return c;
    }
};

template <typename Scalar = double>
struct WeightedSetting {
    MeasurementSetting<Scalar> setting;
    Scalar weight = 0;
};

namespace detail {

// Top 53 bits of a 64-bit word as a double in [0, 1); independent of the
// standard library's distribution implementations.
inline double unit_interval(std::uint64_t word) { return static_cast<double>(word >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Detector settings with quadrature weights. The measure is uniform in
/// dtheta dphi over [0, pi] x [0, 2pi) for every varying detector (not the
/// sin(theta) Haar measure), so each detector contributes a volume 2 pi^2.
/// With fix_first_detector observer 0 is pinned at theta = phi = 0.
template <typename Scalar = double>
std::vector<WeightedSetting<Scalar>> sample_settings(int qubits, const IntegratorConfig &cfg) {
    if (qubits < 2) throw InvalidArgument("sample_settings needs at least 2 observers");
    cfg.validate();
    const int varying = cfg.fix_first_detector ? qubits - 1 : qubits;
    const int first = qubits - varying;
    const Scalar pi = pi_v<Scalar>;
    std::vector<WeightedSetting<Scalar>> out;
    std::vector<DetectorAngles<Scalar>> angles(static_cast<std::size_t>(qubits));

    if (cfg.method == IntegrationMethod::grid) {
        const std::size_t n = static_cast<std::size_t>(cfg.grid_points_per_angle);
        std::size_t total = 1;
        for (int i = 0; i < 2 * varying; ++i) {
            if (total > (std::size_t{1} << 40) / n) throw InvalidArgument("grid is too large");
            total *= n;
        }
        out.reserve(total);
        const Scalar w = Scalar(1) / Scalar(total);
        // Midpoint nodes; the last varying detector's phi changes fastest.
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            for (int k = qubits - 1; k >= first; --k) {
                const std::size_t ip = rem % n;
                rem /= n;
                const std::size_t it = rem % n;
                rem /= n;
                angles[static_cast<std::size_t>(k)] = {(Scalar(it) + Scalar(0.5)) * pi / Scalar(n),
                                                       (Scalar(ip) + Scalar(0.5)) * 2 * pi / Scalar(n)};
            }
            out.push_back({MeasurementSetting<Scalar>(angles), w});
        }
        return out;
    }

    std::mt19937_64 rng(cfg.rng_seed);
    const auto samples = static_cast<std::size_t>(cfg.mc_samples);
    out.reserve(samples);
    const Scalar w = Scalar(1) / Scalar(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        for (int k = first; k < qubits; ++k) {
            const Scalar t = Scalar(detail::unit_interval(rng())) * pi;
            const Scalar p = Scalar(detail::unit_interval(rng())) * 2 * pi;
            angles[static_cast<std::size_t>(k)] = {t, p};
        }
        out.push_back({MeasurementSetting<Scalar>(angles), w});
    }
    return out;
}

template <typename Scalar = double>
struct ReactivityResult {
    Scalar mean_numerator = 0;
    Scalar mean_denominator = 0;
    Scalar reactivity = std::numeric_limits<Scalar>::quiet_NaN();
    /// Delta-method standard error of the ratio (Monte Carlo only; 0 on a grid).
    Scalar stderr_estimate = 0;
    Scalar numerator_stderr = 0;
    Scalar denominator_stderr = 0;
    std::size_t samples_used = 0;
    bool degenerate = false;
};

/// Thrown by reactivity() when the mean bulk measure is below 1e-9.
class DegenerateGeometry : public Error {
  public:
    explicit DegenerateGeometry(const ReactivityResult<double> &r)
        : Error("degenerate geometry: mean denominator " + std::to_string(r.mean_denominator) + " < 1e-9"),
          result(r) {}
    ReactivityResult<double> result;
};

namespace detail {

inline void check_reactivity_dim(int d) {
    if (d < 2 || d > 4) throw InvalidArgument("reactivity is defined here for 2, 3 or 4 qubits, got " + std::to_string(d));
}

// Boundary and bulk measures at one setting:
// d=2: (1, D_AB); d=3: (perimeter, area); d=4: (surface, volume).
template <typename Scalar>
std::array<Scalar, 2> boundary_and_bulk(const GeometryReport<Scalar> &g) {
    switch (g.num_vars) {
    case 2: return {Scalar(1), g.perimeter};
    case 3: return {g.perimeter, g.surface};
    default: return {g.surface, g.volume_total};
    }
}

template <typename Scalar>
GeometryReport<Scalar> checked_geometry(const DensityMatrix<Scalar> &rho, const MeasurementSetting<Scalar> &setting) {
    GeometryReport<Scalar> g = geometry_report(entropy_table(joint_distribution(rho, setting)));
    if (!within_bounds(g, Scalar(1e-9))) throw InvalidState("geometry report outside its bounds");
    return g;
}

template <typename Scalar>
ReactivityResult<Scalar> reduce_terms(const std::vector<std::array<Scalar, 2>> &terms,
                                      const std::vector<WeightedSetting<Scalar>> &samples, bool monte_carlo) {
    ReactivityResult<Scalar> r;
    r.samples_used = terms.size();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        r.mean_numerator += samples[i].weight * terms[i][0];
        r.mean_denominator += samples[i].weight * terms[i][1];
    }
    if (monte_carlo && terms.size() > 1) {
        const Scalar n = Scalar(terms.size());
        Scalar snn = 0, sdd = 0, snd = 0;
        for (const auto &t : terms) {
            const Scalar a = t[0] - r.mean_numerator, b = t[1] - r.mean_denominator;
            snn += a * a;
            sdd += b * b;
            snd += a * b;
        }
        snn /= n - 1;
        sdd /= n - 1;
        snd /= n - 1;
        r.numerator_stderr = std::sqrt(snn / n);
        r.denominator_stderr = std::sqrt(sdd / n);
        if (r.mean_denominator > Scalar(0)) {
            const Scalar nb = r.mean_numerator, db = r.mean_denominator;
            const Scalar var = (snn / (db * db) - 2 * nb * snd / (db * db * db) + nb * nb * sdd / (db * db * db * db)) / n;
            r.stderr_estimate = std::sqrt(std::max(var, Scalar(0)));
        }
    }
    if (r.mean_denominator < Scalar(tol::degenerate_denominator)) {
        r.degenerate = true;
    } else {
        r.reactivity = r.mean_numerator / r.mean_denominator;
    }
    return r;
}

}  // namespace detail

/// Reactivity over a precomputed set of settings; never throws on degeneracy.
template <typename Scalar>
ReactivityResult<Scalar> evaluate_reactivity(const DensityMatrix<Scalar> &rho,
                                             const std::vector<WeightedSetting<Scalar>> &samples,
                                             bool monte_carlo) {
    detail::check_reactivity_dim(rho.num_qubits());
    std::vector<std::array<Scalar, 2>> terms(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        terms[i] = detail::boundary_and_bulk(detail::checked_geometry(rho, samples[i].setting));
    });
    return detail::reduce_terms(terms, samples, monte_carlo);
}

template <typename Scalar>
ReactivityResult<Scalar> evaluate_reactivity(const DensityMatrix<Scalar> &rho, const IntegratorConfig &cfg) {
    detail::check_reactivity_dim(rho.num_qubits());
    return evaluate_reactivity(rho, sample_settings<Scalar>(rho.num_qubits(), cfg),
                               cfg.method == IntegrationMethod::monte_carlo);
}

namespace detail {

template <typename Scalar>
ReactivityResult<Scalar> throw_if_degenerate(ReactivityResult<Scalar> r) {
    if (r.degenerate) {
        ReactivityResult<double> rd;
        rd.mean_numerator = double(r.mean_numerator);
        rd.mean_denominator = double(r.mean_denominator);
        rd.samples_used = r.samples_used;
        rd.degenerate = true;
        throw DegenerateGeometry(rd);
    }
    return r;
}

}  // namespace detail

/// d=2: 1/<D_AB>; d=3: <perimeter>/<area>; d=4: <surface>/<volume>.
template <typename Scalar>
ReactivityResult<Scalar> reactivity(const DensityMatrix<Scalar> &rho, const IntegratorConfig &cfg) {
    return detail::throw_if_degenerate(evaluate_reactivity(rho, cfg));
}

template <typename Scalar>
ReactivityResult<Scalar> reactivity(const DensityMatrix<Scalar> &rho, const std::vector<WeightedSetting<Scalar>> &samples,
                                    bool monte_carlo) {
    return detail::throw_if_degenerate(evaluate_reactivity(rho, samples, monte_carlo));
}

/// Weighted average of every distance, area and volume over the settings.
template <typename Scalar>
GeometryReport<Scalar> mean_geometry(const DensityMatrix<Scalar> &rho, const std::vector<WeightedSetting<Scalar>> &samples) {
    detail::check_reactivity_dim(rho.num_qubits());
    std::vector<GeometryReport<Scalar>> per(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) { per[i] = detail::checked_geometry(rho, samples[i].setting); });
    GeometryReport<Scalar> mean = geometry_report(entropy_table(joint_distribution(
        rho, MeasurementSetting<Scalar>(std::vector<DetectorAngles<Scalar>>(static_cast<std::size_t>(rho.num_qubits()))))));
    auto zero = [](auto &v) {
        for (auto &m : v) m.value = 0;
    };
    zero(mean.distances);
    zero(mean.areas);
    zero(mean.volumes);
    mean.perimeter = mean.surface = mean.volume_total = 0;
    for (std::size_t i = 0; i < per.size(); ++i) {
        const Scalar w = samples[i].weight;
        for (std::size_t k = 0; k < mean.distances.size(); ++k) mean.distances[k].value += w * per[i].distances[k].value;
        for (std::size_t k = 0; k < mean.areas.size(); ++k) mean.areas[k].value += w * per[i].areas[k].value;
        for (std::size_t k = 0; k < mean.volumes.size(); ++k) mean.volumes[k].value += w * per[i].volumes[k].value;
        mean.perimeter += w * per[i].perimeter;
        mean.surface += w * per[i].surface;
        mean.volume_total += w * per[i].volume_total;
    }
    return mean;
}

template <typename Scalar>
GeometryReport<Scalar> mean_geometry(const DensityMatrix<Scalar> &rho, const IntegratorConfig &cfg) {
    detail::check_reactivity_dim(rho.num_qubits());
    return mean_geometry(rho, sample_settings<Scalar>(rho.num_qubits(), cfg));
}

/// Reactivity of one state family at each lambda, all sharing one sample set.
template <typename Scalar = double>
std::vector<ReactivityResult<Scalar>> reactivity_sweep(StateFamily family, const std::vector<Scalar> &lambdas,
                                                       const IntegratorConfig &cfg) {
    const int d = family_qubits(family);
    detail::check_reactivity_dim(d);
    const auto samples = sample_settings<Scalar>(d, cfg);
    std::vector<ReactivityResult<Scalar>> out;
    out.reserve(lambdas.size());
    for (Scalar lambda : lambdas)
        out.push_back(evaluate_reactivity(make_state<Scalar>(family, lambda), samples,
                                          cfg.method == IntegrationMethod::monte_carlo));
    return out;
}

/// Affine map with R(0) -> 0 and R(1) -> 1.
template <typename Scalar>
std::vector<std::pair<Scalar, Scalar>> normalize_curve(const std::vector<std::pair<Scalar, Scalar>> &values) {
    std::optional<Scalar> r0, r1;
    for (const auto &[lambda, r] : values) {
        if (lambda == Scalar(0)) r0 = r;
        if (lambda == Scalar(1)) r1 = r;
    }
    if (!r0 || !r1) throw InvalidArgument("normalize_curve needs entries at lambda = 0 and lambda = 1");
    const Scalar range = *r1 - *r0;
    if (!(range != Scalar(0)) || !std::isfinite(range)) throw InvalidArgument("normalize_curve: zero or undefined range");
    std::vector<std::pair<Scalar, Scalar>> out;
    out.reserve(values.size());
    for (const auto &[lambda, r] : values) out.emplace_back(lambda, (r - *r0) / range);
    return out;
}

// Schumacher's four-detector construction on a two-qubit state.

template <typename Scalar = double>
struct QuadrilateralResult {
    /// D(A1,B1), D(B1,A2), D(A2,B2), D(A1,B2)
    std::array<Scalar, 4> edges{};
    /// D(A1,B2) minus the sum of the three indirect edges.
    Scalar violation = 0;
};

template <typename Scalar>
Scalar pair_distance(const DensityMatrix<Scalar> &rho, const DetectorAngles<Scalar> &a, const DetectorAngles<Scalar> &b) {
    return info_distance(entropy_table(joint_distribution(rho, MeasurementSetting<Scalar>{a, b})), 0, 1);
}

/// Each edge is measured on its own sub-ensemble with one A and one B detector.
template <typename Scalar>
QuadrilateralResult<Scalar> schumacher_quadrilateral(const DensityMatrix<Scalar> &rho, const DetectorAngles<Scalar> &a1,
                                                     const DetectorAngles<Scalar> &a2, const DetectorAngles<Scalar> &b1,
                                                     const DetectorAngles<Scalar> &b2) {
    if (rho.num_qubits() != 2) throw InvalidArgument("the Schumacher quadrilateral needs a two-qubit state");
    QuadrilateralResult<Scalar> q;
    q.edges = {pair_distance(rho, a1, b1), pair_distance(rho, a2, b1), pair_distance(rho, a2, b2),
               pair_distance(rho, a1, b2)};
    q.violation = q.edges[3] - (q.edges[0] + q.edges[1] + q.edges[2]);
    return q;
}

template <typename Scalar = double>
struct QuadrilateralSearchResult {
    DetectorAngles<Scalar> a1, a2, b1, b2;
    QuadrilateralResult<Scalar> best;
};

/// Coarse grid over the polar angles of (A2, B1, B2) with phi = 0 and A1 at the
/// pole, then one equally fine grid within one coarse cell of the best point.
template <typename Scalar>
QuadrilateralSearchResult<Scalar> schumacher_search(const DensityMatrix<Scalar> &rho, int points = 16) {
    if (rho.num_qubits() != 2) throw InvalidArgument("the Schumacher quadrilateral needs a two-qubit state");
    if (points < 2) throw InvalidArgument("search grid needs at least 2 points");
    const Scalar pi = pi_v<Scalar>;
    const DetectorAngles<Scalar> a1{0, 0};
    QuadrilateralSearchResult<Scalar> best;
    best.best.violation = -std::numeric_limits<Scalar>::infinity();

    auto scan = [&](std::array<Scalar, 3> lo, std::array<Scalar, 3> hi) {
        const std::size_t n = static_cast<std::size_t>(points);
        std::vector<QuadrilateralSearchResult<Scalar>> cells(n * n * n);
        parallel_for(cells.size(), [&](std::size_t flat) {
            const std::size_t i = flat / (n * n), j = (flat / n) % n, k = flat % n;
            auto node = [&](int axis, std::size_t idx) {
                return lo[axis] + (hi[axis] - lo[axis]) * Scalar(idx) / Scalar(points - 1);
            };
            auto &c = cells[flat];
            c.a1 = a1;
            c.a2 = {node(0, i), 0};
            c.b1 = {node(1, j), 0};
            c.b2 = {node(2, k), 0};
            c.best = schumacher_quadrilateral(rho, c.a1, c.a2, c.b1, c.b2);
        });
        // Lowest flat index wins ties.
        for (const auto &c : cells)
            if (c.best.violation > best.best.violation) best = c;
    };

    scan({0, 0, 0}, {pi, pi, pi});
    const Scalar cell = pi / Scalar(points - 1);
    auto clampa = [&](Scalar x) { return std::clamp(x, Scalar(0), pi); };
    const std::array<Scalar, 3> centre = {best.a2.theta, best.b1.theta, best.b2.theta};
    std::array<Scalar, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
        lo[a] = clampa(centre[a] - cell);
        hi[a] = clampa(centre[a] + cell);
    }
    scan(lo, hi);
    return best;
}

}  // namespace qreact
