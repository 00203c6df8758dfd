#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qreact {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using CVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using CMatrix2 = Eigen::Matrix<Complex<Scalar>, 2, 2>;

template <typename Scalar>
using RArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad arguments: unknown ids, out-of-range angles, mismatched dimensions.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

// Data that violates a physical invariant beyond round-off.
class InvalidState : public Error {
  public:
    using Error::Error;
};

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd = 1e-10;
inline constexpr double unit_norm = 1e-12;
inline constexpr double probability_sum = 1e-10;
inline constexpr double probability_clamp = 1e-10;
inline constexpr double conditional_entropy_clamp = 1e-12;
inline constexpr double degenerate_denominator = 1e-9;
}  // namespace tol

inline constexpr int max_qubits = 6;

inline std::size_t pow2(int n) { return std::size_t{1} << n; }

template <typename Scalar>
constexpr Scalar pi_v = Scalar(3.141592653589793238462643383279502884L);

}  // namespace qreact
