#pragma once

#include <cassert>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace ctent {

enum class ConeKind { zero, nonnegative, second_order, psd_triangle };

std::string to_string(ConeKind kind);

/// A cone factor of a conic program. For psd_triangle, `dim` is the matrix
/// order d and the block occupies d(d+1)/2 scalar slots.
struct ConeSpec {
  ConeKind kind = ConeKind::nonnegative;
  int dim = 1;

  int slots() const {
    return kind == ConeKind::psd_triangle ? dim * (dim + 1) / 2 : dim;
  }

  static ConeSpec zero(int d) { return {ConeKind::zero, d}; }
  static ConeSpec nonnegative(int d) { return {ConeKind::nonnegative, d}; }
  static ConeSpec second_order(int d) { return {ConeKind::second_order, d}; }
  static ConeSpec psd(int order) { return {ConeKind::psd_triangle, order}; }
};

inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Position of entry (i, j), i >= j, in the scaled symmetric vectorization of
/// an order-d matrix. Slots run down the lower triangle column by column.
inline int svec_index(int i, int j, int d) {
  if (i < j) std::swap(i, j);
  return j * d - j * (j - 1) / 2 + (i - j);
}

inline int svec_order(Eigen::Index slots) {
  const int d = static_cast<int>(std::lround((std::sqrt(8.0 * slots + 1.0) - 1.0) / 2.0));
  assert(d * (d + 1) / 2 == slots);
  return d;
}

/// Scaled symmetric vectorization: off-diagonal entries carry a factor sqrt(2)
/// so that svec(A).dot(svec(B)) equals the Frobenius product A : B.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> svec(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const int d = static_cast<int>(m.rows());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(d * (d + 1) / 2);
  int k = 0;
  for (int j = 0; j < d; ++j) {
    v(k++) = m(j, j);
    for (int i = j + 1; i < d; ++i) v(k++) = Scalar(kSqrt2) * m(i, j);
  }
  return v;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> smat(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const int d = svec_order(v.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j) {
    m(j, j) = v(k++);
    for (int i = j + 1; i < d; ++i) {
      m(i, j) = v(k++) / Scalar(kSqrt2);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

/// Largest violation of membership of `x` in the cone (0 when inside).
double cone_violation(const ConeSpec& cone, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace ctent
