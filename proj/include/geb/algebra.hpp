#pragma once

#include <Eigen/Dense>

namespace geb {

template <typename Scalar> using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar> using Vec6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar> using Vec12 = Eigen::Matrix<Scalar, 12, 1>;
template <typename Scalar> using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar> using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar> using Mat6 = Eigen::Matrix<Scalar, 6, 6>;
template <typename Scalar> using Mat12 = Eigen::Matrix<Scalar, 12, 12>;

using Vector6d = Vec6<double>;
using Vector12d = Vec12<double>;
using Matrix6d = Mat6<double>;
using Matrix12d = Mat12<double>;

/// Cross-product matrix: hat(u) * z == u.cross(z).
template <typename Derived>
Mat3<typename Derived::Scalar> hat(const Eigen::MatrixBase<Derived>& u)
{
    EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
    using Scalar = typename Derived::Scalar;
    Mat3<Scalar> m;
    m << Scalar(0), -u(2), u(1),
         u(2), Scalar(0), -u(0),
         -u(1), u(0), Scalar(0);
    return m;
}

/// Inverse of hat() applied to the skew-symmetric part of m.
template <typename Derived>
Vec3<typename Derived::Scalar> vee(const Eigen::MatrixBase<Derived>& m)
{
    EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 3, 3);
    using Scalar = typename Derived::Scalar;
    const Scalar half(0.5);
    return Vec3<Scalar>(half * (m(2, 1) - m(1, 2)),
                        half * (m(0, 2) - m(2, 0)),
                        half * (m(1, 0) - m(0, 1)));
}

/// Row-sum (infinity) norm.
template <typename Derived>
typename Derived::Scalar inf_norm(const Eigen::MatrixBase<Derived>& m)
{
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

} // namespace geb
