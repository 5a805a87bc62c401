#pragma once

#include <cmath>

#include "geb/algebra.hpp"
#include "geb/errors.hpp"

// Unit quaternions q = (q0, q1, q2, q3), scalar part first.

namespace geb {

/// R = (q0^2 - |q|^2) I + 2 q q^T + 2 q0 hat(q), after normalising q.
template <typename Derived>
Mat3<typename Derived::Scalar> rotation_from_quaternion(const Eigen::MatrixBase<Derived>& qin)
{
    EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 4);
    using Scalar = typename Derived::Scalar;
    const Scalar n = qin.norm();
    if (!(n > Scalar(1e-300)))
        throw ZeroQuaternion("quaternion has zero norm");
    const Vec4<Scalar> q = qin / n;
    const Scalar q0 = q(0);
    const Vec3<Scalar> v = q.template tail<3>();
    return (q0 * q0 - v.squaredNorm()) * Mat3<Scalar>::Identity() + Scalar(2) * v * v.transpose() +
           Scalar(2) * q0 * hat(v);
}

/// Shepperd's method: the largest of trace and diagonal pivots selects the
/// branch. The sign is fixed by q0 >= 0, and when q0 == 0 by making the first
/// nonzero component positive.
template <typename Derived>
Vec4<typename Derived::Scalar> quaternion_from_rotation(const Eigen::MatrixBase<Derived>& R,
                                                       typename Derived::Scalar tol = 1e-8)
{
    EIGEN_STATIC_ASSERT_MATRIX_SPECIFIC_SIZE(Derived, 3, 3);
    using Scalar = typename Derived::Scalar;
    using std::abs;
    using std::sqrt;
    const Mat3<Scalar> defect = R.transpose() * R - Mat3<Scalar>::Identity();
    if (!(inf_norm(defect) <= tol) || !(abs(R.determinant() - Scalar(1)) <= tol))
        throw NotARotation("matrix is not a rotation within tolerance");

    const Scalar tr = R.trace();
    Vec4<Scalar> q;
    int pivot = 0;
    Scalar best = tr;
    for (int i = 0; i < 3; ++i) {
        if (R(i, i) > best) {
            best = R(i, i);
            pivot = i + 1;
        }
    }
    switch (pivot) {
    case 0: {
        const Scalar s = Scalar(0.5) * sqrt(Scalar(1) + tr);
        q << s, (R(2, 1) - R(1, 2)) / (4 * s), (R(0, 2) - R(2, 0)) / (4 * s), (R(1, 0) - R(0, 1)) / (4 * s);
        break;
    }
    case 1: {
        const Scalar s = Scalar(0.5) * sqrt(Scalar(1) + R(0, 0) - R(1, 1) - R(2, 2));
        q << (R(2, 1) - R(1, 2)) / (4 * s), s, (R(0, 1) + R(1, 0)) / (4 * s), (R(0, 2) + R(2, 0)) / (4 * s);
        break;
    }
    case 2: {
        const Scalar s = Scalar(0.5) * sqrt(Scalar(1) - R(0, 0) + R(1, 1) - R(2, 2));
        q << (R(0, 2) - R(2, 0)) / (4 * s), (R(0, 1) + R(1, 0)) / (4 * s), s, (R(1, 2) + R(2, 1)) / (4 * s);
        break;
    }
    default: {
        const Scalar s = Scalar(0.5) * sqrt(Scalar(1) - R(0, 0) - R(1, 1) + R(2, 2));
        q << (R(1, 0) - R(0, 1)) / (4 * s), (R(0, 2) + R(2, 0)) / (4 * s), (R(1, 2) + R(2, 1)) / (4 * s), s;
        break;
    }
    }
    q.normalize();
    for (int i = 0; i < 4; ++i) {
        if (q(i) != Scalar(0)) {
            if (q(i) < Scalar(0))
                q = -q;
            break;
        }
    }
    return q;
}

/// U(v) = 1/2 [0, -v^T; v, hat(v)]. With R(q) as above, d_z q = U(f) q gives
/// d_z R = hat(f) R (spatial frame).
template <typename Derived>
Mat4<typename Derived::Scalar> umap(const Eigen::MatrixBase<Derived>& v)
{
    using Scalar = typename Derived::Scalar;
    Mat4<Scalar> U;
    U(0, 0) = Scalar(0);
    U.template block<1, 3>(0, 1) = -v.transpose();
    U.template block<3, 1>(1, 0) = v;
    U.template block<3, 3>(1, 1) = hat(v);
    return Scalar(0.5) * U;
}

/// 1/2 [0, -v^T; v, -hat(v)]: d_z q = umap_body(f) q gives d_z R = R hat(f),
/// the body-frame form used by the rotation reconstruction.
template <typename Derived>
Mat4<typename Derived::Scalar> umap_body(const Eigen::MatrixBase<Derived>& v)
{
    using Scalar = typename Derived::Scalar;
    Mat4<Scalar> U;
    U(0, 0) = Scalar(0);
    U.template block<1, 3>(0, 1) = -v.transpose();
    U.template block<3, 1>(1, 0) = v;
    U.template block<3, 3>(1, 1) = -hat(v);
    return Scalar(0.5) * U;
}

} // namespace geb
