#pragma once

#include <array>

#include "geb/algebra.hpp"
#include "geb/beam.hpp"

// Coefficients and nonlinearities of the intrinsic beam system
//
//   d_t y + A d_x y + Bbar(x) y = gbar(y),      y = (V, W, Gamma, Upsilon)
//
// and of its characteristic form in r = L y,
//
//   d_t r + bigD d_x r + B(x) r = g(r).

namespace geb {

/// Initial strain matrix [hat(Uc), 0; hat(e1), hat(Uc)].
template <typename Derived>
Mat6<typename Derived::Scalar> initial_strain_matrix(const Eigen::MatrixBase<Derived>& upsilon_c)
{
    using Scalar = typename Derived::Scalar;
    Mat6<Scalar> E = Mat6<Scalar>::Zero();
    const Mat3<Scalar> uc = hat(upsilon_c);
    E.template topLeftCorner<3, 3>() = uc;
    E.template bottomRightCorner<3, 3>() = uc;
    E.template bottomLeftCorner<3, 3>() = hat(Vec3<Scalar>::UnitX());
    return E;
}

/// Bbar = [0, -M^-1 E C^-1; E^T, 0].
template <typename Scalar>
Mat12<Scalar> assemble_Bbar(const BeamMatrices<Scalar>& m, const Mat6<Scalar>& E)
{
    Mat12<Scalar> B = Mat12<Scalar>::Zero();
    B.template topRightCorner<6, 6>() =
        -(m.M.diagonal().cwiseInverse().asDiagonal() * E * m.C.diagonal().cwiseInverse().asDiagonal());
    B.template bottomLeftCorner<6, 6>() = E.transpose();
    return B;
}

/// B = L Bbar L^-1.
template <typename Scalar>
Mat12<Scalar> assemble_B(const BeamMatrices<Scalar>& m, const Mat6<Scalar>& E)
{
    return m.L * assemble_Bbar(m, E) * m.Linv;
}

/// B from its closed 6x6 block form, without going through L.
template <typename Scalar>
Mat12<Scalar> assemble_B_blocks(const BeamMatrices<Scalar>& m, const Mat6<Scalar>& E)
{
    const Mat6<Scalar> DEt = m.D * E.transpose();
    const Mat6<Scalar> MEDM = m.M.diagonal().cwiseInverse().asDiagonal() * E * m.D * m.M;
    Mat12<Scalar> B;
    B << DEt - MEDM, DEt + MEDM, -DEt - MEDM, -DEt + MEDM;
    return Scalar(0.5) * B;
}

/// The quadratic coefficient matrix Gbar(y), so that gbar(y) = Gbar(y) y.
template <typename Scalar, typename Derived>
Mat12<Scalar> gbar_matrix(const BeamMatrices<Scalar>& m, const Eigen::MatrixBase<Derived>& y)
{
    const auto& p = m.params;
    const Vec3<Scalar> y1 = y.template segment<3>(0);
    const Vec3<Scalar> y2 = y.template segment<3>(3);
    const Vec3<Scalar> y3 = y.template segment<3>(6);
    const Vec3<Scalar> y4 = y.template segment<3>(9);
    const Mat3<Scalar> h1 = hat(y1), h2 = hat(y2);
    const Mat3<Scalar> hs1 = hat(Vec3<Scalar>(m.S1 * y3));
    const Mat3<Scalar> hs2 = hat(Vec3<Scalar>(m.S2 * y4));

    Mat12<Scalar> G = Mat12<Scalar>::Zero();
    G.template block<3, 3>(0, 0) = p.rho * p.a * h2;
    G.template block<3, 3>(0, 9) = hs1;
    G.template block<3, 3>(3, 3) = p.rho * h2 * m.J;
    G.template block<3, 3>(3, 6) = hs1;
    G.template block<3, 3>(3, 9) = hs2;
    G.template block<3, 3>(6, 6) = h2;
    G.template block<3, 3>(6, 9) = h1;
    G.template block<3, 3>(9, 9) = h2;

    Vec12<Scalar> scale;
    scale << m.M.diagonal().cwiseInverse(), Vec6<Scalar>::Ones();
    return -(scale.asDiagonal() * G);
}

/// gbar(y), evaluated with cross products rather than through gbar_matrix.
template <typename Scalar, typename Derived>
Vec12<Scalar> gbar(const BeamMatrices<Scalar>& m, const Eigen::MatrixBase<Derived>& y)
{
    const auto& p = m.params;
    const Vec3<Scalar> y1 = y.template segment<3>(0);
    const Vec3<Scalar> y2 = y.template segment<3>(3);
    const Vec3<Scalar> y3 = y.template segment<3>(6);
    const Vec3<Scalar> y4 = y.template segment<3>(9);
    const Vec3<Scalar> f3 = m.S1 * y3;
    const Vec3<Scalar> f4 = m.S2 * y4;

    Vec12<Scalar> g;
    g.template segment<3>(0) = -(y2.cross(y1) + f3.cross(y4) / (p.rho * p.a));
    g.template segment<3>(3) =
        -(m.J.diagonal().cwiseInverse().cwiseProduct(y2.cross(m.J * y2) + (f3.cross(y3) + f4.cross(y4)) / p.rho));
    g.template segment<3>(6) = -(y2.cross(y3) + y1.cross(y4));
    g.template segment<3>(9) = -y2.cross(y4);
    return g;
}

/// g(r) = L gbar(L^-1 r).
template <typename Scalar, typename Derived>
Vec12<Scalar> g_diag(const BeamMatrices<Scalar>& m, const Eigen::MatrixBase<Derived>& r)
{
    const Vec12<Scalar> y = m.Linv * r;
    return m.L * gbar(m, y);
}

/// Coefficient matrix of g: g(r) = G(r) r with G(r) = L Gbar(L^-1 r) L^-1.
template <typename Scalar, typename Derived>
Mat12<Scalar> g_diag_matrix(const BeamMatrices<Scalar>& m, const Eigen::MatrixBase<Derived>& r)
{
    const Vec12<Scalar> y = m.Linv * r;
    return m.L * gbar_matrix(m, y) * m.Linv;
}

/// Symmetric matrices Gbar^i with gbar_i(y) = <y, Gbar^i y>, by polarisation
/// on the unit basis (exact for a quadratic map).
template <typename Scalar>
std::array<Mat12<Scalar>, 12> gbar_quadratic_forms(const BeamMatrices<Scalar>& m)
{
    std::array<Mat12<Scalar>, 12> forms;
    for (auto& f : forms)
        f.setZero();
    for (int j = 0; j < 12; ++j) {
        for (int k = j; k < 12; ++k) {
            const Vec12<Scalar> ej = Vec12<Scalar>::Unit(j);
            const Vec12<Scalar> ek = Vec12<Scalar>::Unit(k);
            const Vec12<Scalar> plus = gbar(m, (ej + ek).eval());
            const Vec12<Scalar> minus = gbar(m, (ej - ek).eval());
            for (int i = 0; i < 12; ++i) {
                const Scalar v = (plus(i) - minus(i)) / Scalar(4);
                forms[i](j, k) = v;
                forms[i](k, j) = v;
            }
        }
    }
    return forms;
}

/// Weighted row-sum norm R_inf(Lt K Lt^-1) of the boundary coupling
/// K = [0, -I; kappa, 0] with Lt = diag((1 + eps)|kappa|, I). Zero entries
/// of kappa are weighted by eps instead, which keeps Lt invertible.
template <typename Scalar>
Scalar boundary_dissipativity_norm(const Mat6<Scalar>& kappa, Scalar eps = Scalar(1e-3))
{
    using std::abs;
    Vec12<Scalar> w;
    for (int i = 0; i < 6; ++i) {
        const Scalar k = abs(kappa(i, i));
        w(i) = k > Scalar(0) ? (Scalar(1) + eps) * k : eps;
        w(i + 6) = Scalar(1);
    }
    Mat12<Scalar> K = Mat12<Scalar>::Zero();
    K.template topRightCorner<6, 6>() = -Mat6<Scalar>::Identity();
    K.template bottomLeftCorner<6, 6>() = kappa;
    const Mat12<Scalar> scaled = w.asDiagonal() * K * w.cwiseInverse().asDiagonal();
    return inf_norm(scaled);
}

template <typename Scalar>
bool boundary_is_dissipative(const Mat6<Scalar>& kappa, Scalar eps = Scalar(1e-3))
{
    return boundary_dissipativity_norm(kappa, eps) < Scalar(1);
}

} // namespace geb
