#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "geb/algebra.hpp"
#include "geb/errors.hpp"

namespace geb {

/// Physical and geometric constants of a uniform, isotropic beam together
/// with the boundary feedback gains applied at x = 0.
///
/// Units are SI. The feedback acts as mu = diag(mu1, mu1, mu1, mu2, mu2, mu2)
/// unless mu_diag is set, in which case the six gains are taken from it
/// (this is what makes the transparent choice mu = diag(M D) expressible).
template <typename Scalar = double>
struct BeamParams
{
    Scalar rho{};    // mass density
    Scalar a{};      // cross-section area
    Scalar youngE{}; // Young modulus
    Scalar shearG{}; // shear modulus
    Scalar I2{};     // area moments of inertia
    Scalar I3{};
    Scalar k1{}; // polar moment correction
    Scalar k2{}; // shear correction factors
    Scalar k3{};
    Scalar length{};
    Scalar mu1{};
    Scalar mu2{};
    std::optional<Vec6<Scalar>> mu_diag;
};

using BeamParamsd = BeamParams<double>;

/// Every constant matrix of the intrinsic model, derived once from BeamParams.
///
/// Diagonal matrices are stored dense. lambda holds the eigenvalues of A in
/// the fixed order (-D, +D): indices 0..5 are the leftward speeds and 6..11
/// the rightward ones.
template <typename Scalar = double>
struct BeamMatrices
{
    BeamParams<Scalar> params;

    Mat3<Scalar> J, S1, S2;
    Mat6<Scalar> M, C, D;
    Mat12<Scalar> bigD, L, Linv, A, QP, QD, Lambda;
    Vec6<Scalar> mu;
    Mat6<Scalar> kappa;
    Vec12<Scalar> lambda;
    Scalar Ckappa{};

    Scalar max_speed() const { return lambda.maxCoeff(); }
    Vec6<Scalar> MD() const { return (M * D).diagonal(); }
};

using BeamMatricesd = BeamMatrices<double>;

template <typename Scalar>
std::vector<std::string> validation_problems(const BeamParams<Scalar>& p)
{
    std::vector<std::string> out;
    auto need_positive = [&out](const char* name, Scalar v) {
        if (!(v > Scalar(0)) || !std::isfinite(static_cast<double>(v)))
            out.push_back(std::string(name) + " must be a finite value > 0");
    };
    need_positive("rho", p.rho);
    need_positive("a", p.a);
    need_positive("youngE", p.youngE);
    need_positive("shearG", p.shearG);
    need_positive("I2", p.I2);
    need_positive("I3", p.I3);
    need_positive("k1", p.k1);
    need_positive("k2", p.k2);
    need_positive("k3", p.k3);
    need_positive("length", p.length);
    if (p.mu_diag) {
        for (int i = 0; i < 6; ++i)
            if (!((*p.mu_diag)(i) > Scalar(0)))
                out.push_back("mu_diag[" + std::to_string(i) + "] must be > 0");
    } else {
        // mu = 0 would give C_kappa = 1 and an empty weight window.
        need_positive("mu1", p.mu1);
        need_positive("mu2", p.mu2);
    }
    return out;
}

template <typename Scalar>
void validate(const BeamParams<Scalar>& p)
{
    auto problems = validation_problems(p);
    if (!problems.empty())
        throw ValidationError(std::move(problems));
}

template <typename Scalar>
Vec6<Scalar> feedback_gains(const BeamParams<Scalar>& p)
{
    if (p.mu_diag)
        return *p.mu_diag;
    Vec6<Scalar> mu;
    mu << p.mu1, p.mu1, p.mu1, p.mu2, p.mu2, p.mu2;
    return mu;
}

/// Boundary reflection kappa = (MD + mu)^-1 (MD - mu), entrywise.
template <typename Scalar>
Vec6<Scalar> reflection_coefficients(const Vec6<Scalar>& md, const Vec6<Scalar>& mu)
{
    return (md - mu).cwiseQuotient(md + mu);
}

template <typename Scalar>
Scalar ckappa_of(const Vec6<Scalar>& kappa)
{
    return kappa.cwiseAbs2().maxCoeff();
}

template <typename Scalar>
BeamMatrices<Scalar> derive_matrices(const BeamParams<Scalar>& p)
{
    validate(p);
    using std::sqrt;
    BeamMatrices<Scalar> m;
    m.params = p;

    const Scalar J1 = (p.I2 + p.I3) * p.k1;
    m.J = Vec3<Scalar>(J1, p.I2, p.I3).asDiagonal();
    m.S1 = (p.a * Vec3<Scalar>(p.youngE, p.k2 * p.shearG, p.k3 * p.shearG)).asDiagonal();
    m.S2 = m.J * Vec3<Scalar>(p.shearG, p.youngE, p.youngE).asDiagonal();

    Vec6<Scalar> mdiag, cinv;
    mdiag << p.rho * p.a, p.rho * p.a, p.rho * p.a, p.rho * m.J.diagonal();
    cinv << m.S1.diagonal(), m.S2.diagonal();
    m.M = mdiag.asDiagonal();
    m.C = cinv.cwiseInverse().asDiagonal();

    // D = (M C)^(-1/2) = sqrt(C^-1 M^-1)
    const Vec6<Scalar> d = cinv.cwiseQuotient(mdiag).cwiseSqrt();
    m.D = d.asDiagonal();

    const Mat6<Scalar> I6 = Mat6<Scalar>::Identity();
    const Mat6<Scalar> Z6 = Mat6<Scalar>::Zero();
    const Mat6<Scalar> Dinv = d.cwiseInverse().asDiagonal();

    m.lambda << -d, d;
    m.bigD = m.lambda.asDiagonal();
    m.L << I6, m.D, I6, -m.D;
    m.Linv << I6, I6, Dinv, -Dinv;
    m.Linv *= Scalar(0.5);

    const Mat6<Scalar> MCinv = (mdiag.cwiseProduct(cinv.cwiseInverse())).cwiseInverse().asDiagonal();
    m.A << Z6, -MCinv, -I6, Z6;

    m.QP.setZero();
    m.QP.diagonal() << mdiag, cinv;
    m.QD.setZero();
    m.QD.diagonal() << mdiag / Scalar(2), mdiag / Scalar(2);

    const Vec6<Scalar> md = mdiag.cwiseProduct(d);
    m.Lambda.setZero();
    m.Lambda.diagonal() << md, md;

    m.mu = feedback_gains(p);
    const Vec6<Scalar> kap = reflection_coefficients(md, m.mu);
    m.kappa = kap.asDiagonal();
    m.Ckappa = ckappa_of(kap);
    return m;
}

/// Feedback gains minimising C_kappa: the geometric mean of the extreme
/// entries of diag(M D) within each 3-block.
template <typename Scalar>
std::pair<Scalar, Scalar> optimal_feedback(const BeamParams<Scalar>& p)
{
    BeamParams<Scalar> q = p;
    q.mu1 = q.mu2 = Scalar(1);
    q.mu_diag.reset();
    const auto m = derive_matrices(q);
    const Vec6<Scalar> b = m.MD();
    using std::sqrt;
    const Scalar mu1 = sqrt(b.template head<3>().minCoeff() * b.template head<3>().maxCoeff());
    const Scalar mu2 = sqrt(b.template tail<3>().minCoeff() * b.template tail<3>().maxCoeff());
    return {mu1, mu2};
}

/// Internal forces and moments F = C^-1 s.
template <typename Scalar, typename Derived>
Vec6<Scalar> stresses_from_strains(const BeamMatrices<Scalar>& m, const Eigen::MatrixBase<Derived>& s)
{
    return m.C.diagonal().cwiseInverse().cwiseProduct(s);
}

/// Writes every derived matrix as a labelled CSV block.
void write_matrices_csv(std::ostream& os, const BeamMatricesd& m);

} // namespace geb
