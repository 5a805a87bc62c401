#include "geb/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "geb/model.hpp"
#include "geb/rng.hpp"

namespace geb {

Matrix12d theta_matrix(const BeamMatricesd& m, const Matrix6d& E)
{
    const Matrix6d EDM = E * m.D * m.M;
    const Matrix6d S = EDM + EDM.transpose();
    Matrix12d T = Matrix12d::Zero();
    T.topRightCorner<6, 6>() = -S;
    T.bottomLeftCorner<6, 6>() = -S;
    return T;
}

ThetaValues theta_functions(const BeamMatricesd& m, const Eigen::Vector3d& uc)
{
    const double l7 = m.lambda(6), l8 = m.lambda(7), l9 = m.lambda(8), l10 = m.lambda(9);
    const double J1 = m.J(0, 0), J2 = m.J(1, 1), J3 = m.J(2, 2);
    const double a = m.params.a;
    const double u1 = std::abs(uc(0)), u2 = std::abs(uc(1)), u3 = std::abs(uc(2));

    ThetaValues out;
    Vector6d& t = out.theta;
    t(0) = std::abs(1 - l8 / l7) * u3 + std::abs(1 - l9 / l7) * u2;
    t(1) = std::abs(1 - l7 / l8) * u3 + std::abs(1 - l9 / l8) * u1 + 1;
    t(2) = std::abs(1 - l7 / l9) * u2 + std::abs(1 - l8 / l9) * u1 + 1;
    t(3) = std::abs(1 - l7 * J2 / (l10 * J1)) * u3 + std::abs(1 - l7 * J3 / (l10 * J1)) * u2;
    t(4) = a * l9 / (l7 * J2) + std::abs(1 - l10 * J1 / (l7 * J2)) * u3 + std::abs(1 - J3 / J2) * u1;
    t(5) = a * l8 / (l7 * J3) + std::abs(1 - l10 * J1 / (l7 * J3)) * u2 + std::abs(1 - J2 / J3) * u1;
    out.q1 = t.maxCoeff();

    const Matrix12d T = theta_matrix(m, initial_strain_matrix(uc));
    Eigen::SelfAdjointEigenSolver<Matrix12d> es(T, Eigen::EigenvaluesOnly);
    out.q2 = es.eigenvalues().maxCoeff() / m.MD().minCoeff();
    return out;
}

Vector6d theta_row_sums(const BeamMatricesd& m, const Matrix6d& E)
{
    const Matrix12d T = theta_matrix(m, E);
    const Vector6d b = m.MD();
    Vector6d out;
    for (int i = 0; i < 6; ++i)
        out(i) = T.row(i).cwiseAbs().sum() / b(i);
    return out;
}

double phi_value(double c, double phi0, double phiL, double length, double x)
{
    return phiL - std::exp(-2.0 * c * x) * (1.0 - x / length) * (phiL - phi0);
}

double phi_slope(double c, double phi0, double phiL, double length, double x)
{
    const double e = std::exp(-2.0 * c * x);
    return (phiL - phi0) * e * (2.0 * c * (1.0 - x / length) + 1.0 / length);
}

std::vector<double> build_phi(double c, double phi0, double phiL, const Grid& grid)
{
    if (!(phi0 > 0.0))
        throw ValidationError({"phi0 must be > 0"});
    if (!(phi0 < phiL))
        throw ValidationError({"phi0 must be < phiL"});
    std::vector<double> phi(grid.nodes());
    for (int j = 0; j < grid.nodes(); ++j)
        phi[j] = phi_value(c, phi0, phiL, grid.length, grid.x(j));
    return phi;
}

double phiL_upper_bound(double Ckappa, double phi0)
{
    if (Ckappa <= 0.0)
        return std::numeric_limits<double>::infinity();
    return 0.5 * (1.0 + 1.0 / Ckappa) * phi0;
}

double default_phiL(double Ckappa, double phi0)
{
    const double hi = phiL_upper_bound(Ckappa, phi0);
    const double mid = std::isinf(hi) ? hi : 0.5 * (phi0 + hi);
    return std::min(mid, 1.5 * phi0);
}

LyapunovCertificate certificate_from_weights(const BeamMatricesd& m, const PrecurvedReference& ref,
                                             std::vector<double> wMinus, std::vector<double> wPlus,
                                             std::vector<double> dwMinus, std::vector<double> dwPlus)
{
    LyapunovCertificate cert;
    cert.grid = ref.grid;
    cert.Ckappa = m.Ckappa;
    const int n = ref.grid.nodes();
    cert.Qdiag.resize(n);
    cert.dQdiag.resize(n);
    const Vector6d halfM = 0.5 * m.M.diagonal();
    for (int j = 0; j < n; ++j) {
        cert.Qdiag[j] << wMinus[j] * halfM, wPlus[j] * halfM;
        cert.dQdiag[j] << dwMinus[j] * halfM, dwPlus[j] * halfM;
    }
    double cq1 = 0.0, cq2 = 0.0;
    for (int j = 0; j < n; ++j) {
        const ThetaValues th = theta_functions(m, ref.UpsilonC[j]);
        cq1 = std::max(cq1, th.q1);
        cq2 = std::max(cq2, th.q2);
    }
    cert.Cq1 = cq1;
    cert.Cq2 = cq2;
    cert.wMinus = std::move(wMinus);
    cert.wPlus = std::move(wPlus);
    cert.dwMinus = std::move(dwMinus);
    cert.dwPlus = std::move(dwPlus);
    cert.report = verify_certificate(cert, m, ref);
    cert.valid = cert.report.valid;
    return cert;
}

LyapunovCertificate build_certificate(const BeamMatricesd& m, const PrecurvedReference& ref, int order, double phi0,
                                      std::optional<double> phiL)
{
    if (order != 1 && order != 2)
        throw ValidationError({"certificate order m must be 1 or 2"});
    if (!(phi0 > 0.0))
        throw ValidationError({"phi0 must be > 0"});
    if (m.Ckappa >= 1.0 - 1e-12)
        throw CkappaDegenerate("C_kappa = 1: the admissible weight ratio interval (1, 1/C_kappa] is empty");

    const double upper = phiL_upper_bound(m.Ckappa, phi0);
    const double pl = phiL.value_or(default_phiL(m.Ckappa, phi0));
    if (!(pl >= phi0) || pl > upper * (1.0 + 1e-14)) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "phiL = %.17g is outside the admissible window [%.17g, %.17g]", pl, phi0,
                      upper);
        throw WindowViolation(buf);
    }

    const Grid& g = ref.grid;
    const int n = g.nodes();
    std::vector<double> wm(n), wp(n), dwm(n), dwp(n), phi(n), dphi(n);

    double c = 0.0;
    if (pl > phi0) {
        double cq1 = 0.0, cq2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const ThetaValues th = theta_functions(m, ref.UpsilonC[j]);
            cq1 = std::max(cq1, th.q1);
            cq2 = std::max(cq2, th.q2);
        }
        c = order == 1 ? cq1 : cq2;
        phi = build_phi(c, phi0, pl, g);
        for (int j = 0; j < n; ++j)
            dphi[j] = phi_slope(c, phi0, pl, g.length, g.x(j));
    } else {
        // constant weights: the control case
        std::fill(phi.begin(), phi.end(), phi0);
        std::fill(dphi.begin(), dphi.end(), 0.0);
    }
    for (int j = 0; j < n; ++j) {
        wm[j] = phi[j];
        wp[j] = 2.0 * pl - phi[j];
        dwm[j] = dphi[j];
        dwp[j] = -dphi[j];
    }

    LyapunovCertificate cert = certificate_from_weights(m, ref, wm, wp, dwm, dwp);
    cert.m = order;
    cert.c = c;
    cert.phi0 = phi0;
    cert.phiL = pl;
    cert.phi = std::move(phi);
    cert.dphi = std::move(dphi);
    return cert;
}

Matrix12d weighted_coupling(const LyapunovCertificate& cert, const BeamMatricesd& m, const PrecurvedReference& ref,
                            int j, CouplingRoute route)
{
    const Matrix12d& B = ref.Bdiag[j];
    Vector12d q = cert.Qdiag[j];
    if (route == CouplingRoute::centered) {
        // QD B is skew, so the part 1/2 (w- + w+) QD of Q contributes nothing;
        // removing it keeps rounding proportional to w+ - w-.
        const double mean = 0.5 * (cert.wMinus[j] + cert.wPlus[j]);
        q -= mean * m.QD.diagonal();
    }
    const auto Q = q.asDiagonal();
    return Q * B + B.transpose() * Q;
}

Matrix12d interior_matrix(const LyapunovCertificate& cert, const BeamMatricesd& m, const PrecurvedReference& ref,
                          int j)
{
    Matrix12d out = (cert.dQdiag[j].cwiseProduct(m.lambda)).asDiagonal();
    out -= weighted_coupling(cert, m, ref, j, CouplingRoute::centered);
    return out;
}

CertificateReport verify_certificate(const LyapunovCertificate& cert, const BeamMatricesd& m,
                                     const PrecurvedReference& ref)
{
    CertificateReport rep;
    const int n = ref.grid.nodes();
    rep.interior.resize(n);
    rep.interiorScale.resize(n);
    rep.dominanceSlack.resize(n);
    rep.weylSlack.resize(n);
    rep.interiorOk = true;
    rep.maxInterior = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        Matrix12d X = interior_matrix(cert, m, ref, j);
        X = 0.5 * (X + X.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix12d> es(X, Eigen::EigenvaluesOnly);
        const double top = es.eigenvalues().maxCoeff();
        const double scale = inf_norm(X);
        rep.interior[j] = top;
        rep.interiorScale[j] = scale;
        rep.maxInterior = std::max(rep.maxInterior, top);
        if (!(top < -1e-10 * scale))
            rep.interiorOk = false;

        const ThetaValues th = theta_functions(m, ref.UpsilonC[j]);
        const double slope = std::min(std::abs(cert.dwMinus[j]), std::abs(cert.dwPlus[j]));
        const double gap = cert.wPlus[j] - cert.wMinus[j];
        rep.dominanceSlack[j] = slope - gap * th.q1;
        rep.weylSlack[j] = slope - gap * th.q2;
    }

    const Vector6d k2 = m.kappa.diagonal().cwiseAbs2();
    const Vector12d& Q0 = cert.Qdiag.front();
    const Vector12d& QL = cert.Qdiag.back();
    rep.boundary0 = k2.cwiseProduct(Q0.tail<6>()) - Q0.head<6>();
    rep.boundaryL = QL.head<6>() - QL.tail<6>();
    rep.maxBoundary = std::max(rep.boundary0.maxCoeff(), rep.boundaryL.maxCoeff());
    const double bscale = std::max(Q0.cwiseAbs().maxCoeff(), QL.cwiseAbs().maxCoeff());
    rep.boundaryOk = rep.maxBoundary <= 1e-14 * bscale;
    rep.valid = rep.interiorOk && rep.boundaryOk;
    return rep;
}

double sampled_g_bound(const BeamMatricesd& m, int samples)
{
    double best = 0.0;
    auto probe = [&](const Vector12d& r) {
        const Matrix12d G = g_diag_matrix(m, r);
        Eigen::JacobiSVD<Matrix12d> svd(G);
        best = std::max(best, svd.singularValues()(0));
    };
    for (int i = 0; i < 12; ++i)
        probe(Vector12d::Unit(i));
    std::mt19937_64 gen(20240611u);
    for (int s = 0; s < samples; ++s) {
        Vector12d r;
        for (int i = 0; i < 12; ++i)
            r(i) = uniform(gen, -1.0, 1.0);
        const double nr = r.norm();
        if (nr > 0)
            probe(r / nr);
    }
    return best;
}

DecayEstimate decay_rate_estimate(const LyapunovCertificate& cert, const BeamMatricesd& m,
                                  const PrecurvedReference& ref, double delta)
{
    DecayEstimate est;
    est.CS = -std::numeric_limits<double>::infinity();
    double qmax = 0.0;
    for (int j = 0; j < ref.grid.nodes(); ++j) {
        Vector12d slopes;
        slopes << -cert.dwMinus[j] * Vector6d::Ones(), cert.dwPlus[j] * Vector6d::Ones();
        const Matrix12d S = (slopes.cwiseProduct(m.Lambda.diagonal())).asDiagonal().toDenseMatrix() +
                            (cert.wPlus[j] - cert.wMinus[j]) * theta_matrix(m, ref.Ebold[j]);
        Eigen::SelfAdjointEigenSolver<Matrix12d> es(S, Eigen::EigenvaluesOnly);
        est.CS = std::max(est.CS, es.eigenvalues().maxCoeff());
        qmax = std::max(qmax, cert.Qdiag[j].maxCoeff());
    }
    est.CQ = 1.0 / qmax;
    est.Cg = sampled_g_bound(m);
    est.alpha = std::max(0.0, 0.5 * est.CQ * (-est.CS - 4.0 * est.CQ * est.Cg * delta));
    return est;
}

void write_certificate_csv(std::ostream& os, const LyapunovCertificate& cert, const DecayEstimate& est)
{
    char buf[64];
    auto num = [&](double v) -> const char* {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    };
    os << "# valid = " << (cert.valid ? "true" : "false") << '\n';
    os << "# m = " << cert.m << '\n';
    os << "# c = " << num(cert.c) << '\n';
    os << "# Ckappa = " << num(cert.Ckappa) << '\n';
    os << "# Cq1 = " << num(cert.Cq1) << '\n';
    os << "# Cq2 = " << num(cert.Cq2) << '\n';
    os << "# phi0 = " << num(cert.phi0) << '\n';
    os << "# phiL = " << num(cert.phiL) << '\n';
    os << "# max_interior_eigenvalue = " << num(cert.report.maxInterior) << '\n';
    for (int i = 0; i < 6; ++i)
        os << "# boundary0_eig" << i + 1 << " = " << num(cert.report.boundary0(i)) << '\n';
    for (int i = 0; i < 6; ++i)
        os << "# boundaryL_eig" << i + 1 << " = " << num(cert.report.boundaryL(i)) << '\n';
    os << "# decay_estimate_alpha (heuristic) = " << num(est.alpha) << '\n';
    os << "# decay_estimate_CS = " << num(est.CS) << '\n';
    os << "# decay_estimate_CQ = " << num(est.CQ) << '\n';
    os << "# decay_estimate_Cg = " << num(est.Cg) << '\n';
    os << "x,w_minus,w_plus,interior_max_eig,dominance_slack,weyl_slack\n";
    for (int j = 0; j < cert.grid.nodes(); ++j) {
        os << num(cert.grid.x(j));
        os << ',' << num(cert.wMinus[j]);
        os << ',' << num(cert.wPlus[j]);
        os << ',' << num(cert.report.interior[j]);
        os << ',' << num(cert.report.dominanceSlack[j]);
        os << ',' << num(cert.report.weylSlack[j]) << '\n';
    }
}

} // namespace geb
