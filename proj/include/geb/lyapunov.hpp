#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "geb/beam.hpp"
#include "geb/reference.hpp"

namespace geb {

/// Theta(x) = -[0, S; S, 0] with S = E D M + (E D M)^T.
Matrix12d theta_matrix(const BeamMatricesd& m, const Matrix6d& E);

struct ThetaValues
{
    Vector6d theta;
    double q1 = 0.0; // max theta_i
    double q2 = 0.0; // largest eigenvalue of Theta / min_i (M D)_i
};

/// theta_1..theta_6 from their closed forms in the curvature components.
ThetaValues theta_functions(const BeamMatricesd& m, const Eigen::Vector3d& upsilonC);

/// Row sums |Theta_ij| / (M D)_i: the Gershgorin route to the same theta_i.
Vector6d theta_row_sums(const BeamMatricesd& m, const Matrix6d& E);

/// phi(x) = phiL - exp(-2 c x) (1 - x / length) (phiL - phi0), and phi'.
double phi_value(double c, double phi0, double phiL, double length, double x);
double phi_slope(double c, double phi0, double phiL, double length, double x);

/// Nodal phi. Requires 0 < phi0 < phiL.
std::vector<double> build_phi(double c, double phi0, double phiL, const Grid& grid);

/// Admissible range for phiL given phi0: (phi0, (1 + 1/Ckappa) phi0 / 2];
/// the upper bound is +inf when Ckappa == 0.
double phiL_upper_bound(double Ckappa, double phi0);
double default_phiL(double Ckappa, double phi0);

struct CertificateReport
{
    std::vector<double> interior;        // largest eigenvalue of dQ/dx bigD - QB - B^T Q
    std::vector<double> interiorScale;   // infinity norm of the same matrix
    std::vector<double> dominanceSlack;  // min(|w-'|, |w+'|) - (w+ - w-) q1
    std::vector<double> weylSlack;       // same with q2
    Vector6d boundary0 = Vector6d::Zero(); // eigenvalues of kappa^2 Q+(0) - Q-(0)
    Vector6d boundaryL = Vector6d::Zero(); // eigenvalues of Q-(l) - Q+(l)
    double maxInterior = 0.0;
    double maxBoundary = 0.0;
    bool interiorOk = false;
    bool boundaryOk = false;
    bool valid = false;
};

struct LyapunovCertificate
{
    Grid grid;
    int m = 1;          // which q_m bound fixes c
    double c = 0.0;     // C_{q_m}
    double Cq1 = 0.0;
    double Cq2 = 0.0;
    double Ckappa = 0.0;
    double phi0 = 1.0;
    double phiL = 1.0;
    std::vector<double> phi, dphi;
    std::vector<double> wMinus, wPlus, dwMinus, dwPlus;
    std::vector<Vector12d> Qdiag;  // Q(x) = diag(w- I, w+ I) QD, stored by its diagonal
    std::vector<Vector12d> dQdiag; // analytic dQ/dx
    CertificateReport report;
    bool valid = false;

    Matrix12d Q(int j) const { return Qdiag[j].asDiagonal(); }
};

/// Builds weights from phi and verifies them. phiL defaults to
/// min(window midpoint, 1.5 phi0). phiL == phi0 gives the constant weights
/// w- = w+ = phi0, which is accepted and reported invalid.
LyapunovCertificate build_certificate(const BeamMatricesd& m, const PrecurvedReference& ref, int order = 1,
                                      double phi0 = 1.0, std::optional<double> phiL = std::nullopt);

/// Certificate from explicit nodal weights and slopes (no admissibility checks).
LyapunovCertificate certificate_from_weights(const BeamMatricesd& m, const PrecurvedReference& ref,
                                             std::vector<double> wMinus, std::vector<double> wPlus,
                                             std::vector<double> dwMinus, std::vector<double> dwPlus);

enum class CouplingRoute {
    direct,   // Q B + B^T Q as written
    centered, // (Q - mean weight * QD) B + B^T (...), equal in exact arithmetic
};

/// Q B + B^T Q at node j.
Matrix12d weighted_coupling(const LyapunovCertificate& cert, const BeamMatricesd& m, const PrecurvedReference& ref,
                            int j, CouplingRoute route);

/// The interior matrix dQ/dx bigD - Q B - B^T Q at node j (centered route).
Matrix12d interior_matrix(const LyapunovCertificate& cert, const BeamMatricesd& m, const PrecurvedReference& ref,
                          int j);

CertificateReport verify_certificate(const LyapunovCertificate& cert, const BeamMatricesd& m,
                                     const PrecurvedReference& ref);

struct DecayEstimate
{
    double alpha = 0.0;
    double CS = 0.0; // max over nodes of the largest eigenvalue of S = -phi' Lambda + 2 (phiL - phi) Theta
    double CQ = 0.0; // 1 / max diagonal entry of Q over [0, l]
    double Cg = 0.0; // sampled max of |G(r)|_2 over unit r
};

/// Heuristic decay rate alpha = CQ/2 (-CS - 4 CQ Cg delta), clipped at 0.
DecayEstimate decay_rate_estimate(const LyapunovCertificate& cert, const BeamMatricesd& m,
                                  const PrecurvedReference& ref, double delta);

/// Sampled bound of |G(r)|_2 over unit vectors r (basis vectors plus a
/// fixed pseudo-random sample); G is linear in r, so this is a Lipschitz
/// constant of g on the unit ball up to a factor 2.
double sampled_g_bound(const BeamMatricesd& m, int samples = 2000);

void write_certificate_csv(std::ostream& os, const LyapunovCertificate& cert, const DecayEstimate& est);

} // namespace geb
