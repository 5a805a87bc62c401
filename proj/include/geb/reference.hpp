#pragma once

#include <functional>
#include <istream>
#include <ostream>
#include <vector>

#include "geb/beam.hpp"
#include "geb/state.hpp"

namespace geb {

/// Reference configuration of the beam sampled at the solver nodes, together
/// with the coefficient matrices Bbar(x) and B(x) built from it.
struct PrecurvedReference
{
    Grid grid;
    std::vector<Eigen::Matrix3d> Rref;
    std::vector<Eigen::Vector3d> UpsilonC;
    std::vector<Matrix6d> Ebold;
    std::vector<Matrix12d> Bbar;
    std::vector<Matrix12d> Bdiag;
};

using CurvatureFn = std::function<Eigen::Vector3d(double)>;

PrecurvedReference straight_reference(const BeamMatricesd& m, int N);

/// Integrates R' = R hat(Uc(x)) from R(0) = I with classical RK4 and projects
/// back onto the rotation group after each step.
PrecurvedReference curved_reference(const BeamMatricesd& m, int N, const CurvatureFn& curvature);

/// Assembles E, Bbar and B from given rotation and curvature samples.
PrecurvedReference reference_from_samples(const BeamMatricesd& m, const Grid& grid,
                                          std::vector<Eigen::Matrix3d> R,
                                          std::vector<Eigen::Vector3d> curvature);

/// CSV columns: x, R00..R22 (row-major), Uc1..Uc3.
void write_reference_csv(std::ostream& os, const PrecurvedReference& ref);
PrecurvedReference read_reference_csv(std::istream& is, const BeamMatricesd& m);

} // namespace geb
