#pragma once

#include <ostream>
#include <vector>

#include "geb/reference.hpp"
#include "geb/state.hpp"

namespace geb {

/// Position and orientation of the beam on a (node, time) lattice. Samples
/// are stored time-major: index n * nodes + j.
struct PoseField
{
    Grid grid;
    std::vector<double> times;
    std::vector<Eigen::Vector4d> q;
    std::vector<Eigen::Matrix3d> R;
    std::vector<Eigen::Vector3d> p;

    std::vector<double> residualRByTime; // sup_x |q_x - U(y4 + Uc) q|
    std::vector<double> residualPByTime; // sup_x |(R y1)_x - (R (y3 + e1))_t|
    std::vector<double> routeGapByTime;  // sup_x |p - p2|, p2 from the x-integral anchored at h_p
    double residualR = 0.0;
    double residualP = 0.0;
    double routeGap = 0.0;
    double normDefect = 0.0; // max ||q| - 1|

    int nodes() const { return grid.nodes(); }
    std::size_t at(int n, int j) const { return static_cast<std::size_t>(n) * grid.nodes() + j; }
};

struct ReconstructOptions
{
    bool renormalize = true;
};

/// Rotation field from velocities: an x-sweep at t = 0 from x = l towards 0,
/// then a t-integration at every node, both with RK4 on the quaternion.
/// `states` are physical and share one grid.
PoseField reconstruct_rotation(const std::vector<StateField>& states, const PrecurvedReference& ref,
                               const Eigen::Vector4d& qIn, const ReconstructOptions& opt = {});
PoseField reconstruct_rotation(const std::vector<StateField>& states, const PrecurvedReference& ref,
                               const Eigen::Matrix3d& RIn, const ReconstructOptions& opt = {});

/// p0(x) = h_p - int_x^l R(s, 0) (y3(s, 0) + e1) ds by the trapezoid rule.
std::vector<Eigen::Vector3d> initial_centerline(const PoseField& pose, const StateField& y0,
                                                const Eigen::Vector3d& hp);

/// Fills pose.p by trapezoid time quadrature of R y1 from p0 and the
/// compatibility residuals. Throws EndpointMismatch if |p0(l) - h_p| > 1e-10.
void reconstruct_centerline(PoseField& pose, const std::vector<StateField>& states,
                            const std::vector<Eigen::Vector3d>& p0, const Eigen::Vector3d& hp);

/// V = R^T p_t, W = vee(R^T R_t), Gamma = R^T p_x - e1,
/// Upsilon = vee(R^T R_x) - vee(Rref^T Rref_x), all by second-order differences.
std::vector<StateField> strains_velocities_from_pose(const PoseField& pose, const PrecurvedReference& ref);

/// sup_x (|R y1| + |R hat(y2)|_2 + |y3| + |y4|) per time.
std::vector<double> decay_observable(const PoseField& pose, const std::vector<StateField>& states);

void write_pose_csv(std::ostream& os, const PoseField& pose, int n);

} // namespace geb
