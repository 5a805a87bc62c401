#include <gtest/gtest.h>

#include <sstream>

#include <Eigen/Geometry>

#include "geb/pose.hpp"
#include "geb/quaternion.hpp"
#include "support.hpp"

using namespace geb;

namespace {

struct Lattice
{
    BeamMatricesd m;
    PrecurvedReference ref;
    std::vector<StateField> states;
};

// Spatially and temporally constant states on a straight beam.
Lattice constant_states(const Vector12d& y, int N = 32, int nt = 41, double T = 1.0)
{
    const auto s = test::preset_scenario("straight-toy", N);
    Lattice lat{scenario_matrices(s), {}, {}};
    lat.ref = straight_reference(lat.m, N);
    for (int n = 0; n < nt; ++n) {
        StateField st = StateField::zero(lat.ref.grid, Repr::physical, T * n / (nt - 1));
        st.values.colwise() = y;
        lat.states.push_back(st);
    }
    return lat;
}

Eigen::Matrix3d expm_hat(const Eigen::Vector3d& w)
{
    const double a = w.norm();
    if (a == 0.0)
        return Eigen::Matrix3d::Identity();
    return Eigen::AngleAxisd(a, w / a).toRotationMatrix();
}

} // namespace

TEST(Pose, TwistAlongTheBeam)
{
    Vector12d y = Vector12d::Zero();
    const Eigen::Vector3d u(0.4, -0.3, 0.7);
    y.segment<3>(9) = u;
    const auto lat = constant_states(y);
    const Eigen::Matrix3d Rin = expm_hat(Eigen::Vector3d(0.1, 0.2, -0.3));
    const auto pose = reconstruct_rotation(lat.states, lat.ref, Rin, ReconstructOptions{false});
    const double l = lat.ref.grid.length;
    for (int n = 0; n < static_cast<int>(pose.times.size()); n += 10)
        for (int j = 0; j <= 32; ++j) {
            const Eigen::Matrix3d expect = Rin * expm_hat((lat.ref.grid.x(j) - l) * u);
            EXPECT_LT((pose.R[pose.at(n, j)] - expect).cwiseAbs().maxCoeff(), 1e-8);
        }
    EXPECT_LT(pose.normDefect, 1e-10);
    // residualR differences q in x, so it is O(dx^2) even for exact data
    EXPECT_LT(pose.residualR, 1e-4);
}

TEST(Pose, SpinInTime)
{
    Vector12d y = Vector12d::Zero();
    const Eigen::Vector3d w(0.2, 0.5, -0.4);
    y.segment<3>(3) = w;
    const auto lat = constant_states(y);
    const auto pose = reconstruct_rotation(lat.states, lat.ref, Eigen::Matrix3d(Eigen::Matrix3d::Identity()));
    for (int n = 0; n < static_cast<int>(pose.times.size()); ++n)
        for (int j = 0; j <= 32; j += 8) {
            const Eigen::Matrix3d expect = expm_hat(pose.times[n] * w);
            EXPECT_LT((pose.R[pose.at(n, j)] - expect).cwiseAbs().maxCoeff(), 1e-9);
        }
}

TEST(Pose, RigidTranslationRoundTrip)
{
    Vector12d y = Vector12d::Zero();
    const Eigen::Vector3d V(0.3, -0.1, 0.2);
    y.segment<3>(0) = V;
    const auto lat = constant_states(y);
    auto pose = reconstruct_rotation(lat.states, lat.ref, Eigen::Matrix3d(Eigen::Matrix3d::Identity()));
    const Eigen::Vector3d hp(1.0, 2.0, 3.0);
    const auto p0 = initial_centerline(pose, lat.states.front(), hp);
    reconstruct_centerline(pose, lat.states, p0, hp);
    const double l = lat.ref.grid.length;
    for (int n = 0; n < static_cast<int>(pose.times.size()); ++n)
        for (int j = 0; j <= 32; ++j) {
            const Eigen::Vector3d expect =
                hp - (l - lat.ref.grid.x(j)) * Eigen::Vector3d::UnitX() + pose.times[n] * V;
            EXPECT_LT((pose.p[pose.at(n, j)] - expect).cwiseAbs().maxCoeff(), 1e-13);
        }
    EXPECT_LT(pose.residualP, 1e-12);
    // a translating beam is not clamped at x = l; the x-route anchored at h_p sees that
    EXPECT_NEAR(pose.routeGap, V.norm() * pose.times.back(), 1e-12);

    const auto back = strains_velocities_from_pose(pose, lat.ref);
    ASSERT_EQ(back.size(), lat.states.size());
    for (std::size_t n = 0; n < back.size(); ++n)
        EXPECT_LT((back[n].values - lat.states[n].values).cwiseAbs().maxCoeff(), 1e-12);

    const auto obs = decay_observable(pose, lat.states);
    EXPECT_NEAR(obs.front(), V.norm(), 1e-14);
}

TEST(Pose, InputErrors)
{
    const auto lat = constant_states(Vector12d::Zero());
    EXPECT_THROW(reconstruct_rotation(lat.states, lat.ref, Eigen::Vector4d(1.0, 0.1, 0, 0)), NonUnitInput);
    auto pose = reconstruct_rotation(lat.states, lat.ref, Eigen::Vector4d(1.0, 0, 0, 0));
    auto p0 = initial_centerline(pose, lat.states.front(), Eigen::Vector3d::Zero());
    p0.back() += Eigen::Vector3d(1e-6, 0, 0);
    EXPECT_THROW(reconstruct_centerline(pose, lat.states, p0, Eigen::Vector3d::Zero()), EndpointMismatch);

    std::vector<StateField> two(lat.states.begin(), lat.states.begin() + 2);
    EXPECT_THROW(reconstruct_rotation(two, lat.ref, Eigen::Vector4d(1.0, 0, 0, 0)), ValidationError);
}

TEST(Pose, CsvHasOneRowPerNode)
{
    const auto lat = constant_states(Vector12d::Zero(), 16, 5);
    auto pose = reconstruct_rotation(lat.states, lat.ref, Eigen::Vector4d(1.0, 0, 0, 0));
    const auto p0 = initial_centerline(pose, lat.states.front(), Eigen::Vector3d::Zero());
    reconstruct_centerline(pose, lat.states, p0, Eigen::Vector3d::Zero());
    std::stringstream ss;
    write_pose_csv(ss, pose, 2);
    std::string line;
    int rows = 0;
    while (std::getline(ss, line))
        rows += !line.empty() && line[0] != '#';
    EXPECT_EQ(rows, 1 + 17);
}
