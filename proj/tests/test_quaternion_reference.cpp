#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "geb/model.hpp"
#include "geb/quaternion.hpp"
#include "geb/reference.hpp"
#include "support.hpp"

using namespace geb;

namespace {

Eigen::Vector4d random_unit(std::mt19937_64& gen)
{
    Eigen::Vector4d q;
    for (int i = 0; i < 4; ++i)
        q(i) = uniform(gen, -1, 1);
    return q.normalized();
}

} // namespace

TEST(Quaternion, MatchesEigenHamiltonConvention)
{
    std::mt19937_64 gen(1);
    for (int k = 0; k < 200; ++k) {
        const Eigen::Vector4d q = random_unit(gen);
        const Eigen::Quaterniond e(q(0), q(1), q(2), q(3));
        EXPECT_LT((rotation_from_quaternion(q) - e.toRotationMatrix()).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Quaternion, RoundTripAndSign)
{
    std::mt19937_64 gen(2);
    for (int k = 0; k < 200; ++k) {
        Eigen::Vector4d q = random_unit(gen);
        if (q(0) < 0)
            q = -q;
        const Eigen::Vector4d back = quaternion_from_rotation(rotation_from_quaternion(q));
        EXPECT_LT((back - q).cwiseAbs().maxCoeff(), 1e-13);
        EXPECT_GE(back(0), 0.0);
    }
    // half-turn: q0 = 0, the first nonzero entry is made positive
    const Eigen::Vector4d half = quaternion_from_rotation(Eigen::Matrix3d(Eigen::Vector3d(1, -1, -1).asDiagonal()));
    EXPECT_NEAR(half(1), 1.0, 1e-15);
}

TEST(Quaternion, Errors)
{
    EXPECT_THROW(rotation_from_quaternion(Eigen::Vector4d::Zero().eval()), ZeroQuaternion);
    EXPECT_THROW(quaternion_from_rotation(Eigen::Matrix3d(2.0 * Eigen::Matrix3d::Identity())), NotARotation);
    EXPECT_THROW(quaternion_from_rotation(Eigen::Matrix3d(Eigen::Vector3d(1, 1, -1).asDiagonal())), NotARotation);
}

TEST(Quaternion, GeneratorsDifferentiateRotation)
{
    // q' = U(v) q gives R' = hat(v) R; q' = Ub(v) q gives R' = R hat(v)
    std::mt19937_64 gen(3);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector4d q = random_unit(gen);
        const Eigen::Vector3d v(uniform(gen, -1, 1), uniform(gen, -1, 1), uniform(gen, -1, 1));
        const double h = 1e-6;
        const Eigen::Matrix3d R = rotation_from_quaternion(q);
        const Eigen::Matrix3d dS =
            (rotation_from_quaternion(Eigen::Vector4d(q + h * umap(v) * q)) -
             rotation_from_quaternion(Eigen::Vector4d(q - h * umap(v) * q))) / (2 * h);
        const Eigen::Matrix3d dB =
            (rotation_from_quaternion(Eigen::Vector4d(q + h * umap_body(v) * q)) -
             rotation_from_quaternion(Eigen::Vector4d(q - h * umap_body(v) * q))) / (2 * h);
        EXPECT_LT((dS - hat(v) * R).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LT((dB - R * hat(v)).cwiseAbs().maxCoeff(), 1e-8);
        // both generators are skew, so |q| is conserved
        EXPECT_LT((umap(v) + umap(v).transpose()).norm(), 1e-15);
        EXPECT_LT((umap_body(v) + umap_body(v).transpose()).norm(), 1e-15);
    }
}

TEST(Algebra, HatVee)
{
    const Eigen::Vector3d u(0.3, -1.2, 2.0), z(-0.5, 0.7, 0.1);
    EXPECT_LT((hat(u) * z - u.cross(z)).norm(), 1e-15);
    EXPECT_LT((vee(hat(u)) - u).norm(), 1e-15);
    EXPECT_LT((hat(u) + hat(u).transpose()).norm(), 1e-15);
}

TEST(Reference, StraightIsIdentity)
{
    const auto s = test::preset_scenario("straight-toy", 32);
    const auto m = scenario_matrices(s);
    const auto ref = straight_reference(m, 32);
    ASSERT_EQ(ref.Rref.size(), 33u);
    for (int j = 0; j <= 32; ++j) {
        EXPECT_EQ(ref.Rref[j], Eigen::Matrix3d::Identity());
        EXPECT_LT((ref.Bdiag[j] - assemble_B(m, initial_strain_matrix(Eigen::Vector3d::Zero().eval()))).norm(), 1e-14);
    }
}

TEST(Reference, ConstantCurvatureMatchesExponential)
{
    const auto s = test::preset_scenario("helical", 64);
    const auto m = scenario_matrices(s);
    const Eigen::Vector3d u(0.5, 0.3, 0.2);
    const auto ref = curved_reference(m, 64, [u](double) { return u; });
    for (int j = 0; j <= 64; ++j) {
        const double x = ref.grid.x(j);
        const Eigen::Matrix3d expect = Eigen::AngleAxisd(u.norm() * x, u.normalized()).toRotationMatrix();
        EXPECT_LT((ref.Rref[j] - expect).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT((ref.Rref[j].transpose() * ref.Rref[j] - Eigen::Matrix3d::Identity()).norm(), 1e-13);
    }
}

TEST(Reference, CsvRoundTripAndErrors)
{
    const auto s = test::preset_scenario("helical", 16);
    const auto m = scenario_matrices(s);
    const auto ref = curved_reference(m, 16, [](double x) { return Eigen::Vector3d(0.1, x, 0.2); });
    std::stringstream ss;
    write_reference_csv(ss, ref);
    const auto back = read_reference_csv(ss, m);
    ASSERT_EQ(back.grid.N, 16);
    for (int j = 0; j <= 16; ++j) {
        EXPECT_EQ(back.Rref[j], ref.Rref[j]);
        EXPECT_EQ(back.UpsilonC[j], ref.UpsilonC[j]);
    }
    EXPECT_THROW(curved_reference(m, 16, [](double) { return Eigen::Vector3d(NAN, 0, 0); }), NonFiniteCurvature);
    std::stringstream bad("x,R00\n0,1\n");
    EXPECT_ANY_THROW(read_reference_csv(bad, m));
}
