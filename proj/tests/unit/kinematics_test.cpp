#include "mocap/core/error.hpp"
#include "mocap/kinematics/forward_kinematics.hpp"
#include "mocap/kinematics/rotation.hpp"
#include "mocap/kinematics/skeleton.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace mocap::kinematics {
namespace {

constexpr double kPi = std::numbers::pi;

Vec3 random_axis_angle(std::mt19937_64& rng, double max_angle = kPi) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> a(0.0, max_angle);
    return Vec3(g(rng), g(rng), g(rng)).normalized() * a(rng);
}

MotionFrame random_frame(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> t(-3.0, 3.0);
    MotionFrame f;
    f.global_orient = random_axis_angle(rng);
    for (auto& r : f.body_pose) r = random_axis_angle(rng);
    f.translation = Vec3(t(rng), t(rng), t(rng));
    return f;
}

TEST(Rodrigues, ZeroIsIdentity) { EXPECT_EQ(axis_angle_to_matrix(Vec3::Zero()), Mat3::Identity()); }

TEST(Rodrigues, QuarterTurnAboutZ) {
    const Vec3 mapped = axis_angle_to_matrix(Vec3(0, 0, kPi / 2)) * Vec3(1, 0, 0);
    EXPECT_NEAR((mapped - Vec3(0, 1, 0)).norm(), 0.0, 1e-15);
}

TEST(Rodrigues, InverseProperty) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 r = random_axis_angle(rng, 3 * kPi);
        const Mat3 prod = axis_angle_to_matrix(r) * axis_angle_to_matrix(-r);
        ASSERT_LE((prod - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Rodrigues, TaylorBranchIsContinuous) {
    const Vec3 axis = Vec3(1, 2, -1).normalized();
    const Mat3 below = axis_angle_to_matrix(axis * 0.99e-8);
    const Mat3 above = axis_angle_to_matrix(axis * 1.01e-8);
    EXPECT_LE((below - above).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(below.determinant(), 1.0, 1e-12);
}

TEST(Rodrigues, AgreesWithEigenAngleAxis) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        const Vec3 r = random_axis_angle(rng);
        const Mat3 ref = Eigen::AngleAxisd(r.norm(), r.normalized()).toRotationMatrix();
        ASSERT_LE((axis_angle_to_matrix(r) - ref).cwiseAbs().maxCoeff(), 1e-12);
        ASSERT_LE((matrix_to_axis_angle(ref) - r).norm(), 1e-9);
    }
}

TEST(ForwardKinematics, TwoJointToyChain) {
    const std::array<int, 2> parent{-1, 0};
    const std::array<Vec3, 2> offsets{Vec3::Zero(), Vec3(0, 1, 0)};
    const std::array<Vec3, 2> local{Vec3(0, 0, kPi / 2), Vec3::Zero()};
    const Vec3 root(0.5, -0.25, 2.0);
    std::array<Vec3, 2> pos;
    std::array<Mat3, 2> rot;
    forward_kinematics_tree(parent, offsets, local, root, pos, rot);
    EXPECT_EQ(pos[0], root);
    EXPECT_NEAR((pos[1] - (root + Vec3(-1, 0, 0))).norm(), 0.0, 1e-15);
}

TEST(ForwardKinematics, ZeroPoseIsRestPoseExactly) {
    const Skeleton& skel = Skeleton::smpl_default();
    MotionFrame f;
    f.translation = Vec3(0.3, -0.1, 2.5);
    const SkeletonPose pose = forward_kinematics(skel, f);
    // Cumulative offsets summed in tree order, shifted by the translation.
    std::array<Vec3, kJointCount> expected;
    expected[0] = f.translation;
    for (std::size_t i = 1; i < kJointCount; ++i) expected[i] = expected[skel.parent[i]] + skel.rest_offsets[i];
    for (std::size_t i = 0; i < kJointCount; ++i) {
        ASSERT_EQ(pose.joint_positions[i], expected[i]) << "joint " << i;
    }
}

TEST(ForwardKinematics, BoneLengthsPreserved) {
    const Skeleton& skel = Skeleton::smpl_default();
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const SkeletonPose pose = forward_kinematics(skel, random_frame(rng));
        for (std::size_t i = 1; i < kJointCount; ++i) {
            const double len = (pose.joint_positions[i] - pose.joint_positions[skel.parent[i]]).norm();
            ASSERT_NEAR(len, skel.rest_offsets[i].norm(), 1e-9);
        }
    }
}

TEST(ForwardKinematics, RootAnchoredAndRotationsProper) {
    const Skeleton& skel = Skeleton::smpl_default();
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const MotionFrame f = random_frame(rng);
        const SkeletonPose pose = forward_kinematics(skel, f);
        ASSERT_EQ(pose.joint_positions[0], f.translation);
        for (const Mat3& r : pose.joint_rotations) {
            ASSERT_LE((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-6);
            ASSERT_NEAR(r.determinant(), 1.0, 1e-6);
        }
    }
}

TEST(ForwardKinematics, RigidMotionEquivariance) {
    const Skeleton& skel = Skeleton::smpl_default();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const MotionFrame f = random_frame(rng);
        const Mat3 q = axis_angle_to_matrix(random_axis_angle(rng));
        const Vec3 shift(d(rng), d(rng), d(rng));
        MotionFrame g = f;
        g.global_orient = matrix_to_axis_angle(q * axis_angle_to_matrix(f.global_orient));
        g.translation = q * f.translation + shift;
        const SkeletonPose a = forward_kinematics(skel, f);
        const SkeletonPose b = forward_kinematics(skel, g);
        for (std::size_t i = 0; i < kJointCount; ++i) {
            ASSERT_LE((b.joint_positions[i] - (q * a.joint_positions[i] + shift)).norm(), 1e-9);
        }
    }
}

TEST(ForwardKinematics, Deterministic) {
    std::mt19937_64 rng(6);
    const MotionFrame f = random_frame(rng);
    const auto a = forward_kinematics(Skeleton::smpl_default(), f);
    const auto b = forward_kinematics(Skeleton::smpl_default(), f);
    for (std::size_t i = 0; i < kJointCount; ++i) {
        ASSERT_EQ(std::memcmp(a.joint_positions[i].data(), b.joint_positions[i].data(), sizeof(double) * 3), 0);
    }
}

TEST(Skeleton, DataFileMatchesBuiltInDefault) {
    const Skeleton loaded = load_skeleton(std::string(MOCAP_DATA_DIR) + "/smpl_skeleton.jsonl");
    EXPECT_EQ(loaded, Skeleton::smpl_default());
}

TEST(Skeleton, TextRoundTrip) {
    EXPECT_EQ(parse_skeleton(to_text(Skeleton::smpl_default())), Skeleton::smpl_default());
}

std::string without_last_joint() {
    std::string text = to_text(Skeleton::smpl_default());
    text.pop_back();
    return text.substr(0, text.rfind('\n') + 1);
}

TEST(Skeleton, TwentyThreeJointsRejected) {
    try {
        parse_skeleton(without_last_joint());
        FAIL() << "expected rejection";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("exactly 24 joints"), std::string::npos);
    }
}

TEST(Skeleton, InvalidTreeRejected) {
    Skeleton s = Skeleton::smpl_default();
    s.parent[5] = 7;
    EXPECT_THROW(parse_skeleton(to_text(s)), ParseError);
    s = Skeleton::smpl_default();
    s.parent[0] = 0;
    EXPECT_THROW(s.validate(), ParseError);
    EXPECT_THROW(parse_skeleton("{\"name\":\"x\"}\n"), ParseError);
    EXPECT_THROW(load_skeleton("/nonexistent.jsonl"), ParseError);
}

TEST(Skeleton, DefaultTreeShape) {
    const Skeleton& s = Skeleton::smpl_default();
    EXPECT_EQ(s.parent[0], -1);
    for (std::size_t i = 1; i < kJointCount; ++i) EXPECT_LT(s.parent[i], static_cast<int>(i));
    EXPECT_EQ(s.joint_names[15], "head");
}

} // namespace
} // namespace mocap::kinematics
