#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eiqa/errors.hpp"

namespace eiqa::kin {

// One link of a serial chain, classic Denavit-Hartenberg parameterization.
// The link transform is Rz(theta + theta_offset) * Tz(d) * Tx(a) * Rx(alpha).
struct DHRow {
    double alpha = 0.0;        // link twist, rad
    double a = 0.0;            // link length, m
    double d = 0.0;            // link offset, m
    double theta_offset = 0.0; // constant joint-angle offset, rad
};

// Six-row table for the UR5 arm. Defaults hold the published UR5 constants
// with positive link lengths; negate_link_lengths() covers the convention
// that lists a2/a3 as negative.
struct DHTable {
    static constexpr double kD1 = 0.089159;
    static constexpr double kA2 = 0.425;
    static constexpr double kA3 = 0.39225;
    static constexpr double kD4 = 0.10915;
    static constexpr double kD5 = 0.09465;
    static constexpr double kD6 = 0.0823;

    std::array<DHRow, 6> rows;

    static DHTable ur5();
    DHTable negate_link_lengths() const;

    double d1() const { return rows[0].d; }
    double a2() const { return rows[1].a; }
    double a3() const { return rows[2].a; }
    double d4() const { return rows[3].d; }
    double d5() const { return rows[4].d; }
    double d6() const { return rows[5].d; }

    // The analytic IK relies on the UR twist/offset pattern; reject tables
    // that moved parameters to other rows.
    void validate_ur_structure() const;
};

// Rigid transform with columns [n s a] and translation p.
struct HomogeneousTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d normal() const { return rotation.col(0); }
    Eigen::Vector3d slide() const { return rotation.col(1); }
    Eigen::Vector3d approach() const { return rotation.col(2); }

    Eigen::Matrix4d matrix() const;
    static HomogeneousTransform from_matrix(const Eigen::Matrix4d& m);

    double orthonormality_residual() const;
    void validate(double tol = 1e-9) const;

    HomogeneousTransform inverse() const;
    HomogeneousTransform operator*(const HomogeneousTransform& rhs) const;
};

struct JointVector {
    std::array<double, 6> theta{};

    double& operator[](int i) { return theta[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return theta[static_cast<std::size_t>(i)]; }

    JointVector wrapped() const;
};

// Wrap an angle to (-pi, pi].
double wrap_angle(double x);

enum class Singularity { None, Shoulder, Elbow, Wrist };

struct IKSolution {
    JointVector joints;
    std::array<int, 3> branch{}; // (sigma1, sigma3, sigma5), each +1/-1
};

struct IKSolutionSet {
    std::vector<IKSolution> solutions;
    Singularity singularity = Singularity::None;
    std::string diagnostic; // non-empty when the set is empty (reason)

    bool empty() const { return solutions.empty(); }
    std::size_t size() const { return solutions.size(); }
};

// Single-link transform from the closed-form DH matrix.
HomogeneousTransform dh_transform(const DHRow& row, double theta);

// Product of the six link transforms.
HomogeneousTransform forward_kinematics(const JointVector& joints, const DHTable& table);

// Base-frame pose of every chain frame, T_0^0 .. T_0^6.
std::array<HomogeneousTransform, 7> forward_kinematics_frames(const JointVector& joints,
                                                              const DHTable& table);

// p - d6 * a: the origin of frame 5 for the UR table.
Eigen::Vector3d wrist_center(const HomogeneousTransform& target, double d6);

// Enumerates the (sigma1, sigma3, sigma5) branches; every returned solution
// has been validated against the target by FK residual. Unreachable targets
// give an empty set with a diagnostic instead of throwing.
IKSolutionSet inverse_kinematics(const HomogeneousTransform& target, const DHTable& table);

// initial * delta; chains step deltas onto a start pose.
HomogeneousTransform compose_pose(const HomogeneousTransform& initial,
                                  const HomogeneousTransform& delta);

struct ExecutionOutcome {
    enum class Kind { Success, Failure, EmergencyStop };
    Kind kind = Kind::Success;
    std::optional<Eigen::Vector3d> final_pose_ref;  // m
    std::optional<Eigen::Vector3d> final_pose_dist; // m
};

// Success = 100, emergency stop = 0, failure deducts one point per
// centimeter of final-position error, floored at 0.
double execution_score(const ExecutionOutcome& outcome);

} // namespace eiqa::kin
