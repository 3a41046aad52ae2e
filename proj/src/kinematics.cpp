#include "eiqa/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace eiqa::kin {

namespace {

constexpr double kShoulderTol = 1e-12; // radicand below this is singular
constexpr double kSinTol = 1e-8;       // |sin theta3| below this marks the elbow singular
// A target built from an exactly singular configuration carries ~1e-15 of
// rotation-entry roundoff, which sqrt(1 - c5^2) amplifies to ~5e-8. The
// wrist-branch decision therefore sits at 1e-7; the residual gate keeps
// either path honest in the overlap band.
constexpr double kWristSinTol = 1e-7;
constexpr double kReachSlack = 1e-9;  // numeric slack on |cos| <= 1 reachability
constexpr double kResidualTol = 1e-6; // FK validation gate (m / Frobenius)
constexpr double kDedupTol = 1e-9;

Eigen::Matrix3d rot_z(double t) {
    Eigen::Matrix3d m;
    m << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
    return m;
}

} // namespace

DHTable DHTable::ur5() {
    DHTable t;
    t.rows[0] = {M_PI_2, 0.0, kD1, 0.0};
    t.rows[1] = {0.0, kA2, 0.0, 0.0};
    t.rows[2] = {0.0, kA3, 0.0, 0.0};
    t.rows[3] = {M_PI_2, 0.0, kD4, 0.0};
    t.rows[4] = {-M_PI_2, 0.0, kD5, 0.0};
    t.rows[5] = {0.0, 0.0, kD6, 0.0};
    return t;
}

DHTable DHTable::negate_link_lengths() const {
    DHTable t = *this;
    t.rows[1].a = -t.rows[1].a;
    t.rows[2].a = -t.rows[2].a;
    return t;
}

void DHTable::validate_ur_structure() const {
    const double twists[6] = {M_PI_2, 0.0, 0.0, M_PI_2, -M_PI_2, 0.0};
    for (int i = 0; i < 6; ++i) {
        const DHRow& r = rows[static_cast<std::size_t>(i)];
        if (std::abs(r.alpha - twists[i]) > 1e-12)
            throw ValidationError("DH table twist pattern does not match the UR chain");
        if (std::abs(r.a) > 2.0 || std::abs(r.d) > 2.0)
            throw ValidationError("DH length outside physical range (|.| < 2 m)");
        if (!std::isfinite(r.a) || !std::isfinite(r.d) || !std::isfinite(r.theta_offset))
            throw ValidationError("non-finite DH parameter");
    }
    if (rows[0].a != 0.0 || rows[1].d != 0.0 || rows[2].d != 0.0 ||
        rows[3].a != 0.0 || rows[4].a != 0.0 || rows[5].a != 0.0)
        throw ValidationError("DH offsets placed on rows the analytic IK cannot handle");
    if (rows[1].a == 0.0 || rows[2].a == 0.0)
        throw ValidationError("zero-length upper/forearm link");
}

Eigen::Matrix4d HomogeneousTransform::matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.block<3, 3>(0, 0) = rotation;
    m.block<3, 1>(0, 3) = translation;
    return m;
}

HomogeneousTransform HomogeneousTransform::from_matrix(const Eigen::Matrix4d& m) {
    HomogeneousTransform t;
    t.rotation = m.block<3, 3>(0, 0);
    t.translation = m.block<3, 1>(0, 3);
    return t;
}

double HomogeneousTransform::orthonormality_residual() const {
    return (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm();
}

void HomogeneousTransform::validate(double tol) const {
    if (!rotation.allFinite() || !translation.allFinite())
        throw ValidationError("non-finite transform");
    if (orthonormality_residual() > tol)
        throw ValidationError("rotation block is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > tol)
        throw ValidationError("rotation determinant is not +1");
}

HomogeneousTransform HomogeneousTransform::inverse() const {
    HomogeneousTransform t;
    t.rotation = rotation.transpose();
    t.translation = -t.rotation * translation;
    return t;
}

HomogeneousTransform HomogeneousTransform::operator*(const HomogeneousTransform& rhs) const {
    HomogeneousTransform t;
    t.rotation = rotation * rhs.rotation;
    t.translation = rotation * rhs.translation + translation;
    return t;
}

double wrap_angle(double x) {
    double w = std::remainder(x, 2.0 * M_PI);
    if (w <= -M_PI) w += 2.0 * M_PI;
    return w;
}

JointVector JointVector::wrapped() const {
    JointVector q;
    for (int i = 0; i < 6; ++i) q[i] = wrap_angle(theta[static_cast<std::size_t>(i)]);
    return q;
}

HomogeneousTransform dh_transform(const DHRow& row, double theta) {
    const double t = theta + row.theta_offset;
    const double ct = std::cos(t), st = std::sin(t);
    const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
    HomogeneousTransform h;
    h.rotation << ct, -st * ca, st * sa,
                  st, ct * ca, -ct * sa,
                  0.0, sa, ca;
    h.translation << row.a * ct, row.a * st, row.d;
    return h;
}

HomogeneousTransform forward_kinematics(const JointVector& joints, const DHTable& table) {
    HomogeneousTransform t;
    for (int i = 0; i < 6; ++i)
        t = t * dh_transform(table.rows[static_cast<std::size_t>(i)], joints[i]);
    return t;
}

std::array<HomogeneousTransform, 7> forward_kinematics_frames(const JointVector& joints,
                                                              const DHTable& table) {
    std::array<HomogeneousTransform, 7> frames;
    for (int i = 0; i < 6; ++i)
        frames[static_cast<std::size_t>(i + 1)] =
            frames[static_cast<std::size_t>(i)] *
            dh_transform(table.rows[static_cast<std::size_t>(i)], joints[i]);
    return frames;
}

Eigen::Vector3d wrist_center(const HomogeneousTransform& target, double d6) {
    return target.translation - d6 * target.approach();
}

namespace {

struct Candidate {
    JointVector q;
    std::array<int, 3> branch;
};

// Planar two-link solve for theta2/theta3 given the frame-1 position of the
// wrist frame and effective link lengths len1/len2. Returns false when the
// target lies outside the reachable annulus.
bool planar_two_link(double x, double y, double len1, double len2, int sigma3,
                     double& th2, double& th3, bool& elbow_singular) {
    const double c = (x * x + y * y - len1 * len1 - len2 * len2) / (2.0 * len1 * len2);
    if (std::abs(c) > 1.0 + kReachSlack) return false;
    const double cc = std::clamp(c, -1.0, 1.0);
    const double s_mag = std::sqrt(std::max(0.0, 1.0 - cc * cc));
    if (s_mag < kSinTol) elbow_singular = true;
    const double s = sigma3 * s_mag;
    th3 = std::atan2(s, cc);
    th2 = std::atan2(y, x) - std::atan2(len2 * s, len1 + len2 * cc);
    return true;
}

} // namespace

IKSolutionSet inverse_kinematics(const HomogeneousTransform& target, const DHTable& table) {
    target.validate(1e-9);
    table.validate_ur_structure();

    const double a2 = table.a2(), a3 = table.a3();
    const double d4 = table.d4(), d5 = table.d5(), d6 = table.d6();

    IKSolutionSet out;
    const Eigen::Vector3d pwc = wrist_center(target, d6);

    // theta1: the wrist center keeps a constant lateral offset d4 from the
    // vertical plane swept by the base joint:  x*s1 - y*c1 = d4.
    const double radicand = pwc.x() * pwc.x() + pwc.y() * pwc.y() - d4 * d4;
    if (radicand < -kShoulderTol) {
        out.singularity = Singularity::Shoulder;
        out.diagnostic = "shoulder unreachable: wrist center inside the d4 cylinder";
        return out;
    }
    if (radicand < kShoulderTol) out.singularity = Singularity::Shoulder;
    const double root = std::sqrt(std::max(0.0, radicand));
    const double psi = std::atan2(pwc.y(), pwc.x());

    bool any_elbow_fail = false;
    std::vector<Candidate> candidates;

    for (int sigma1 : {+1, -1}) {
        const double th1 = wrap_angle(psi - std::atan2(-d4, sigma1 * root));
        const double s1 = std::sin(th1), c1 = std::cos(th1);

        // Lateral direction of frame 1 (the joint-2/3/4 axis) in base coords.
        const auto lat = [&](const Eigen::Vector3d& v) { return v.x() * s1 - v.y() * c1; };

        const double c5 = std::clamp(lat(target.approach()), -1.0, 1.0);
        const double s5_mag = std::sqrt(std::max(0.0, 1.0 - c5 * c5));
        const bool wrist_singular = s5_mag < kWristSinTol;
        if (wrist_singular && out.singularity == Singularity::None)
            out.singularity = Singularity::Wrist;

        const HomogeneousTransform inv_a1 =
            dh_transform(table.rows[0], th1).inverse();
        const HomogeneousTransform t16 = inv_a1 * target;

        if (!wrist_singular) {
            for (int sigma5 : {+1, -1}) {
                const double s5 = sigma5 * s5_mag;
                const double th5 = std::atan2(s5, c5);
                const double th6 = std::atan2(-lat(target.slide()) / s5,
                                              lat(target.normal()) / s5);

                // Strip the wrist to expose the planar elbow chain.
                const HomogeneousTransform t14 =
                    t16 * dh_transform(table.rows[5], th6).inverse() *
                    dh_transform(table.rows[4], th5).inverse();

                for (int sigma3 : {+1, -1}) {
                    double th2 = 0, th3 = 0;
                    bool elbow_singular = false;
                    if (!planar_two_link(t14.translation.x(), t14.translation.y(), a2, a3,
                                         sigma3, th2, th3, elbow_singular)) {
                        any_elbow_fail = true;
                        continue;
                    }
                    if (elbow_singular && out.singularity == Singularity::None)
                        out.singularity = Singularity::Elbow;
                    const double th234 =
                        std::atan2(t14.rotation(1, 0), t14.rotation(0, 0));
                    const double th4 = wrap_angle(th234 - th2 - th3);
                    Candidate c;
                    c.q.theta = {th1, wrap_angle(th2), wrap_angle(th3), th4,
                                 wrap_angle(th5), wrap_angle(th6)};
                    c.branch = {sigma1, sigma3, sigma5};
                    candidates.push_back(c);
                }
            }
        } else {
            // Wrist singularity: joint axes 4 and 6 align, only theta4+theta6
            // is determined. Convention: theta4 = 0, fold the d5 offset into
            // the planar solve, recover theta6 from the leftover rotation.
            const double th5 = (c5 >= 0.0) ? 0.0 : M_PI;
            const Eigen::Vector3d pwc1 = inv_a1.rotation * pwc + inv_a1.translation;
            const double rho = std::hypot(a3, d5);
            const double delta = std::atan2(d5, a3);

            for (int sigma3 : {+1, -1}) {
                double th2 = 0, w_minus_u = 0;
                bool elbow_singular = false;
                if (!planar_two_link(pwc1.x(), pwc1.y(), a2, rho, sigma3, th2, w_minus_u,
                                     elbow_singular)) {
                    any_elbow_fail = true;
                    continue;
                }
                if (elbow_singular && out.singularity == Singularity::None)
                    out.singularity = Singularity::Elbow;
                const double th23 = th2 + w_minus_u + delta;
                const double th3 = th23 - th2;

                // R_1^4 = Rz(th23)*Rx(pi/2) once theta4 is pinned to 0; the
                // leftover factor must be the pure z-rotation Rz(th6).
                const Eigen::Matrix3d pre =
                    rot_z(th23) * dh_transform(table.rows[3], 0.0).rotation;
                const Eigen::Matrix3d rem =
                    (pre * dh_transform(table.rows[4], th5).rotation).transpose() *
                    t16.rotation;
                const double th6 = std::atan2(rem(1, 0), rem(0, 0));

                Candidate c;
                c.q.theta = {th1, wrap_angle(th2), wrap_angle(th3), 0.0,
                             wrap_angle(th5), wrap_angle(th6)};
                c.branch = {sigma1, sigma3, +1};
                candidates.push_back(c);
            }
        }
    }

    // Residual gate + dedup of coincident branches.
    for (const Candidate& c : candidates) {
        const HomogeneousTransform fk = forward_kinematics(c.q, table);
        const double pos_err = (fk.translation - target.translation).norm();
        const double rot_err = (fk.rotation - target.rotation).norm();
        if (pos_err > kResidualTol || rot_err > kResidualTol) continue;
        bool dup = false;
        for (const IKSolution& kept : out.solutions) {
            bool same = true;
            for (int i = 0; i < 6; ++i)
                if (std::abs(wrap_angle(kept.joints[i] - c.q[i])) > kDedupTol) {
                    same = false;
                    break;
                }
            if (same) {
                dup = true;
                break;
            }
        }
        if (!dup) out.solutions.push_back({c.q, c.branch});
    }

    if (out.solutions.empty() && out.diagnostic.empty()) {
        if (any_elbow_fail)
            out.diagnostic = "elbow unreachable: wrist center outside the a2/a3 annulus";
        else
            out.diagnostic = "no branch satisfied the FK residual gate";
    }
    return out;
}

HomogeneousTransform compose_pose(const HomogeneousTransform& initial,
                                  const HomogeneousTransform& delta) {
    return initial * delta;
}

double execution_score(const ExecutionOutcome& outcome) {
    switch (outcome.kind) {
    case ExecutionOutcome::Kind::Success:
        return 100.0;
    case ExecutionOutcome::Kind::EmergencyStop:
        return 0.0;
    case ExecutionOutcome::Kind::Failure: {
        if (!outcome.final_pose_ref || !outcome.final_pose_dist)
            throw ValidationError("failure outcome requires both final positions");
        const double d_cm = (*outcome.final_pose_ref - *outcome.final_pose_dist).norm() * 100.0;
        return std::max(0.0, 100.0 - d_cm);
    }
    }
    throw ValidationError("unknown execution outcome kind");
}

} // namespace eiqa::kin
