#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "eiqa/kinematics.hpp"
#include "eiqa/rng.hpp"

using namespace eiqa;
using namespace eiqa::kin;

namespace {

// Test-local 4x4 chain multiplication, kept free of the library's transform
// type so the FK oracle stays an independent route.
using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 mat4_identity() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

Mat4 mat4_mul(const Mat4& a, const Mat4& b) {
    Mat4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
            r[i][j] = s;
        }
    return r;
}

// Direct transcription of the closed-form link matrix.
Mat4 dh_closed_form(double alpha, double a, double d, double theta) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    Mat4 m = mat4_identity();
    m[0][0] = ct;
    m[0][1] = -st * ca;
    m[0][2] = st * sa;
    m[0][3] = a * ct;
    m[1][0] = st;
    m[1][1] = ct * ca;
    m[1][2] = -ct * sa;
    m[1][3] = a * st;
    m[2][0] = 0.0;
    m[2][1] = sa;
    m[2][2] = ca;
    m[2][3] = d;
    return m;
}

Mat4 fk_oracle(const JointVector& q, const DHTable& t) {
    Mat4 m = mat4_identity();
    for (int i = 0; i < 6; ++i) {
        const DHRow& r = t.rows[static_cast<std::size_t>(i)];
        m = mat4_mul(m, dh_closed_form(r.alpha, r.a, r.d, q[i] + r.theta_offset));
    }
    return m;
}

double max_abs_diff(const Mat4& m, const HomogeneousTransform& h) {
    const Eigen::Matrix4d e = h.matrix();
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(m[i][j] - e(i, j)));
    return worst;
}

JointVector random_joints(std::uint64_t seed, std::uint64_t idx) {
    JointVector q;
    for (int i = 0; i < 6; ++i)
        q[i] = (rng::uniform01(seed, static_cast<std::uint64_t>(i), idx) - 0.5) * 2.0 * M_PI;
    return q.wrapped();
}

// Test-side notion of "non-singular": every branch quantity the analytic
// solver divides through or takes square roots of stays comfortably away
// from its critical value, for all sigma combinations.
bool well_conditioned(const JointVector& q, const DHTable& t) {
    const HomogeneousTransform T = forward_kinematics(q, t);
    const double d4 = t.d4(), d6 = t.d6(), a2 = t.a2(), a3 = t.a3();
    const Eigen::Vector3d pwc = T.translation - d6 * T.rotation.col(2);
    const double radicand = pwc.x() * pwc.x() + pwc.y() * pwc.y() - d4 * d4;
    if (radicand < 1e-4) return false;
    const double psi = std::atan2(pwc.y(), pwc.x());
    for (int sigma1 : {+1, -1}) {
        const double th1 = psi - std::atan2(-d4, sigma1 * std::sqrt(radicand));
        const double s1 = std::sin(th1), c1 = std::cos(th1);
        const double c5 = T.rotation.col(2).x() * s1 - T.rotation.col(2).y() * c1;
        if (1.0 - c5 * c5 < 0.05 * 0.05) return false;
        const double s5_mag = std::sqrt(1.0 - c5 * c5);
        const HomogeneousTransform inv_a1 = dh_transform(t.rows[0], th1).inverse();
        for (int sigma5 : {+1, -1}) {
            const double s5 = sigma5 * s5_mag;
            const double th5 = std::atan2(s5, c5);
            const double lat_s = T.rotation.col(1).x() * s1 - T.rotation.col(1).y() * c1;
            const double lat_n = T.rotation.col(0).x() * s1 - T.rotation.col(0).y() * c1;
            const double th6 = std::atan2(-lat_s / s5, lat_n / s5);
            const HomogeneousTransform t14 = inv_a1 * T *
                                             dh_transform(t.rows[5], th6).inverse() *
                                             dh_transform(t.rows[4], th5).inverse();
            const double x = t14.translation.x(), y = t14.translation.y();
            const double c3 = (x * x + y * y - a2 * a2 - a3 * a3) / (2.0 * a2 * a3);
            if (std::abs(c3) > 0.97) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("dh_transform closed form") {
    SUBCASE("all-zero row gives identity") {
        const HomogeneousTransform h = dh_transform({0, 0, 0, 0}, 0.0);
        CHECK(h.rotation.isApprox(Eigen::Matrix3d::Identity(), 1e-15));
        CHECK(h.translation.norm() == doctest::Approx(0.0));
    }
    SUBCASE("pure link offset is a z translation") {
        const HomogeneousTransform h = dh_transform({0, 0, DHTable::kD1, 0}, 0.0);
        CHECK(h.rotation.isApprox(Eigen::Matrix3d::Identity(), 1e-15));
        CHECK(h.translation.x() == doctest::Approx(0.0));
        CHECK(h.translation.y() == doctest::Approx(0.0));
        CHECK(h.translation.z() == doctest::Approx(DHTable::kD1));
    }
    SUBCASE("twisted row matches independent substitution") {
        const HomogeneousTransform h = dh_transform({M_PI_2, 0, 0, 0}, M_PI / 3.0);
        const Mat4 m = dh_closed_form(M_PI_2, 0, 0, M_PI / 3.0);
        CHECK(max_abs_diff(m, h) < 1e-15);
    }
}

TEST_CASE("forward kinematics against chain-multiplication oracle") {
    const DHTable t = DHTable::ur5();
    SUBCASE("all-zero joints") {
        JointVector q{};
        const HomogeneousTransform h = forward_kinematics(q, t);
        CHECK(max_abs_diff(fk_oracle(q, t), h) < 1e-12);
    }
    SUBCASE("200 random configurations") {
        for (std::uint64_t i = 0; i < 200; ++i) {
            const JointVector q = random_joints(11, i);
            const HomogeneousTransform h = forward_kinematics(q, t);
            CHECK(max_abs_diff(fk_oracle(q, t), h) < 1e-12);
        }
    }
}

TEST_CASE("base joint rotates the end effector about z") {
    const DHTable t = DHTable::ur5();
    const JointVector q = random_joints(77, 3);
    JointVector q2 = q;
    const double delta = 0.731;
    q2[0] = q[0] + delta;
    const Eigen::Vector3d p1 = forward_kinematics(q, t).translation;
    const Eigen::Vector3d p2 = forward_kinematics(q2, t).translation;
    CHECK(std::hypot(p1.x(), p1.y()) == doctest::Approx(std::hypot(p2.x(), p2.y())).epsilon(1e-12));
    CHECK(p1.z() == doctest::Approx(p2.z()).epsilon(1e-12));
    const double ang1 = std::atan2(p1.y(), p1.x());
    const double ang2 = std::atan2(p2.y(), p2.x());
    CHECK(wrap_angle(ang2 - ang1 - delta) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("rotation blocks stay orthonormal over 10k random configurations") {
    const DHTable t = DHTable::ur5();
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const HomogeneousTransform h = forward_kinematics(random_joints(5, i), t);
        worst = std::max(worst, h.orthonormality_residual());
        worst = std::max(worst, std::abs(h.rotation.determinant() - 1.0));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("wrist center equals the frame-5 origin") {
    const DHTable t = DHTable::ur5();
    SUBCASE("direct substitution example") {
        HomogeneousTransform pose;
        pose.translation = Eigen::Vector3d(0.3, 0.2, 0.5);
        const Eigen::Vector3d wc = wrist_center(pose, 0.0823);
        CHECK(wc.x() == doctest::Approx(0.3));
        CHECK(wc.y() == doctest::Approx(0.2));
        CHECK(wc.z() == doctest::Approx(0.4177));
    }
    SUBCASE("d6 = 0 keeps the end point") {
        HomogeneousTransform pose;
        pose.translation = Eigen::Vector3d(0.1, -0.4, 0.2);
        CHECK((wrist_center(pose, 0.0) - pose.translation).norm() == doctest::Approx(0.0));
    }
    SUBCASE("1000 random configurations, 1e-9") {
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 1000; ++i) {
            const JointVector q = random_joints(9, i);
            const auto frames = forward_kinematics_frames(q, t);
            const Eigen::Vector3d wc = wrist_center(frames[6], t.d6());
            worst = std::max(worst, (wc - frames[5].translation).norm());
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("IK round trip: 8 solutions, source recovered, residuals under 1e-6") {
    const DHTable t = DHTable::ur5();
    const auto t0 = std::chrono::steady_clock::now();
    int accepted = 0;
    std::uint64_t draw = 0;
    while (accepted < 1000) {
        REQUIRE(draw < 100000);
        const JointVector q = random_joints(1234, draw++);
        if (!well_conditioned(q, t)) continue;
        ++accepted;

        const HomogeneousTransform target = forward_kinematics(q, t);
        const IKSolutionSet sols = inverse_kinematics(target, t);
        REQUIRE(sols.size() == 8);
        CHECK(sols.singularity == Singularity::None);

        bool matched = false;
        for (const IKSolution& s : sols.solutions) {
            double dmax = 0.0;
            for (int i = 0; i < 6; ++i)
                dmax = std::max(dmax, std::abs(wrap_angle(s.joints[i] - q[i])));
            if (dmax < 1e-6) matched = true;
            const HomogeneousTransform fk = forward_kinematics(s.joints, t);
            CHECK((fk.translation - target.translation).norm() < 1e-6);
            CHECK((fk.rotation - target.rotation).norm() < 1e-6);
        }
        CHECK(matched);

        // Branch triples must be unique.
        for (std::size_t i = 0; i < sols.size(); ++i)
            for (std::size_t j = i + 1; j < sols.size(); ++j)
                CHECK(sols.solutions[i].branch != sols.solutions[j].branch);
    }
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    CHECK(std::chrono::duration_cast<std::chrono::seconds>(elapsed).count() < 10);
}

TEST_CASE("IK honors the negated link-length convention") {
    const DHTable t = DHTable::ur5().negate_link_lengths();
    int accepted = 0;
    std::uint64_t draw = 0;
    while (accepted < 50) {
        REQUIRE(draw < 20000);
        const JointVector q = random_joints(4321, draw++);
        if (!well_conditioned(q, t)) continue;
        ++accepted;
        const HomogeneousTransform target = forward_kinematics(q, t);
        const IKSolutionSet sols = inverse_kinematics(target, t);
        REQUIRE(sols.size() == 8);
        bool matched = false;
        for (const IKSolution& s : sols.solutions) {
            double dmax = 0.0;
            for (int i = 0; i < 6; ++i)
                dmax = std::max(dmax, std::abs(wrap_angle(s.joints[i] - q[i])));
            if (dmax < 1e-6) matched = true;
        }
        CHECK(matched);
    }
}

TEST_CASE("wrist singularity keeps the theta4 = 0 convention") {
    const DHTable t = DHTable::ur5();

    SUBCASE("targets built with theta4 = 0, theta5 = 0") {
        int constructed = 0;
        std::uint64_t draw = 0;
        while (constructed < 50) {
            REQUIRE(draw < 20000);
            JointVector q = random_joints(55, draw++);
            q[3] = 0.0;
            q[4] = 0.0; // exact wrist singularity, expressible by the convention
            const HomogeneousTransform target = forward_kinematics(q, t);
            const Eigen::Vector3d pwc = wrist_center(target, t.d6());
            if (pwc.x() * pwc.x() + pwc.y() * pwc.y() - t.d4() * t.d4() < 1e-4) continue;
            const IKSolutionSet sols = inverse_kinematics(target, t);
            REQUIRE(!sols.empty());
            ++constructed;
            CHECK(sols.singularity == Singularity::Wrist);

            int singular_branch = 0;
            bool matched = false;
            for (const IKSolution& s : sols.solutions) {
                if (std::abs(std::sin(s.joints[4])) < 1e-6) {
                    ++singular_branch;
                    CHECK(s.joints[3] == doctest::Approx(0.0));
                }
                double dmax = 0.0;
                for (int i = 0; i < 6; ++i)
                    dmax = std::max(dmax, std::abs(wrap_angle(s.joints[i] - q[i])));
                if (dmax < 1e-6) matched = true;
                const HomogeneousTransform fk = forward_kinematics(s.joints, t);
                CHECK((fk.translation - target.translation).norm() < 1e-6);
                CHECK((fk.rotation - target.rotation).norm() < 1e-6);
            }
            CHECK(singular_branch >= 1);
            CHECK(matched);
        }
    }

    SUBCASE("targets built with free theta4, theta5 = 0") {
        // The theta4 = 0 fold shrinks the reachable annulus, so the singular
        // branch may be empty here; the set must still carry the Wrist flag
        // and every returned solution must reproduce the pose.
        int constructed = 0;
        std::uint64_t draw = 0;
        while (constructed < 50) {
            REQUIRE(draw < 20000);
            JointVector q = random_joints(56, draw++);
            q[4] = 0.0;
            const HomogeneousTransform target = forward_kinematics(q, t);
            const Eigen::Vector3d pwc = wrist_center(target, t.d6());
            if (pwc.x() * pwc.x() + pwc.y() * pwc.y() - t.d4() * t.d4() < 1e-4) continue;
            const IKSolutionSet sols = inverse_kinematics(target, t);
            ++constructed;
            CHECK(sols.singularity == Singularity::Wrist);
            for (const IKSolution& s : sols.solutions) {
                if (std::abs(std::sin(s.joints[4])) < 1e-6)
                    CHECK(s.joints[3] == doctest::Approx(0.0));
                const HomogeneousTransform fk = forward_kinematics(s.joints, t);
                CHECK((fk.translation - target.translation).norm() < 1e-6);
                CHECK((fk.rotation - target.rotation).norm() < 1e-6);
            }
        }
    }
}

TEST_CASE("unreachable targets return diagnostics instead of solutions") {
    const DHTable t = DHTable::ur5();
    SUBCASE("elbow: wrist center beyond the link annulus") {
        HomogeneousTransform target;
        target.translation = Eigen::Vector3d(2.5, 0.0, 0.3);
        const IKSolutionSet sols = inverse_kinematics(target, t);
        CHECK(sols.empty());
        CHECK(sols.diagnostic.find("elbow") != std::string::npos);
    }
    SUBCASE("shoulder: wrist center inside the d4 cylinder") {
        HomogeneousTransform target;
        target.translation = Eigen::Vector3d(0.0, 0.0, 0.6) +
                             0.0823 * Eigen::Vector3d(0, 0, 1);
        const IKSolutionSet sols = inverse_kinematics(target, t);
        CHECK(sols.empty());
        CHECK(sols.singularity == Singularity::Shoulder);
        CHECK(sols.diagnostic.find("shoulder") != std::string::npos);
    }
    SUBCASE("non-orthonormal rotation is a validation error") {
        HomogeneousTransform target;
        target.rotation(0, 0) = 2.0;
        CHECK_THROWS_AS(inverse_kinematics(target, t), ValidationError);
    }
}

TEST_CASE("pose composition") {
    SUBCASE("identity delta returns the initial pose") {
        const JointVector q = random_joints(2, 1);
        const HomogeneousTransform h = forward_kinematics(q, DHTable::ur5());
        const HomogeneousTransform r = compose_pose(h, HomogeneousTransform{});
        CHECK((r.matrix() - h.matrix()).norm() == doctest::Approx(0.0));
    }
    SUBCASE("pure translations add") {
        HomogeneousTransform a, b;
        a.translation = Eigen::Vector3d(0.1, 0.2, 0.3);
        b.translation = Eigen::Vector3d(-0.4, 0.5, 0.6);
        const HomogeneousTransform r = compose_pose(a, b);
        CHECK((r.translation - Eigen::Vector3d(-0.3, 0.7, 0.9)).norm() < 1e-15);
    }
    SUBCASE("five-step chain equals the one-shot product") {
        const DHTable t = DHTable::ur5();
        HomogeneousTransform acc;
        Mat4 oracle = mat4_identity();
        for (std::uint64_t i = 0; i < 5; ++i) {
            const JointVector q = random_joints(31, i);
            const HomogeneousTransform step = forward_kinematics(q, t);
            acc = compose_pose(acc, step);
            oracle = mat4_mul(oracle, fk_oracle(q, t));
        }
        CHECK(max_abs_diff(oracle, acc) < 1e-12);
    }
    SUBCASE("associativity") {
        const DHTable t = DHTable::ur5();
        const HomogeneousTransform a = forward_kinematics(random_joints(41, 0), t);
        const HomogeneousTransform b = forward_kinematics(random_joints(41, 1), t);
        const HomogeneousTransform c = forward_kinematics(random_joints(41, 2), t);
        const Eigen::Matrix4d lhs = compose_pose(compose_pose(a, b), c).matrix();
        const Eigen::Matrix4d rhs = compose_pose(a, compose_pose(b, c)).matrix();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("execution score rubric") {
    ExecutionOutcome o;
    o.kind = ExecutionOutcome::Kind::Success;
    CHECK(execution_score(o) == doctest::Approx(100.0));

    o.kind = ExecutionOutcome::Kind::EmergencyStop;
    CHECK(execution_score(o) == doctest::Approx(0.0));

    o.kind = ExecutionOutcome::Kind::Failure;
    CHECK_THROWS_AS(execution_score(o), ValidationError);

    o.final_pose_ref = Eigen::Vector3d(0.0, 0.0, 0.0);
    o.final_pose_dist = Eigen::Vector3d(0.10, 0.0, 0.0); // 10 cm apart
    CHECK(execution_score(o) == doctest::Approx(90.0));

    o.final_pose_dist = Eigen::Vector3d(1.5, 0.0, 0.0); // beyond 100 cm
    CHECK(execution_score(o) == doctest::Approx(0.0));
}

TEST_CASE("angle wrapping lands in (-pi, pi]") {
    CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
    CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
    CHECK(wrap_angle(3.0 * M_PI) == doctest::Approx(M_PI));
    CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
    CHECK(wrap_angle(2.0 * M_PI + 0.25) == doctest::Approx(0.25));
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double x = (rng::uniform01(3, 0, i) - 0.5) * 50.0;
        const double w = wrap_angle(x);
        CHECK(w > -M_PI);
        CHECK(w <= M_PI);
        CHECK(std::abs(std::remainder(w - x, 2.0 * M_PI)) < 1e-9);
    }
}
