#include "eiqa/pose_score.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "eiqa/errors.hpp"

namespace eiqa::pose {

namespace {

constexpr double kZeroNormEps = 1e-9; // rad; cosine is undefined at zero norm

double norm3(const std::array<double, 3>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

Eigen::Vector3d approach_axis(const std::array<double, 3>& rotvec) {
    const Eigen::Vector3d v(rotvec[0], rotvec[1], rotvec[2]);
    const double angle = v.norm();
    if (angle < kZeroNormEps) return Eigen::Vector3d::UnitZ();
    return Eigen::AngleAxisd(angle, v / angle).toRotationMatrix() * Eigen::Vector3d::UnitZ();
}

} // namespace

Pose7 parse_pose(std::span<const double> fields) {
    if (fields.size() < 7)
        throw ValidationError("pose needs at least 7 fields, got " +
                              std::to_string(fields.size()));
    for (std::size_t i = 0; i < 7; ++i)
        if (!std::isfinite(fields[i]))
            throw ValidationError("non-finite pose field at index " + std::to_string(i));
    Pose7 p;
    p.position = {fields[0], fields[1], fields[2]};
    p.rotation = {fields[3], fields[4], fields[5]};
    p.state = std::clamp(fields[6], 0.0, 1.0);
    return p;
}

Pose7 parse_pose_fields(std::span<const std::string> fields) {
    if (fields.size() < 7)
        throw ValidationError("pose needs at least 7 fields, got " +
                              std::to_string(fields.size()));
    std::vector<double> values;
    values.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(fields[i], &used));
            if (used != fields[i].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ValidationError("non-numeric pose field at index " + std::to_string(i) +
                                  ": '" + fields[i] + "'");
        }
    }
    return parse_pose(values);
}

int select_dominant_arm(std::span<const Pose7> arm_a, std::span<const Pose7> arm_b) {
    if (arm_a.empty() || arm_b.empty())
        throw ValidationError("dominant-arm selection needs non-empty trajectories");
    const auto path_length = [](std::span<const Pose7> t) {
        double sum = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            const double dx = t[i].position[0] - t[i - 1].position[0];
            const double dy = t[i].position[1] - t[i - 1].position[1];
            const double dz = t[i].position[2] - t[i - 1].position[2];
            sum += std::sqrt(dx * dx + dy * dy + dz * dz);
        }
        return sum;
    };
    return path_length(arm_b) > path_length(arm_a) ? 1 : 0;
}

RawMeasures raw_decision_measures(const Pose7& ref, const Pose7& dist, RotationMode mode) {
    for (const Pose7* p : {&ref, &dist}) {
        for (double v : p->position)
            if (!std::isfinite(v)) throw ValidationError("non-finite position");
        for (double v : p->rotation)
            if (!std::isfinite(v)) throw ValidationError("non-finite rotation");
        if (!std::isfinite(p->state)) throw ValidationError("non-finite state");
    }

    RawMeasures m;
    const double dx = ref.position[0] - dist.position[0];
    const double dy = ref.position[1] - dist.position[1];
    const double dz = ref.position[2] - dist.position[2];
    m.pos_dist_mm = std::sqrt(dx * dx + dy * dy + dz * dz);

    if (mode == RotationMode::RotationVector) {
        const double na = norm3(ref.rotation), nb = norm3(dist.rotation);
        if (na < kZeroNormEps && nb < kZeroNormEps)
            m.rot_sim = 1.0;
        else if (na < kZeroNormEps || nb < kZeroNormEps)
            m.rot_sim = 0.0;
        else {
            const double dot = ref.rotation[0] * dist.rotation[0] +
                               ref.rotation[1] * dist.rotation[1] +
                               ref.rotation[2] * dist.rotation[2];
            m.rot_sim = std::clamp(dot / (na * nb), -1.0, 1.0);
        }
    } else {
        m.rot_sim = std::clamp(approach_axis(ref.rotation).dot(approach_axis(dist.rotation)),
                               -1.0, 1.0);
    }

    m.state_diff = std::abs(ref.state - dist.state);
    return m;
}

std::vector<DecisionDims> normalize_decision_batch(std::span<const RawMeasures> raw) {
    if (raw.empty()) throw ValidationError("empty decision batch");

    double pos_min = raw[0].pos_dist_mm, pos_max = raw[0].pos_dist_mm;
    double rot_min = raw[0].rot_sim, rot_max = raw[0].rot_sim;
    double st_min = raw[0].state_diff, st_max = raw[0].state_diff;
    for (const RawMeasures& m : raw) {
        pos_min = std::min(pos_min, m.pos_dist_mm);
        pos_max = std::max(pos_max, m.pos_dist_mm);
        rot_min = std::min(rot_min, m.rot_sim);
        rot_max = std::max(rot_max, m.rot_sim);
        st_min = std::min(st_min, m.state_diff);
        st_max = std::max(st_max, m.state_diff);
    }

    // Flip distance-like dimensions so 1 is most faithful; constant batches
    // map to 1.0 everywhere.
    const auto lower_better = [](double v, double lo, double hi) {
        return hi > lo ? (hi - v) / (hi - lo) : 1.0;
    };
    const auto higher_better = [](double v, double lo, double hi) {
        return hi > lo ? (v - lo) / (hi - lo) : 1.0;
    };

    std::vector<DecisionDims> out;
    out.reserve(raw.size());
    for (const RawMeasures& m : raw) {
        DecisionDims d;
        d.position = lower_better(m.pos_dist_mm, pos_min, pos_max);
        d.rotation = higher_better(m.rot_sim, rot_min, rot_max);
        d.state = lower_better(m.state_diff, st_min, st_max);
        out.push_back(d);
    }
    return out;
}

DecisionDims normalize_fixed(const RawMeasures& raw, double d_max_mm) {
    if (d_max_mm <= 0.0) throw ValidationError("d_max must be positive");
    DecisionDims d;
    d.position = std::clamp(1.0 - raw.pos_dist_mm / d_max_mm, 0.0, 1.0);
    d.rotation = (std::clamp(raw.rot_sim, -1.0, 1.0) + 1.0) / 2.0;
    d.state = std::clamp(1.0 - raw.state_diff, 0.0, 1.0);
    return d;
}

double decision_task_score(const DecisionDims& dims) {
    return (dims.position + dims.rotation + dims.state) / 3.0;
}

double decision_image_score(std::span<const DecisionDims> per_task_dims) {
    if (per_task_dims.size() != 5)
        throw ValidationError("decision image score needs exactly 5 tasks");
    double sum = 0.0;
    for (const DecisionDims& d : per_task_dims) {
        for (double v : {d.position, d.rotation, d.state})
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw ValidationError("decision dim out of [0,1]");
        sum += decision_task_score(d);
    }
    return sum;
}

} // namespace eiqa::pose
