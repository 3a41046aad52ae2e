#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace eiqa::pose {

// One 7-DoF action sample: translation (mm), rotation (rad), gripper state.
struct Pose7 {
    std::array<double, 3> position{};  // mm
    std::array<double, 3> rotation{};  // rad
    double state = 0.0;                // [0,1]
};

// First 7 numeric fields become the pose, extras (depth and friends) are
// dropped, gripper state is clamped to [0,1].
Pose7 parse_pose(std::span<const double> fields);

// String-field variant; reports the offending field index.
Pose7 parse_pose_fields(std::span<const std::string> fields);

// Index (0 = a, 1 = b) of the arm with the larger summed inter-step path
// length. Ties go to arm a.
int select_dominant_arm(std::span<const Pose7> arm_a, std::span<const Pose7> arm_b);

struct RawMeasures {
    double pos_dist_mm = 0.0; // Euclidean position distance
    double rot_sim = 1.0;     // cosine similarity, [-1,1]
    double state_diff = 0.0;  // |ref - dist|, [0,1]
};

enum class RotationMode {
    RotationVector, // cosine over the raw 3-component rotation vectors
    ApproachAxis,   // cosine over the rotated tool z-axes
};

RawMeasures raw_decision_measures(const Pose7& ref, const Pose7& dist,
                                  RotationMode mode = RotationMode::RotationVector);

struct DecisionDims {
    double position = 0.0; // [0,1], 1 = most faithful
    double rotation = 0.0;
    double state = 0.0;
};

// Dataset-level min-max per dimension, orientation flipped so 1 is most
// faithful; a constant batch maps to 1 (no degradation distinguishable).
std::vector<DecisionDims> normalize_decision_batch(std::span<const RawMeasures> raw);

// Streaming alternative with fixed bounds: position against d_max_mm (the
// arm's working diameter), rotation affinely from [-1,1], state as 1-diff.
DecisionDims normalize_fixed(const RawMeasures& raw, double d_max_mm = 1700.0);

// Mean of the three dimensions.
double decision_task_score(const DecisionDims& dims);

// Sum over exactly 5 tasks, range [0,5].
double decision_image_score(std::span<const DecisionDims> per_task_dims);

} // namespace eiqa::pose
