#pragma once

#include <array>
#include <map>
#include <string>

#include "eiqa/distortions.hpp"
#include "eiqa/kinematics.hpp"

namespace eiqa::harness {

// Flat `key = value` configuration ('#' starts a comment). Recognized keys:
//   dh.d1 dh.a2 dh.a3 dh.d4 dh.d5 dh.d6   DH constants (meters)
//   dh.negate_link_lengths                true for the negative a2/a3 table
//   decision.normalization                batch | fixed
//   decision.rotation_mode                vector | axis
//   decision.d_max_mm                     fixed-mode position bound
//   plcc.logistic                         true to fit the logistic first
//   split.pair_level                      true for pair-level splits
//   dist.<id>.params                      5 comma-separated level overrides
class Config {
public:
    Config() = default;
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    kin::DHTable dh_table() const;

    // `dist.<id>.params = a,b,c,d,e` entries, validated against the registry.
    std::map<int, std::array<double, 5>> distortion_overrides() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace eiqa::harness
