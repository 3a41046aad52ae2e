#include "eiqa/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "eiqa/errors.hpp"

namespace eiqa::harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

Config Config::from_string(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) +
                                               ": empty key");
        c.values_[key] = value;
    }
    return c;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + ": not a number: " + it->second);
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + ": not an integer: " + it->second);
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ValidationError("config key " + key + ": not a boolean: " + it->second);
}

std::map<int, std::array<double, 5>> Config::distortion_overrides() const {
    std::map<int, std::array<double, 5>> overrides;
    for (const auto& [key, value] : values_) {
        if (key.rfind("dist.", 0) != 0) continue;
        const auto dot = key.find('.', 5);
        if (dot == std::string::npos || key.substr(dot + 1) != "params")
            throw ValidationError("unrecognized distortion config key: " + key);
        int id = 0;
        try {
            id = std::stoi(key.substr(5, dot - 5));
        } catch (const std::exception&) {
            throw ValidationError("bad distortion id in config key: " + key);
        }
        distort::registry_entry(id); // known id check
        std::array<double, 5> params{};
        std::istringstream ss(value);
        std::string token;
        int n = 0;
        while (std::getline(ss, token, ',')) {
            if (n >= 5) throw ValidationError(key + ": expected 5 level parameters");
            try {
                params[static_cast<std::size_t>(n++)] = std::stod(token);
            } catch (const std::exception&) {
                throw ValidationError(key + ": not a number: " + token);
            }
        }
        if (n != 5) throw ValidationError(key + ": expected 5 level parameters");
        overrides[id] = params;
    }
    return overrides;
}

kin::DHTable Config::dh_table() const {
    kin::DHTable t = kin::DHTable::ur5();
    t.rows[0].d = get_double("dh.d1", t.rows[0].d);
    t.rows[1].a = get_double("dh.a2", t.rows[1].a);
    t.rows[2].a = get_double("dh.a3", t.rows[2].a);
    t.rows[3].d = get_double("dh.d4", t.rows[3].d);
    t.rows[4].d = get_double("dh.d5", t.rows[4].d);
    t.rows[5].d = get_double("dh.d6", t.rows[5].d);
    if (get_bool("dh.negate_link_lengths", false)) t = t.negate_link_lengths();
    return t;
}

} // namespace eiqa::harness
