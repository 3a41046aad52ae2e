#pragma once

#include <stdexcept>
#include <string>

namespace eiqa {

// Raised on malformed or out-of-contract inputs. The CLI maps
// ValidationError to exit code 1 and IoError to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace eiqa
