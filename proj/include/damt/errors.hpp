#pragma once

#include <stdexcept>
#include <string>

namespace damt {

// Bad mechanism parameters, malformed configuration files, unusable grids.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched market dimensions or out-of-range player indices.
class dimension_error : public std::runtime_error {
public:
    explicit dimension_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace damt
