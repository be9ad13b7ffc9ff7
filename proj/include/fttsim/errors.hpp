#pragma once

#include <stdexcept>
#include <string>

namespace fttsim {

/// Invalid scenario or parameter value. The message names the field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Plant state became non-finite.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fttsim
