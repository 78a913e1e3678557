#pragma once

#include <stdexcept>
#include <string>

namespace akmine {

// Thrown when command-line arguments or config keys are unusable.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an input file or record fails validation.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown on I/O or internal failures at run time.
class RuntimeFailure : public std::runtime_error {
public:
    explicit RuntimeFailure(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace akmine
