#pragma once

#include <stdexcept>
#include <string>

namespace omicsel {

// Error taxonomy maps 1:1 onto CLI exit codes: usage=1, data=2, internal=3.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace omicsel
