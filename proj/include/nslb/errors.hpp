#ifndef NSLB_ERRORS_HPP
#define NSLB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nslb {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyActionSet : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MissingTruth : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, long row) : std::runtime_error(msg + " (row " + std::to_string(row) + ")"), row(row) {}
    long row;
};

struct EmptyPool : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nslb

#endif
