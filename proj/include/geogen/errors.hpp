#pragma once

#include <stdexcept>
#include <string>

namespace geogen {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct TransportError : Error {
    using Error::Error;
};

}  // namespace geogen
