#pragma once

#include "bohmsemi/errors.hpp"

namespace bohmsemi::io {

/// Configuration that does not parse or violates the schema. The message names the field.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A run directory without the data a command needs.
class MissingData : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bohmsemi::io
