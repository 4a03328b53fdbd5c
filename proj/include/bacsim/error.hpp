#pragma once

#include <stdexcept>
#include <string>

namespace bacsim {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Invalid input to the charge model, or a broken profile invariant.
class SimulationError : public Error
{
public:
    using Error::Error;
};

// Fatal dataset problems: unreadable stream, missing header or required column.
// Malformed rows are never fatal; they are counted in IngestReport instead.
class IngestError : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

class SynthError : public Error
{
public:
    using Error::Error;
};

}  // namespace bacsim
