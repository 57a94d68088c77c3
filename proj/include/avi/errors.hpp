#pragma once

#include <stdexcept>
#include <string>

namespace avi {

/// Base of every error thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid scene or parameter (bad kind pair, non-positive step, ...).
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// Coincident centers or spring endpoints; unreachable in a well-posed run.
class GeometryError : public Error
{
public:
  using Error::Error;
};

/// NaN/Inf entering the state.
class NumericError : public Error
{
public:
  using Error::Error;
};

/// An event was scheduled before the current global time.
class ClockError : public Error
{
public:
  using Error::Error;
};

class StatisticsError : public Error
{
public:
  using Error::Error;
};

/// Scene-file syntax or semantic error; carries the 1-based line when known.
class ParseError : public ConfigError
{
public:
  ParseError(int line, const std::string& what)
    : ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
  {
  }
  int line() const noexcept { return line_; }

private:
  int line_;
};

} // namespace avi
