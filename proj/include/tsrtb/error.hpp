#pragma once

#include <stdexcept>
#include <string>

namespace tsrtb {

/// Base for every error the library raises on bad input or configuration.
/// The CLI maps these to exit status 2; anything else is an internal error.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidAuction : public Error
{
public:
  using Error::Error;
};

class MissingMetric : public Error
{
public:
  MissingMetric(std::string ad_id, std::string metric)
    : Error("missing metric '" + metric + "' for ad '" + ad_id + "'")
    , ad_id_(std::move(ad_id))
    , metric_(std::move(metric))
  {}

  const std::string &ad_id() const { return ad_id_; }
  const std::string &metric() const { return metric_; }

private:
  std::string ad_id_;
  std::string metric_;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class ValidationError : public Error
{
public:
  using Error::Error;
};

class ParseError : public Error
{
public:
  ParseError(std::string const &path, std::size_t line, std::string const &what)
    : Error(path + ":" + std::to_string(line) + ": " + what)
    , line_(line)
  {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class SamplingError : public Error
{
public:
  using Error::Error;
};

}  // namespace tsrtb
