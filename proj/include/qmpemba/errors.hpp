#pragma once

#include <stdexcept>
#include <string>

namespace qmpemba {

// Each failure family maps onto its own CLI exit code (see commands.hpp).

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class SpectralError : public std::runtime_error {
public:
  explicit SpectralError(const std::string& what) : std::runtime_error(what) {}
};

class MpembaError : public std::runtime_error {
public:
  explicit MpembaError(const std::string& what) : std::runtime_error(what) {}
};

class DynamicsError : public std::runtime_error {
public:
  explicit DynamicsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qmpemba
