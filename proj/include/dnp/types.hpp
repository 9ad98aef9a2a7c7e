#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dnp {

using Word = std::uint32_t;
using Cycle = std::uint64_t;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class MalformedPacket : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MemoryFault : public Error {
 public:
  using Error::Error;
};

}  // namespace dnp
