#pragma once

#include <stdexcept>
#include <string>

namespace vitals {

// Base of all pipeline errors. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be opened or read.
class IoError : public Error {
public:
  using Error::Error;
};

// Malformed container header or payload.
class FormatError : public Error {
public:
  using Error::Error;
};

// Frame dimensions changed mid-stream or do not match the header.
class FrameSizeError : public FormatError {
public:
  using FormatError::FormatError;
};

// Sidecar / CSV rows that do not parse; message names the line.
class ParseError : public Error {
public:
  using Error::Error;
};

// Degenerate ROI rectangle.
class GeometryError : public Error {
public:
  using Error::Error;
};

class InsufficientDataError : public Error {
public:
  using Error::Error;
};

// Sample pushed with a timestamp behind the previous one.
class OrderingError : public Error {
public:
  using Error::Error;
};

// No spectrum bin falls inside the requested band.
class BandResolutionError : public Error {
public:
  using Error::Error;
};

// Series to compare share no timestamps.
class AlignmentError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace vitals
