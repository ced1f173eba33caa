#pragma once

#include <stdexcept>
#include <string>

namespace pegservo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

class BehindCameraError : public Error {
public:
    using Error::Error;
};

class InvalidDepthError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// The view direction of a camera is parallel to the insertion direction.
class DegenerateViewError : public Error {
public:
    using Error::Error;
};

/// No camera produced a usable constraint for too many consecutive frames.
class EstimationStarvedError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pegservo
