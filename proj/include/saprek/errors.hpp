#pragma once

#include <stdexcept>
#include <string>

namespace saprek {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ZeroMatrix : public Error {
public:
    using Error::Error;
};

class ZeroRow : public Error {
public:
    using Error::Error;
};

class ZeroColumn : public Error {
public:
    using Error::Error;
};

class NonPositiveEpsilon : public Error {
public:
    using Error::Error;
};

class PreconditionViolated : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace saprek
