#pragma once

#include <stdexcept>
#include <string>

namespace rkhs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Factorization breakdown, overflow, or another failure of the arithmetic itself.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The pairwise-decay bound was not reached within the searched horizon.
class DecayNotMet : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace rkhs
