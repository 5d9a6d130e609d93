#pragma once

#include <stdexcept>
#include <string>

namespace ecpcs {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A numeric parameter is outside its valid range (nonpositive power, BER out
// of (0, 0.2), zero-length direction, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Pricing clock runs behind the photo timestamp.
class StalenessError : public Error {
public:
    using Error::Error;
};

// A photo's participant has no channel state.
class MissingChannel : public Error {
public:
    using Error::Error;
};

// No grid cell reaches the coverage threshold.
class EmptyTargetArea : public Error {
public:
    using Error::Error;
};

// Instance too big for exhaustive search.
class TooLarge : public Error {
public:
    using Error::Error;
};

// Positive load assigned a zero bandwidth share.
class ZeroBandwidth : public Error {
public:
    using Error::Error;
};

// Every participant has zero upload load.
class NoLoad : public Error {
public:
    using Error::Error;
};

// A feasible allocation beat the closed form, or its delays are not equalized.
class OptimalityViolation : public Error {
public:
    using Error::Error;
};

// Cloud upload scheme requested without backhaul parameters.
class MissingBackhaul : public Error {
public:
    using Error::Error;
};

// Cache entry larger than the whole cache.
class OversizeEntry : public Error {
public:
    using Error::Error;
};

// Malformed scenario/config document.
class ParseError : public Error {
public:
    using Error::Error;
};

// Well-formed document that breaks an invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Inconsistent scene generation parameters.
class BadSpec : public Error {
public:
    using Error::Error;
};

// Scheme name not in the implemented set.
class UnknownScheme : public Error {
public:
    using Error::Error;
};

// Filesystem write/read failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ecpcs
