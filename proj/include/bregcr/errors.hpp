#pragma once

#include <stdexcept>
#include <string>

namespace bregcr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Requested order, kind or model pairing is not supported.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public Error {
public:
    using Error::Error;
};

// Non-integrable Hessian blow-up while building a Delta weight.
class SingularityError : public Error {
public:
    using Error::Error;
};

// Hessian bounds cannot be certified on the prior mass (sandwich bounds).
class UnboundedHessianError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

class RegularityError : public Error {
public:
    using Error::Error;
};

class MomentDivergenceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace bregcr
