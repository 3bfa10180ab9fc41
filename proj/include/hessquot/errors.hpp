#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hessquot {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    /// Short machine-readable tag, used in JSON error records.
    virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid-argument"; }
};

/// Eigenvalues fell outside the Garding cone Gamma_k.
class NotAdmissible : public Error {
public:
    NotAdmissible(const std::string& what, std::vector<double> eigenvalues, int failing_sigma,
                  std::optional<std::size_t> node = std::nullopt)
        : Error(what), eigenvalues_(std::move(eigenvalues)), failing_sigma_(failing_sigma), node_(node) {}

    const char* kind() const noexcept override { return "not-admissible"; }

    const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
    /// Smallest j in [1, k] with sigma_j(lambda) <= 0.
    int failing_sigma() const noexcept { return failing_sigma_; }
    /// Flat grid index when raised during assembly.
    std::optional<std::size_t> node() const noexcept { return node_; }

private:
    std::vector<double> eigenvalues_;
    int failing_sigma_;
    std::optional<std::size_t> node_;
};

class EigFailure : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "eig-failure"; }
};

class SamplerExhausted : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "sampler-exhausted"; }
};

class OracleScaleExceeded : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "oracle-scale-exceeded"; }
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset, std::vector<std::string> expected)
        : Error(what), offset_(offset), expected_(std::move(expected)) {}

    const char* kind() const noexcept override { return "syntax-error"; }

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownIdentifier : public ParseError {
public:
    UnknownIdentifier(const std::string& what, std::size_t offset, std::string name)
        : ParseError(what, offset, {}), name_(std::move(name)) {}

    const char* kind() const noexcept override { return "unknown-identifier"; }
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// log of a non-positive number, sqrt of a negative one, division by zero, ...
class DomainFault : public Error {
public:
    DomainFault(const std::string& what, std::string subexpression, double value)
        : Error(what), subexpression_(std::move(subexpression)), value_(value) {}

    const char* kind() const noexcept override { return "domain-fault"; }

    const std::string& subexpression() const noexcept { return subexpression_; }
    double value() const noexcept { return value_; }

private:
    std::string subexpression_;
    double value_;
};

class SingularSystem : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "singular-system"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config-error"; }
};

}  // namespace hessquot
