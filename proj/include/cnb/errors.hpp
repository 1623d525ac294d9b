#pragma once

#include <stdexcept>
#include <string>

namespace cnb {

// Base for errors raised by the numerical modules. The CLI maps these to
// exit code 1 and reports name() verbatim in the error payload.
class DomainError : public std::runtime_error {
public:
    DomainError(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// Base for malformed or invalid user input. The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
public:
    InputError(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

struct AntipodalOrCoincident : DomainError {
    explicit AntipodalOrCoincident(const std::string& what)
        : DomainError("AntipodalOrCoincident", what) {}
};

struct SingularConfiguration : DomainError {
    explicit SingularConfiguration(const std::string& what)
        : DomainError("SingularConfiguration", what) {}
};

struct EvenN : DomainError {
    explicit EvenN(const std::string& what) : DomainError("EvenN", what) {}
};

struct PoleSingularity : DomainError {
    explicit PoleSingularity(const std::string& what)
        : DomainError("PoleSingularity", what) {}
};

struct PoleLatitude : DomainError {
    explicit PoleLatitude(const std::string& what)
        : DomainError("PoleLatitude", what) {}
};

struct KernelDimensionError : DomainError {
    explicit KernelDimensionError(const std::string& what)
        : DomainError("KernelDimensionError", what) {}
};

struct NonPositiveMasses : DomainError {
    explicit NonPositiveMasses(const std::string& what)
        : DomainError("NonPositiveMasses", what) {}
};

struct NotAnEquilibrium : DomainError {
    explicit NotAnEquilibrium(const std::string& what)
        : DomainError("NotAnEquilibrium", what) {}
};

struct SingularityApproach : DomainError {
    explicit SingularityApproach(const std::string& what)
        : DomainError("SingularityApproach", what) {}
};

struct ParseError : InputError {
    explicit ParseError(const std::string& what) : InputError("ParseError", what) {}
};

struct ValidationError : InputError {
    explicit ValidationError(const std::string& what)
        : InputError("ValidationError", what) {}
};

}  // namespace cnb
