#pragma once

#include <stdexcept>
#include <string>

namespace qtwist {

// Every failure the library reports derives from Error; kind() is the
// machine-readable tag the CLI puts in its error record.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

struct ResourceError : Error {
    explicit ResourceError(const std::string& what) : Error("resource", what) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error("numerical", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

struct IncompleteFactorization : Error {
    explicit IncompleteFactorization(const std::string& what) : Error("incomplete_factorization", what) {}
};

struct MissingPrerequisite : Error {
    explicit MissingPrerequisite(const std::string& what) : Error("missing_prerequisite", what) {}
};

}  // namespace qtwist
