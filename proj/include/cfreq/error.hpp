#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfreq {

enum class ErrorKind {
    Configuration,
    Domain,
    Contract,
    Numeric,
    IncompleteSpectrum,
    Verification,
    Boundary,
    InsufficientSpectrum,
    Precondition,
    Bracket,
    NotFound,
};

[[nodiscard]] const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Newton did not produce the requested number of roots; carries what was found.
class IncompleteSpectrumError : public Error {
public:
    IncompleteSpectrumError(const std::string& what, std::vector<std::complex<double>> partial)
        : Error(ErrorKind::IncompleteSpectrum, what), partial_(std::move(partial)) {}

    [[nodiscard]] const std::vector<std::complex<double>>& partial_roots() const noexcept {
        return partial_;
    }

private:
    std::vector<std::complex<double>> partial_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace cfreq
