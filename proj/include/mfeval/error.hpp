#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfeval {

// A single broken rule. `code` is machine-readable and stable; `subject`
// names the offending question, section or field.
struct Violation {
    std::string code;
    std::string subject;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

// Base of every domain error. `code()` is the machine-readable category
// surfaced on the CLI and in HTTP error bodies.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }
    virtual const std::vector<Violation>& violations() const noexcept {
        static const std::vector<Violation> none;
        return none;
    }

private:
    std::string code_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string code, const std::string& message,
                    std::vector<Violation> violations)
        : Error(std::move(code), message), violations_(std::move(violations)) {}

    const std::vector<Violation>& violations() const noexcept override {
        return violations_;
    }

private:
    std::vector<Violation> violations_;
};

// Malformed input document. `locus` is a line number or a field path.
class ParseError : public Error {
public:
    ParseError(std::string locus, const std::string& message)
        : Error("parse_error", locus.empty() ? message : locus + ": " + message),
          locus_(std::move(locus)),
          message_(message) {}

    const std::string& locus() const noexcept { return locus_; }
    // The message without the locus prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string locus_;
    std::string message_;
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& message) : Error("not_found", message) {}
};

class ConflictError : public Error {
public:
    explicit ConflictError(const std::string& message) : Error("conflict", message) {}
};

}  // namespace mfeval
