#ifndef DEEPLCP_ERROR_HPP
#define DEEPLCP_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deeplcp {

// Root of every error thrown by the library. The CLI maps all of these to
// exit code 2 (data/validation error).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An error tied to a location in a text input. line == 0 means "no line".
class LocatedError : public Error {
public:
    LocatedError(std::string source, std::size_t line, const std::string& message)
        : Error(format(source, line, message)), source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& source, std::size_t line, const std::string& message) {
        if (line == 0) return source + ": " + message;
        return source + ":" + std::to_string(line) + ": " + message;
    }

    std::string source_;
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class SchemaError : public LocatedError {
public:
    using LocatedError::LocatedError;
};

class HeaderMismatch : public LocatedError {
public:
    using LocatedError::LocatedError;
};

class ConfigError : public LocatedError {
public:
    using LocatedError::LocatedError;
    explicit ConfigError(const std::string& message) : LocatedError("config", 0, message) {}
};

class CleaningError : public Error {
public:
    CleaningError(std::string attribute, const std::string& value)
        : Error("attribute '" + attribute + "': value '" + value + "' is invalid after cleaning"),
          attribute_(std::move(attribute)) {}

    const std::string& attribute() const noexcept { return attribute_; }

private:
    std::string attribute_;
};

class ValueParseError : public Error {
public:
    ValueParseError(std::string attribute, const std::string& value)
        : Error("attribute '" + attribute + "': '" + value + "' is not a number"),
          attribute_(std::move(attribute)) {}

    const std::string& attribute() const noexcept { return attribute_; }

private:
    std::string attribute_;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class PlanOverflow : public Error {
public:
    using Error::Error;
};

class FormatVersionError : public LocatedError {
public:
    using LocatedError::LocatedError;
};

class EmptyMap : public Error {
public:
    EmptyMap() : Error("max-over-time pooling of an empty feature map") {}
};

class EmptyIndex : public Error {
public:
    EmptyIndex() : Error("nearest-neighbour index is empty") {}
};

class KTooLarge : public Error {
public:
    KTooLarge(std::size_t k, std::size_t size)
        : Error("k = " + std::to_string(k) + " exceeds index size " + std::to_string(size)) {}
};

class EmptyData : public Error {
public:
    EmptyData() : Error("cannot fit a model on an empty data set") {}
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t scores, std::size_t labels)
        : Error("got " + std::to_string(scores) + " scores but " + std::to_string(labels) + " labels") {}
};

class SingleClassAuc : public Error {
public:
    SingleClassAuc() : Error("AUC is undefined when only one label is present") {}
};

class TooFewRecords : public Error {
public:
    explicit TooFewRecords(std::size_t n)
        : Error("need at least 2 records to split, got " + std::to_string(n)) {}
};

}  // namespace deeplcp

#endif  // DEEPLCP_ERROR_HPP
