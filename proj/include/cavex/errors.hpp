#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavex {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

class UnsupportedK : public Error {
public:
    explicit UnsupportedK(int k)
        : Error("unsupported initial polygon k=" + std::to_string(k) + " (supported: 3, 4, 6)"), k_(k) {}
    int k() const noexcept { return k_; }

private:
    int k_;
};

/// The enclosure stopped being meaningful at the working precision.
class PrecisionExhausted : public Error {
public:
    PrecisionExhausted(const std::string& what, int last_valid_stage)
        : Error(what), last_valid_stage_(last_valid_stage) {}
    int last_valid_stage() const noexcept { return last_valid_stage_; }

private:
    int last_valid_stage_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
        : Error(format(offset, expected, found)), offset_(offset), expected_(std::move(expected)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    static std::string format(std::size_t offset, const std::vector<std::string>& expected,
                              const std::string& found) {
        std::string msg = "parse error at offset " + std::to_string(offset) + ": expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) msg += (i + 1 == expected.size()) ? " or " : ", ";
            msg += expected[i];
        }
        msg += ", found " + found;
        return msg;
    }

    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// An inflection lies inside a span that was assumed convex or concave.
class NotCavex : public Error {
public:
    using Error::Error;
};

class TooOscillatory : public Error {
public:
    using Error::Error;
};

class DuplicatePoint : public Error {
public:
    using Error::Error;
};

class DidNotConverge : public Error {
public:
    using Error::Error;
};

class MaxDepthExceeded : public Error {
public:
    using Error::Error;
};

class NotNested : public Error {
public:
    using Error::Error;
};

} // namespace cavex
