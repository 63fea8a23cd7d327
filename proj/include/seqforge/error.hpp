#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seqforge {

enum class ErrorCode {
    InvalidArgument,
    InvalidResidue,
    EmptySequence,
    WrongAlphabet,
    WindowTooLarge,
    NoHeader,
    DuplicateId,
    MissingAccession,
    LengthMismatch,
    UnterminatedRecord,
    SyntaxError,
    EmptyPattern,
    TooShort,
    AlphabetMismatch,
    MalformedMatrix,
    UnknownResidue,
    DuplicateAccession,
    CorruptStore,
    UnknownField,
    Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code is what callers branch on.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> position = std::nullopt)
        : std::runtime_error(message), code_(code), position_(position) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> position() const noexcept { return position_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> position_;
};

class InvalidResidueError : public Error {
public:
    InvalidResidueError(std::size_t position, char residue);
    char residue() const noexcept { return residue_; }

private:
    char residue_;
};

} // namespace seqforge
