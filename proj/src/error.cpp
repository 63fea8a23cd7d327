#include "seqforge/error.hpp"

namespace seqforge {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidResidue: return "InvalidResidue";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::WrongAlphabet: return "WrongAlphabet";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::NoHeader: return "NoHeader";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingAccession: return "MissingAccession";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnterminatedRecord: return "UnterminatedRecord";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::EmptyPattern: return "EmptyPattern";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::MalformedMatrix: return "MalformedMatrix";
    case ErrorCode::UnknownResidue: return "UnknownResidue";
    case ErrorCode::DuplicateAccession: return "DuplicateAccession";
    case ErrorCode::CorruptStore: return "CorruptStore";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

static std::string describe_residue(char c)
{
    if (c == ' ')
        return "' '";
    if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
        return "byte " + std::to_string(static_cast<unsigned char>(c));
    return std::string("'") + c + "'";
}

InvalidResidueError::InvalidResidueError(std::size_t position, char residue)
    : Error(ErrorCode::InvalidResidue,
            "invalid residue " + describe_residue(residue) + " at position " + std::to_string(position),
            position),
      residue_(residue)
{
}

} // namespace seqforge
