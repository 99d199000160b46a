#include "fb/errors.hpp"

namespace fb {

const char *error_kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::NotInRing: return "NotInRing";
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::ULaurentUnderflow: return "ULaurentUnderflow";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::ScalarNotInR: return "ScalarNotInR";
    case ErrorKind::NotFramed: return "NotFramed";
    case ErrorKind::SingularFiberBasis: return "SingularFiberBasis";
    case ErrorKind::GCFailed: return "GCFailed";
    case ErrorKind::ConditionsNotMet: return "ConditionsNotMet";
    case ErrorKind::NoUnitComplement: return "NoUnitComplement";
    case ErrorKind::NotComparable: return "NotComparable";
    case ErrorKind::NotIsomorphic: return "NotIsomorphic";
    case ErrorKind::LiftMismatch: return "LiftMismatch";
    case ErrorKind::ReductionWindowExceeded: return "ReductionWindowExceeded";
    case ErrorKind::Capacity: return "Capacity";
    case ErrorKind::Invalid: return "Invalid";
    }
    return "Error";
}

} // namespace fb
