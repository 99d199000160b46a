#pragma once

#include <stdexcept>
#include <string>

namespace fb {

enum class ErrorKind {
    DivisionByZero,
    NotInRing,
    NonSquare,
    DimensionMismatch,
    NoSolution,
    Parse,
    ULaurentUnderflow,
    UnknownVariable,
    ScalarNotInR,
    NotFramed,
    SingularFiberBasis,
    GCFailed,
    ConditionsNotMet,
    NoUnitComplement,
    NotComparable,
    NotIsomorphic,
    LiftMismatch,
    ReductionWindowExceeded,
    Capacity,
    Invalid,
};

const char *error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind)
    {
    }
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

// Parse failures carry a 1-based position inside the offending text.
class ParseError : public Error {
  public:
    ParseError(const std::string &what, int line, int column)
        : Error(ErrorKind::Parse, what + " at line " + std::to_string(line) + ", column " +
                                      std::to_string(column)),
          line_(line), column_(column)
    {
    }
    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_, column_;
};

} // namespace fb
