#pragma once

#include <stdexcept>
#include <string>

namespace medtext {

enum class ErrorKind {
    Io,
    Parse,
    DuplicateId,
    InvalidLabel,
    InvalidArgument,
    UnknownEntity,
    SelfEdge,
    DimensionMismatch,
    EmptyGraph,
    ShapeMismatch,
    UndefinedMetric,
    NonFiniteLoss,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

} // namespace medtext
