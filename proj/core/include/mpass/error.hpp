#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpass {

enum class ErrorCode {
  EndpointMismatch,
  NonFinite,
  GammaOutOfRange,
  InvalidEndpoints,
  BracketDegenerate,
  BudgetExhausted,
  SeparationFailed,
  LevelNotReached,
  NotInBasin,
  OracleInconsistent,
  EpsOutOfRange,
  BadDimension,
  InvalidArgument,
  ConfigError,
  MissingRun,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code. All library failures go through this type.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace mpass
