#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mineplan {

// Base of every error raised by the library. Subclasses carry the failure
// category; the message names the offending entity where there is one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MINEPLAN_DEFINE_ERROR(Name)          \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

MINEPLAN_DEFINE_ERROR(ParseError);
MINEPLAN_DEFINE_ERROR(IoError);
MINEPLAN_DEFINE_ERROR(ConfigError);
MINEPLAN_DEFINE_ERROR(UnknownBlock);
MINEPLAN_DEFINE_ERROR(UnknownPit);
MINEPLAN_DEFINE_ERROR(RangeError);
MINEPLAN_DEFINE_ERROR(CapacityError);
MINEPLAN_DEFINE_ERROR(UnknownVariable);
MINEPLAN_DEFINE_ERROR(DimensionMismatch);
MINEPLAN_DEFINE_ERROR(BackendError);
MINEPLAN_DEFINE_ERROR(InvalidBound);
MINEPLAN_DEFINE_ERROR(TooLarge);
MINEPLAN_DEFINE_ERROR(InfeasibleInstance);
MINEPLAN_DEFINE_ERROR(StepError);
MINEPLAN_DEFINE_ERROR(MissingValueElement);
MINEPLAN_DEFINE_ERROR(StrategyInapplicable);
MINEPLAN_DEFINE_ERROR(EmptyWeightVector);
MINEPLAN_DEFINE_ERROR(MissingValues);
MINEPLAN_DEFINE_ERROR(EmptyHistory);

#undef MINEPLAN_DEFINE_ERROR

class IntegrityError : public Error {
 public:
  explicit IntegrityError(std::vector<std::string> violations)
      : Error(Summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string Summarize(const std::vector<std::string>& v) {
    std::string msg = "instance integrity check failed (" +
                      std::to_string(v.size()) + " violation(s))";
    for (const auto& line : v) msg += "\n  " + line;
    return msg;
  }

  std::vector<std::string> violations_;
};

// A sliding-windows subproblem had no feasible completion.
class WindowInfeasible : public Error {
 public:
  explicit WindowInfeasible(int window_start)
      : Error("window starting at period " + std::to_string(window_start) +
              " is infeasible"),
        window_start_(window_start) {}

  int window_start() const { return window_start_; }

 private:
  int window_start_;
};

}  // namespace mineplan
