#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace circnoise {

enum class Errc {
  InvalidArgument,
  NotPositive,
  DegenerateKernel,
  UnderResolved,
  AllZero,
  AllZeroKernel,
  BothSucceed,
  PreconditionViolated,
  ClusterAmbiguity,
  InsufficientTail,
  DegeneratePath,
  LengthMismatch,
  AllZeroEnergies,
  NoRoot,
  NotConverged,
  Io,
};

inline std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NotPositive: return "NotPositive";
    case Errc::DegenerateKernel: return "DegenerateKernel";
    case Errc::UnderResolved: return "UnderResolved";
    case Errc::AllZero: return "AllZero";
    case Errc::AllZeroKernel: return "AllZeroKernel";
    case Errc::BothSucceed: return "BothSucceed";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::ClusterAmbiguity: return "ClusterAmbiguity";
    case Errc::InsufficientTail: return "InsufficientTail";
    case Errc::DegeneratePath: return "DegeneratePath";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::AllZeroEnergies: return "AllZeroEnergies";
    case Errc::NoRoot: return "NoRoot";
    case Errc::NotConverged: return "NotConverged";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code that
/// callers (and the CLI exit-code mapping) can switch on.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

namespace detail {
inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}
}  // namespace detail

}  // namespace circnoise
