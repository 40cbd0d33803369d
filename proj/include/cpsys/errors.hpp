#pragma once

#include <stdexcept>
#include <string>

namespace cpsys {

// Library-wide error codes. Every throwing path in the library uses one of
// these so callers (and tests) can dispatch on the failure kind.
enum class Errc {
  ZeroVector,
  InvalidPoint,
  NonRationalNorm,
  BidegreeMismatch,
  DegreeOverflow,
  DimensionTooSmall,
  NonHorizontalResult,
  NotProportional,
  MalformedForm,
  NotPositive,
  NotGauduchon,
  NotKahler,
  NotNormalized,
  NotGauduchonDirection,
  InconsistentAreas,
  EmptyBasis,
  SingularGram,
  GridTooSmall,
  PositivityLost,
  NotPositiveSolution,
  IllConditioned,
  UnknownExperiment,
  ConfigInvalid,
  Internal,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::InvalidPoint: return "InvalidPoint";
    case Errc::NonRationalNorm: return "NonRationalNorm";
    case Errc::BidegreeMismatch: return "BidegreeMismatch";
    case Errc::DegreeOverflow: return "DegreeOverflow";
    case Errc::DimensionTooSmall: return "DimensionTooSmall";
    case Errc::NonHorizontalResult: return "NonHorizontalResult";
    case Errc::NotProportional: return "NotProportional";
    case Errc::MalformedForm: return "MalformedForm";
    case Errc::NotPositive: return "NotPositive";
    case Errc::NotGauduchon: return "NotGauduchon";
    case Errc::NotKahler: return "NotKahler";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::NotGauduchonDirection: return "NotGauduchonDirection";
    case Errc::InconsistentAreas: return "InconsistentAreas";
    case Errc::EmptyBasis: return "EmptyBasis";
    case Errc::SingularGram: return "SingularGram";
    case Errc::GridTooSmall: return "GridTooSmall";
    case Errc::PositivityLost: return "PositivityLost";
    case Errc::NotPositiveSolution: return "NotPositiveSolution";
    case Errc::IllConditioned: return "IllConditioned";
    case Errc::UnknownExperiment: return "UnknownExperiment";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace cpsys
