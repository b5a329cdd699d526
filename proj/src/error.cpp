#include "nsp/error.hpp"

namespace nsp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::UnsupportedBoundary: return "UnsupportedBoundary";
    case ErrorKind::DegenerateMap: return "DegenerateMap";
    case ErrorKind::OutOfCollar: return "OutOfCollar";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::Incompatible: return "Incompatible";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateState: return "DegenerateState";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::NonpositiveDensity: return "NonpositiveDensity";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::ResolutionTooLow: return "ResolutionTooLow";
    case ErrorKind::ChartCoverage: return "ChartCoverage";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonpositiveEnergy: return "NonpositiveEnergy";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace nsp
