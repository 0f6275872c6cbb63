#include "dipoleforge/error.hpp"

namespace dipoleforge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RejectedInput: return "rejected_input";
    case ErrorKind::DegenerateDecomposition: return "degenerate_decomposition";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::InsufficientNeighbors: return "insufficient_neighbors";
    case ErrorKind::DegenerateFeature: return "degenerate_feature";
    case ErrorKind::EmptyEpochs: return "empty_epochs";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void reject(const std::string& message) { throw Error(ErrorKind::RejectedInput, message); }

void misconfigured(const std::string& message) { throw Error(ErrorKind::Configuration, message); }

}  // namespace dipoleforge
