#include "srfid/common/error.hpp"

namespace srfid {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::argument: return "argument";
    case ErrorKind::degenerate_input: return "degenerate_input";
    case ErrorKind::model_load: return "model_load";
    case ErrorKind::model_spec: return "model_spec";
    case ErrorKind::backend: return "backend";
    case ErrorKind::degenerate_embedding: return "degenerate_embedding";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::state: return "state";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string msg = context + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::io: throw IoError(msg);
    case ErrorKind::format: throw FormatError(msg);
    case ErrorKind::argument: throw ArgumentError(msg);
    case ErrorKind::degenerate_input: throw DegenerateInputError(msg);
    case ErrorKind::model_load: throw ModelLoadError(msg);
    case ErrorKind::model_spec: throw ModelSpecError(msg);
    case ErrorKind::backend: throw BackendError(msg);
    case ErrorKind::degenerate_embedding: throw DegenerateEmbeddingError(msg);
    case ErrorKind::conflict: throw ConflictError(msg);
    case ErrorKind::not_found: throw NotFoundError(msg);
    case ErrorKind::state: throw StateError(msg);
    case ErrorKind::parse: {
      const auto* pe = dynamic_cast<const ParseError*>(&e);
      throw ParseError(pe ? pe->line() : 0, msg);
    }
  }
  throw Error(e.kind(), msg);
}

}  // namespace srfid
