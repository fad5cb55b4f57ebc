#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srfid {

enum class ErrorKind {
  io,
  format,
  argument,
  degenerate_input,
  model_load,
  model_spec,
  backend,
  degenerate_embedding,
  conflict,
  not_found,
  state,
  parse,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every error raised by the workbench. The kind is stable and
/// used by the CLI and the HTTP layer to pick exit codes / status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define SRFID_DEFINE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  }

SRFID_DEFINE_ERROR(IoError, io);
SRFID_DEFINE_ERROR(FormatError, format);
SRFID_DEFINE_ERROR(ArgumentError, argument);
SRFID_DEFINE_ERROR(DegenerateInputError, degenerate_input);
SRFID_DEFINE_ERROR(ModelLoadError, model_load);
SRFID_DEFINE_ERROR(ModelSpecError, model_spec);
SRFID_DEFINE_ERROR(BackendError, backend);
SRFID_DEFINE_ERROR(DegenerateEmbeddingError, degenerate_embedding);
SRFID_DEFINE_ERROR(ConflictError, conflict);
SRFID_DEFINE_ERROR(NotFoundError, not_found);
SRFID_DEFINE_ERROR(StateError, state);

#undef SRFID_DEFINE_ERROR

/// Malformed input record; carries the 1-based line number it came from.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Rethrows `e` as the same concrete error kind with `context` prepended
/// to the message.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

}  // namespace srfid
