#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wordify {

// Every failure the engine, roster and service can raise. The names double
// as the machine-readable "error" field of API responses.
enum class Errc {
  EmptyPattern,
  IllegalCharacter,
  NoLiteral,
  UnitOutOfRange,
  UnreadableStream,
  MalformedRecord,
  AmbiguousClassification,
  UnknownCategory,
  UnknownPattern,
  ConfigInvalid,
  WrongStage,
  GamePaused,
  GameFinished,
  EmptyAnswer,
  PoolTooSmall,
  CardNotFaceDown,
  IndexOutOfRange,
  AlreadyPaused,
  NotPaused,
  SchemaMismatch,
  UnknownWordId,
  UnknownTeacher,
  InvalidRole,
  DuplicateName,
  OrphanGame,
  StorageFailure,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace wordify
