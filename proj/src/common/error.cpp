#include "wordify/error.hpp"

namespace wordify {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::EmptyPattern: return "EmptyPattern";
    case Errc::IllegalCharacter: return "IllegalCharacter";
    case Errc::NoLiteral: return "NoLiteral";
    case Errc::UnitOutOfRange: return "UnitOutOfRange";
    case Errc::UnreadableStream: return "UnreadableStream";
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::AmbiguousClassification: return "AmbiguousClassification";
    case Errc::UnknownCategory: return "UnknownCategory";
    case Errc::UnknownPattern: return "UnknownPattern";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::WrongStage: return "WrongStage";
    case Errc::GamePaused: return "GamePaused";
    case Errc::GameFinished: return "GameFinished";
    case Errc::EmptyAnswer: return "EmptyAnswer";
    case Errc::PoolTooSmall: return "PoolTooSmall";
    case Errc::CardNotFaceDown: return "CardNotFaceDown";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::AlreadyPaused: return "AlreadyPaused";
    case Errc::NotPaused: return "NotPaused";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::UnknownWordId: return "UnknownWordId";
    case Errc::UnknownTeacher: return "UnknownTeacher";
    case Errc::InvalidRole: return "InvalidRole";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::OrphanGame: return "OrphanGame";
    case Errc::StorageFailure: return "StorageFailure";
  }
  return "Unknown";
}

}  // namespace wordify
