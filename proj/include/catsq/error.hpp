#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace catsq {

enum class ErrorKind {
  MissingComposite,
  NonAssociative,
  BadIdentity,
  DanglingId,
  DuplicateId,
  NotComposable,
  BadComposite,
  ShapeMismatch,
  UnknownObject,
  UnknownArrow,
  NotAFunctor,
  NotNatural,
  TargetMismatch,
  BoundaryMismatch,
  ArrowMismatch,
  TriangleMismatch,
  BaseMismatch,
  SizeGuardExceeded,
  SyntaxError,
  UnresolvedName,
  ValidationFailed,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingComposite: return "MissingComposite";
    case ErrorKind::NonAssociative: return "NonAssociative";
    case ErrorKind::BadIdentity: return "BadIdentity";
    case ErrorKind::DanglingId: return "DanglingId";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::NotComposable: return "NotComposable";
    case ErrorKind::BadComposite: return "BadComposite";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::UnknownObject: return "UnknownObject";
    case ErrorKind::UnknownArrow: return "UnknownArrow";
    case ErrorKind::NotAFunctor: return "NotAFunctor";
    case ErrorKind::NotNatural: return "NotNatural";
    case ErrorKind::TargetMismatch: return "TargetMismatch";
    case ErrorKind::BoundaryMismatch: return "BoundaryMismatch";
    case ErrorKind::ArrowMismatch: return "ArrowMismatch";
    case ErrorKind::TriangleMismatch: return "TriangleMismatch";
    case ErrorKind::BaseMismatch: return "BaseMismatch";
    case ErrorKind::SizeGuardExceeded: return "SizeGuardExceeded";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnresolvedName: return "UnresolvedName";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Explicit caps for every enumeration that can blow up. Exceeding one throws
/// SizeGuardExceeded; nothing is ever truncated silently.
struct Limits {
  std::size_t max_objects = 4096;
  std::size_t max_arrows = 65536;
  std::size_t max_elements = 1'000'000;
  std::size_t max_search_steps = 50'000'000;
};

inline void guard(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::SizeGuardExceeded, what);
}

}  // namespace catsq
