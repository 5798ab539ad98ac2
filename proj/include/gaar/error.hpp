#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaar {

// Root of every error raised by the library. Subsystems derive their own
// types so callers can catch at whatever granularity they need.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

namespace fol {

class FolError : public Error {
 public:
  using Error::Error;
};

// Malformed formula text. `offset` is the byte offset of the offending token.
class SyntaxError : public FolError {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : FolError(message + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// The same predicate symbol used with two different arities.
class ArityError : public FolError {
 public:
  using FolError::FolError;
};

// A name used both as a quantified variable and as a constant.
class SymbolClashError : public FolError {
 public:
  using FolError::FolError;
};

}  // namespace fol

namespace solver {

class SolverError : public Error {
 public:
  using Error::Error;
};

// Input lies outside the decidable fragment the grounder handles.
class UnsupportedFragment : public SolverError {
 public:
  using SolverError::SolverError;
};

class NotValid : public SolverError {
 public:
  using SolverError::SolverError;
};

class CapExceeded : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace solver

namespace llm {

class LlmError : public Error {
 public:
  using Error::Error;
};

class MissingPlaceholder : public LlmError {
 public:
  using LlmError::LlmError;
};

// A structured response lacked a required section or was malformed.
class ParseError : public LlmError {
 public:
  using LlmError::LlmError;
};

class BackendError : public LlmError {
 public:
  using LlmError::LlmError;
};

class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

class RateLimited : public BackendError {
 public:
  using BackendError::BackendError;
};

class CacheMiss : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace llm

namespace pipeline {

// A formalization whose keys do not cover every symbol it uses.
class KeyCoverageError : public llm::ParseError {
 public:
  using llm::ParseError::ParseError;
};

}  // namespace pipeline

namespace eval {

class EvalError : public Error {
 public:
  using Error::Error;
};

class AllTies : public EvalError {
 public:
  using EvalError::EvalError;
};

class DisconnectedGraph : public EvalError {
 public:
  using EvalError::EvalError;
};

class DegenerateColumn : public EvalError {
 public:
  using EvalError::EvalError;
};

class NotEnoughData : public EvalError {
 public:
  using EvalError::EvalError;
};

class MalformedBracket : public EvalError {
 public:
  using EvalError::EvalError;
};

}  // namespace eval

namespace dataset {

class DatasetError : public Error {
 public:
  using Error::Error;
};

// Decode failure on a specific line of a corpus file (1-based).
class DecodeError : public DatasetError {
 public:
  DecodeError(std::size_t line, const std::string& message)
      : DatasetError("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyCorpus : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class InsufficientData : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

}  // namespace dataset

}  // namespace gaar
