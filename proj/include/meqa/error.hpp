#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meqa {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::string reason)
      : Error(file + ":" + std::to_string(line) + ": " + reason),
        file_(std::move(file)),
        line_(line),
        reason_(std::move(reason)) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string reason_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class EmptyQuestion : public Error {
 public:
  EmptyQuestion() : Error("question has no tokens after normalization") {}
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("training corpus is empty") {}
};

class EmptyCollection : public Error {
 public:
  EmptyCollection() : Error("document collection has no nonempty document") {}
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyEvalSet : public Error {
 public:
  EmptyEvalSet() : Error("evaluation record set is empty") {}
};

class MismatchedQuestionSets : public Error {
 public:
  using Error::Error;
};

class NoCandidate : public Error {
 public:
  NoCandidate() : Error("no candidate leaflet") {}
};

}  // namespace meqa
