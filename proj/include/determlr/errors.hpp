#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace determlr {

/// Base of every error raised by the library. Callers that only need to
/// report a failure can catch this; the subclasses carry structured detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyStatement : public Error {
 public:
  EmptyStatement() : Error("empty statement") {}
};

class ParseError : public Error {
 public:
  ParseError(std::string text, std::size_t position, const std::string& why)
      : Error("cannot parse \"" + text + "\" at " + std::to_string(position) + ": " + why),
        text_(std::move(text)),
        position_(position) {}

  const std::string& text() const { return text_; }
  std::size_t position() const { return position_; }

 private:
  std::string text_;
  std::size_t position_;
};

class EmptyDeterminateSet : public Error {
 public:
  EmptyDeterminateSet() : Error("determinate premise set is empty") {}
};

class Inconsistent : public Error {
 public:
  Inconsistent(std::string positive, std::string negative)
      : Error("knowledge base is inconsistent: \"" + positive + "\" vs \"" + negative + "\""),
        positive_(std::move(positive)),
        negative_(std::move(negative)) {}

  const std::string& positive() const { return positive_; }
  const std::string& negative() const { return negative_; }

 private:
  std::string positive_;
  std::string negative_;
};

class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class AuthError : public Error {
 public:
  using Error::Error;
};

class FieldNotFound : public Error {
 public:
  explicit FieldNotFound(std::string label)
      : Error("field not found: " + label), label_(std::move(label)) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class UnboundPlaceholder : public Error {
 public:
  explicit UnboundPlaceholder(std::string name)
      : Error("unbound placeholder: {" + name + "}"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ReplayExhausted : public Error {
 public:
  explicit ReplayExhausted(const std::string& stage)
      : Error("replay fixture exhausted for stage " + stage) {}
};

class ReplayMismatch : public Error {
 public:
  ReplayMismatch(const std::string& stage, const std::string& expected, const std::string& actual)
      : Error("replay digest mismatch for stage " + stage + ": expected " + expected + ", got " +
              actual) {}
};

class ExplorationFailed : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(std::size_t record, const std::string& field, const std::string& why)
      : Error("record " + std::to_string(record) + ": field \"" + field + "\": " + why),
        record_(record),
        field_(field) {}

  std::size_t record() const { return record_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t record_;
  std::string field_;
};

class InternalInvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace determlr
