#ifndef ENGINE_ERRORS_HPP
#define ENGINE_ERRORS_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace engine {

// Malformed textual invariant: carries the byte offset and what was expected.
class syntax_error : public std::runtime_error {
 public:
  syntax_error(std::size_t position, std::string expected)
      : std::runtime_error("syntax error at offset " + std::to_string(position) +
                           ": expected " + expected),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

// A known constructor applied to the wrong number of arguments.
class arity_error : public std::runtime_error {
 public:
  arity_error(std::string constructor, std::size_t expected, std::size_t got)
      : std::runtime_error(constructor + " expects " + std::to_string(expected) +
                           " argument(s), got " + std::to_string(got)),
        constructor_(std::move(constructor)),
        expected_(expected),
        got_(got) {}

  const std::string& constructor() const noexcept { return constructor_; }
  std::size_t expected_arity() const noexcept { return expected_; }
  std::size_t got_arity() const noexcept { return got_; }

 private:
  std::string constructor_;
  std::size_t expected_;
  std::size_t got_;
};

// An operation was called outside its stated precondition.
class precondition_error : public std::logic_error {
 public:
  explicit precondition_error(const std::string& what) : std::logic_error(what) {}
};

// A model term falls outside the positive fragment supported by snapshot
// extraction. Carries the index of the offending term so the model author
// can locate it.
class unsupported_form : public std::runtime_error {
 public:
  explicit unsupported_form(std::size_t term_index, std::string detail = {})
      : std::runtime_error("unsupported model term at index " +
                           std::to_string(term_index) +
                           (detail.empty() ? "" : ": " + detail)),
        term_index_(term_index) {}

  std::size_t term_index() const noexcept { return term_index_; }

 private:
  std::size_t term_index_;
};

// Point decomposition would exceed the configured cap.
class cap_exceeded : public std::runtime_error {
 public:
  explicit cap_exceeded(std::int64_t required)
      : std::runtime_error("decomposition needs " + std::to_string(required) +
                           " points, over the cap"),
        required_(required) {}

  std::int64_t required_count() const noexcept { return required_; }

 private:
  std::int64_t required_;
};

// An event line that cannot be parsed. The pipeline logs and drops these.
class malformed_event : public std::runtime_error {
 public:
  explicit malformed_event(std::string reason)
      : std::runtime_error("malformed event: " + reason), reason_(std::move(reason)) {}

  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

// Backpressure signal: the bounded intake queue is at capacity.
class queue_full : public std::runtime_error {
 public:
  explicit queue_full(std::size_t capacity)
      : std::runtime_error("event queue full (capacity " + std::to_string(capacity) + ")"),
        capacity_(capacity) {}

  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::size_t capacity_;
};

// Ill-formed XML input.
class xml_error : public std::runtime_error {
 public:
  xml_error(std::size_t position, const std::string& detail)
      : std::runtime_error("xml error at offset " + std::to_string(position) + ": " + detail),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// A <command> element whose type attribute names no known command kind.
class unknown_command_type : public std::runtime_error {
 public:
  explicit unknown_command_type(std::string type)
      : std::runtime_error("unknown command type \"" + type + "\""), type_(std::move(type)) {}

  const std::string& type() const noexcept { return type_; }

 private:
  std::string type_;
};

// Unparseable wall-clock timestamp.
class timestamp_error : public std::runtime_error {
 public:
  explicit timestamp_error(const std::string& input)
      : std::runtime_error("cannot parse timestamp \"" + input + "\"") {}
};

// Configuration problems: missing files, bad values, unusable rule lines.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised by an event handler; dispatch converts it into an error banner.
class handler_failure : public std::runtime_error {
 public:
  handler_failure(std::string category, std::string detail)
      : std::runtime_error("handler for \"" + category + "\" failed: " + detail),
        category_(std::move(category)),
        detail_(std::move(detail)) {}

  const std::string& category() const noexcept { return category_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string category_;
  std::string detail_;
};

}  // namespace engine

#endif  // ENGINE_ERRORS_HPP
