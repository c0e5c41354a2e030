#ifndef AGV_ERROR_HPP
#define AGV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace agv {

// Base for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured budget (iterations, subset states, formula size) was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Malformed input model, or an operation was called outside its precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// A learning teacher gave answers that no single regular language explains.
class InconsistentTeacher : public Error {
 public:
  using Error::Error;
};

// Internal invariant broken; always a bug in this library.
class InternalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, int line, int column, const std::string& file = {})
      : InputError((file.empty() ? "" : file + ":") + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        message_(msg), line_(line), column_(column) {}
  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

}  // namespace agv

#endif  // AGV_ERROR_HPP
