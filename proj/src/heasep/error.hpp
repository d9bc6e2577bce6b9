#ifndef HEASEP_ERROR_HPP
#define HEASEP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace heasep {

// Error categories; they map 1:1 onto the C API status codes.
enum class ErrorKind {
  io,          // file or directory access failed
  parse,       // malformed data in an input file
  schema,      // input file structure does not match the expected schema
  contract,    // a function contract was violated (bad shapes, bad arguments)
  config,      // bad configuration value
  checkpoint,  // checkpoint file unreadable or version mismatch
  numeric,     // non-finite values where finite ones are required
  internal,    // should-not-happen
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool cond, ErrorKind kind, const std::string& message) {
  if (!cond) raise(kind, message);
}

}  // namespace heasep

#endif
