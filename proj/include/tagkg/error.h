#ifndef TAGKG_ERROR_H_
#define TAGKG_ERROR_H_

#include <stdexcept>
#include <string>

namespace tagkg {

// Base error for every failure reported by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the location when one is known.
class ParseError : public Error {
 public:
  ParseError(const std::string &path, int line, const std::string &what)
      : Error(path + (line > 0 ? ":" + std::to_string(line) : "") + ": " +
              what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Input parses but violates a structural invariant (dangling id, cycle, ...).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace tagkg

#endif  // TAGKG_ERROR_H_
