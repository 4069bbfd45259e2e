#pragma once

#include <stdexcept>
#include <string>

namespace bookml {

// Failure classes. The CLI maps these onto distinct exit codes.
enum class ErrorKind { Config, Data, Numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void throw_config(const std::string& what);
[[noreturn]] void throw_data(const std::string& what);
[[noreturn]] void throw_numeric(const std::string& what);

}  // namespace bookml
