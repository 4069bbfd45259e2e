#include "bookml/error.hpp"

namespace bookml {

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

void throw_config(const std::string& what) { throw Error(ErrorKind::Config, what); }
void throw_data(const std::string& what) { throw Error(ErrorKind::Data, what); }
void throw_numeric(const std::string& what) { throw Error(ErrorKind::Numeric, what); }

}  // namespace bookml
