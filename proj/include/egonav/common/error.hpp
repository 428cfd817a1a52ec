#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace egonav {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class... Ts>
std::string cat(Ts&&... parts) {
  std::ostringstream out;
  (out << ... << parts);
  return out.str();
}

template <class... Ts>
[[noreturn]] void fail(Ts&&... parts) {
  throw Error(cat(std::forward<Ts>(parts)...));
}

template <class... Ts>
void check(bool ok, Ts&&... parts) {
  if (!ok) fail(std::forward<Ts>(parts)...);
}

}  // namespace egonav
