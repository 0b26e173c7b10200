#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace haddm {

// Failure inside a numerical routine or a violated call contract.
// `where` names the module/operation ("esprit/tls_rotation") so callers
// can report the failing stage without parsing the message text.
class Error : public std::runtime_error {
 public:
  Error(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace haddm
