#pragma once

#include <stdexcept>
#include <string>

namespace evonet {

// Every recoverable failure in the library surfaces as an Error; the message
// is meant for end users (CLI diagnostics, HTTP 400 bodies).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evonet
