#pragma once

#include <stdexcept>
#include <string>

namespace moexp {

// Raised for every contract violation in the library. The message is the
// stable, user-facing reason ("duplicate edge", "shape error", ...).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace moexp
