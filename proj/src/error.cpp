#include "sea/error.hpp"

#include <utility>

namespace sea {

Error::Error(std::string code, std::string field, std::string detail)
    : std::runtime_error(code + (field.empty() ? "" : " at " + field) + ": " + detail),
      code_(std::move(code)),
      field_(std::move(field)),
      detail_(std::move(detail)) {}

}  // namespace sea
