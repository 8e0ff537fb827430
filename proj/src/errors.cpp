#include "sfode/errors.hpp"

#include <utility>

namespace sfode {

StageError::StageError(std::string stage, const std::string& what)
    : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}

}  // namespace sfode
