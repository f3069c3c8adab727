#pragma once

#include <cstdint>
#include <string>

namespace spinetor {

std::string content_digest(const std::string& text);

} // namespace spinetor
