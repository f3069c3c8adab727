#include "spinetor/report.hpp"

#include <sstream>

namespace spinetor {

std::string content_digest(const std::string& text) {
    // FNV-1a, printed as hex; stable across platforms.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace spinetor
