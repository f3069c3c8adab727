#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testing_support {

inline std::string fixture_path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string abalone_text() { return read_file(fixture_path("abalone.tri")); }
inline std::string knot_text() { return read_file(fixture_path("abalone_knot.diag")); }

} // namespace testing_support
