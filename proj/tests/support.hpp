#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "flowmon/elaborate.hpp"
#include "flowmon/parser.hpp"

namespace flowmon::test {

inline std::string source_path(const std::string& rel) { return std::string(FLOWMON_SOURCE_DIR) + "/" + rel; }

inline std::string slurp_abs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string slurp(const std::string& rel) { return slurp_abs(source_path(rel)); }

inline TypedProgram program(std::string_view src) { return elaborate(parse(src)); }

inline TypedProgram corpus(const std::string& name) { return program(slurp("corpus/" + name + ".mc")); }

inline BlockId block(const TypedProgram& p, std::string_view name) { return p.find_var(name)->block; }

} // namespace flowmon::test
