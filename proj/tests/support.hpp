#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "dfbound/ir.hpp"

namespace test_support {

inline std::string data_path(const std::string& file) {
  return std::string(DFBOUND_DATA_DIR) + "/" + file;
}

inline dfbound::program load(const std::string& file) {
  std::ifstream in(data_path(file));
  std::ostringstream ss;
  ss << in.rdbuf();
  return dfbound::parse_program(ss.str());
}

inline dfbound::program fig3() { return load("fig3.ir"); }
inline dfbound::program fig3_swap() { return load("fig3_swap.ir"); }

}  // namespace test_support
