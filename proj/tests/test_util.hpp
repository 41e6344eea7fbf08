#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef RLP_MODELS_DIR
#define RLP_MODELS_DIR "models"
#endif

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string model_path(const std::string& name) {
  return std::string(RLP_MODELS_DIR) + "/" + name;
}

inline std::string read_model(const std::string& name) {
  return read_file(model_path(name));
}
