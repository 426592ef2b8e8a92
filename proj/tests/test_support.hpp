#pragma once

#include <string>

#include "smp/model.hpp"

inline std::string model_path(const std::string& name) {
  return std::string(SMP_MODELS_DIR) + "/" + name;
}

inline smp::SemiMarkovModel load_example(const std::string& name) {
  return smp::load_model(model_path(name));
}
