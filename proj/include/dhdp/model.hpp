#pragma once

#include <string>

namespace dhdp {

enum class ModelKind { kDynamicHdp, kPlainHdp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& text);

struct Hyperparameters {
  double alpha = 1.0;   // table concentration
  double gamma = 1.0;   // topic concentration
  double eta = 0.5;     // symmetric Dirichlet over words
  double delta = 0.0;   // weight on whole-history table counts, dynamic only
  ModelKind model_kind = ModelKind::kDynamicHdp;

  void validate() const;  // alpha, gamma, eta > 0; delta >= 0
};

}  // namespace dhdp
