#pragma once

#include <string>

#include "dhdp/crf_state.hpp"

namespace dhdp {

// Versioned structured-text snapshot, shared between training and the
// online stage. See write_snapshot for the layout.
ModelSnapshot read_snapshot(const std::string& path);
void write_snapshot(const ModelSnapshot& snapshot, const std::string& path);

}  // namespace dhdp
