#pragma once

#include "recoflow/distribution.hpp"
#include "recoflow/dynamics.hpp"
#include "recoflow/errors.hpp"
#include "recoflow/gradient.hpp"
#include "recoflow/matrix.hpp"
#include "recoflow/partition.hpp"
#include "recoflow/partition_process.hpp"
#include "recoflow/rates.hpp"
#include "recoflow/reaction_network.hpp"
#include "recoflow/rng.hpp"
#include "recoflow/type_space.hpp"

namespace recoflow {

inline constexpr const char* kVersion = "0.1.0";

} // namespace recoflow
