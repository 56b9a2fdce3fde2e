#pragma once

#include <string_view>

#include "plkg/channel.hpp"

namespace plkg {

enum class BaselineKind { random, oracle_svd };

BaselineKind parse_baseline_kind(std::string_view name);
const char* to_string(BaselineKind kind);

// Two independent isotropic unit-norm beams.
BeamPair random_action(std::size_t n, RngStream& rng);

// Dominant singular pair of H_ab. Maximizes |w_b^H H w_a| only; it ignores
// the eavesdropper, so it bounds the data-rate term, not the mixed reward.
BeamPair oracle_action(const CMat& h_ab);

}  // namespace plkg
