#pragma once

#include "prosumage/lp.hpp"

#include <memory>

namespace prosumage {

enum class HighsMethod { DualSimplex, InteriorPoint, InteriorPointCrossover };

std::unique_ptr<LpBackend> make_highs_backend(HighsMethod method);

}  // namespace prosumage
