#pragma once

#include <iosfwd>
#include <span>

#include "fightgen/arena.hpp"

namespace fightgen {

/// SVG of both fighters' floor trajectories with one `<circle class="hit">`
/// per Hit event, above a timeline strip of actions per fighter.
void write_svg(std::ostream& out, std::span<const FightEvent> trace);

}  // namespace fightgen
