#pragma once

#include <random>
#include <string>

#include "chainsem/bundled.hpp"
#include "chainsem/scenario.hpp"
#include "chainsem/types.hpp"

namespace chainsem::testing {

/// Random type of bounded depth over the whole grammar. `No` only appears
/// as an Oph parameter.
inline Ty random_ty(std::mt19937_64& rng, int depth) {
  const int leaves = 10;
  const int shapes = depth > 0 ? 18 : leaves;
  switch (rng() % shapes) {
    case 0: return Ty::puh();
    case 1: return Ty::puk();
    case 2: return Ty::addr();
    case 3: return Ty::status();
    case 4: return Ty::exception();
    case 5: return Ty::tz();
    case 6: return Ty::integer();
    case 7: return Ty::unit();
    case 8: return Ty::boolean();
    case 9: return Ty::string();
    case 10: return Ty::contract(random_ty(rng, depth - 1), random_ty(rng, depth - 1));
    case 11: return Ty::code(random_ty(rng, depth - 1), random_ty(rng, depth - 1));
    case 12:
      return rng() % 3 == 0 ? Ty::oph_transfer()
                            : Ty::oph(random_ty(rng, depth - 1), random_ty(rng, depth - 1));
    case 13: return Ty::arrow(random_ty(rng, depth - 1), random_ty(rng, depth - 1));
    case 14: return Ty::pair(random_ty(rng, depth - 1), random_ty(rng, depth - 1));
    case 15: return Ty::sum(random_ty(rng, depth - 1), random_ty(rng, depth - 1));
    case 16: return Ty::list(random_ty(rng, depth - 1));
    default: return Ty::option(random_ty(rng, depth - 1));
  }
}

/// Random storable type: unit, bool, int, string, tz, addr and their pairs,
/// sums, lists and options.
inline Ty random_storable(std::mt19937_64& rng, int depth) {
  const int shapes = depth > 0 ? 10 : 6;
  switch (rng() % shapes) {
    case 0: return Ty::unit();
    case 1: return Ty::boolean();
    case 2: return Ty::integer();
    case 3: return Ty::string();
    case 4: return Ty::tz();
    case 5: return Ty::addr();
    case 6: return Ty::pair(random_storable(rng, depth - 1), random_storable(rng, depth - 1));
    case 7: return Ty::sum(random_storable(rng, depth - 1), random_storable(rng, depth - 1));
    case 8: return Ty::list(random_storable(rng, depth - 1));
    default: return Ty::option(random_storable(rng, depth - 1));
  }
}

inline Scenario bundled(const std::string& name) { return load_scenario(bundled_scenario(name)); }

}  // namespace chainsem::testing
