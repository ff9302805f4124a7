#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace chainsem {

/// Names of the scenarios shipped in scenarios/*.json.
std::vector<std::string> bundled_names();

/// Authoring-shape JSON of a shipped scenario. Throws std::out_of_range
/// for an unknown name.
nlohmann::json bundled_scenario(const std::string& name);

/// Auction parameters shared by the generator and the end-to-end checks.
struct BidderSpec {
  std::string name;
  long long limit;
  long long step;
  long long balance;
};

std::vector<BidderSpec> auction_bidders(const std::string& scenario);

}  // namespace chainsem
