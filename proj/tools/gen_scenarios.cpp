// Writes the bundled scenarios as JSON files into a directory.

#include <fstream>
#include <iostream>

#include "chainsem/bundled.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "scenarios";
  for (const auto& name : chainsem::bundled_names()) {
    const std::string path = dir + "/" + name + ".json";
    std::ofstream out(path);
    if (!out) {
      std::cerr << "cannot write " << path << "\n";
      return 1;
    }
    out << chainsem::bundled_scenario(name).dump(2) << "\n";
    std::cout << path << "\n";
  }
  return 0;
}
