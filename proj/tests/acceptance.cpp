// One line per criterion; nonzero exit if any fails.
#include <cstdio>
#include <iostream>

#include "paramodular/acceptance.hpp"

int main(int argc, char** argv) {
  paramodular::AcceptanceConfig cfg;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--quick") cfg.quick = true;
    else cfg.only.push_back(std::stoi(a));
  }
  bool all = true;
  for (const auto& r : paramodular::run_acceptance(cfg)) {
    std::printf("%s %2d %-34s %8.2f s\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
    if (!r.passed) {
      all = false;
      std::cout << "     " << r.detail.dump() << "\n";
    }
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
