#include <iostream>

#include "crossenv/acceptance.hpp"

// One line per acceptance criterion; nonzero exit when any fails.
int main() {
  int failed = 0;
  for (int id = 1; id <= crossenv::acceptance::kCriteria; ++id) {
    const auto r = crossenv::acceptance::run(id);
    std::cout << r.line() << std::endl;
    failed += r.pass ? 0 : 1;
  }
  std::cout << (crossenv::acceptance::kCriteria - failed) << "/" << crossenv::acceptance::kCriteria
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
