#include "qmh/membership.hpp"

#include <cstdio>

int main() {
  std::puts("qmh placeholder");
  return 0;
}
