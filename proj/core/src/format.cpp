#include "siclab/format.hpp"

#include <cstdio>

namespace siclab {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string hex64(unsigned long long value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", value);
  return buf;
}

unsigned long long fnv1a64(const std::string& bytes) noexcept {
  unsigned long long h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace siclab
