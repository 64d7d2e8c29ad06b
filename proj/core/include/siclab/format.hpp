#pragma once

#include <string>

namespace siclab {

// "%.17g": round-trips every double exactly.
std::string format_double(double value);

std::string hex64(unsigned long long value);

// FNV-1a, used for spec hashes in experiment metadata.
unsigned long long fnv1a64(const std::string& bytes) noexcept;

}  // namespace siclab
