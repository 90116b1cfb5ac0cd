#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>

#include "rcaus/types.hpp"

namespace rcaus {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot hash " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const auto n = static_cast<std::size_t>(in.gcount());
    h = fnv1a64({reinterpret_cast<const unsigned char*>(buf), n}, h);
  }
  return h;
}

}  // namespace rcaus
