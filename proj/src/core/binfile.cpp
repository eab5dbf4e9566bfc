// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/binfile.hpp"

namespace asobo {

uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open: " + path);
  uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(buf, static_cast<size_t>(in.gcount()), h);
  }
  return h;
}

}  // namespace asobo
