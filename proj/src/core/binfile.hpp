// Copyright 2026 The asobo authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Little-endian binary container primitives shared by the bank / checkpoint /
// tensor file formats.

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace asobo {

class BinWriter {
 public:
  explicit BinWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw InvalidInput("cannot open for writing: " + path);
  }
  void raw(const void* p, size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u8(uint8_t v) { raw(&v, 1); }
  void u32(uint32_t v) { raw(&v, 4); }
  void u64(uint64_t v) { raw(&v, 8); }
  void i64(int64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void f64s(const double* p, size_t n) { raw(p, n * 8); }
  ~BinWriter() { out_.close(); }

 private:
  std::ofstream out_;
};

class BinReader {
 public:
  explicit BinReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw InvalidInput("cannot open: " + path);
  }
  void raw(void* p, size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in_.gcount()) != n) throw InvalidInput("truncated file: " + path_);
  }
  uint8_t u8() { uint8_t v; raw(&v, 1); return v; }
  uint32_t u32() { uint32_t v; raw(&v, 4); return v; }
  uint64_t u64() { uint64_t v; raw(&v, 8); return v; }
  int64_t i64() { int64_t v; raw(&v, 8); return v; }
  double f64() { double v; raw(&v, 8); return v; }
  std::string str() {
    const uint32_t n = u32();
    if (n > (1u << 30)) throw InvalidInput("corrupt string length in " + path_);
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
  void f64s(double* p, size_t n) { raw(p, n * 8); }

 private:
  std::ifstream in_;
  std::string path_;
};

uint64_t file_hash(const std::string& path);

}  // namespace asobo
