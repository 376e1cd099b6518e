// SPDX-License-Identifier: Apache-2.0
//
// File <-> sequence conversion shared by the CLI and the sync server.  Files
// over alphabets of at most 256 symbols hold one byte per symbol; larger
// alphabets use two little-endian bytes per symbol.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "indel/core.hpp"
#include "indel/error.hpp"

namespace indel {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "cannot read " + path.string());
  return bytes;
}

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

inline Sequence bytes_to_sequence(const std::vector<std::uint8_t>& bytes, std::uint32_t a) {
  check_alphabet(a);
  Sequence s;
  s.alphabet = a;
  if (a <= 256) {
    s.symbols.assign(bytes.begin(), bytes.end());
  } else {
    if (bytes.size() % 2 != 0) fail(ErrorCode::kMalformed, "odd byte count for a 16-bit alphabet");
    s.symbols.resize(bytes.size() / 2);
    for (std::size_t i = 0; i < s.symbols.size(); ++i) {
      s.symbols[i] = static_cast<Symbol>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
    }
  }
  validate(s);
  return s;
}

inline std::vector<std::uint8_t> sequence_to_bytes(const Sequence& s) {
  std::vector<std::uint8_t> out;
  if (s.alphabet <= 256) {
    out.assign(s.symbols.begin(), s.symbols.end());
  } else {
    out.reserve(2 * s.size());
    for (Symbol c : s.symbols) {
      out.push_back(static_cast<std::uint8_t>(c & 0xFF));
      out.push_back(static_cast<std::uint8_t>(c >> 8));
    }
  }
  return out;
}

}  // namespace indel
