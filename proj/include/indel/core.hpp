// SPDX-License-Identifier: Apache-2.0
//
// Core vocabulary: alphabets, sequences, runs, edit patterns and arbitrary
// cursor edits, together with edit application and the conversion of an
// arbitrary insertion/deletion history into "all deletions on the original,
// then insertions left to right" form.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "indel/error.hpp"

namespace indel {

using Symbol = std::uint16_t;

inline constexpr std::uint32_t kMinAlphabet = 2;
inline constexpr std::uint32_t kMaxAlphabet = 65536;
inline constexpr std::uint32_t kByteAlphabet = 256;

inline void check_alphabet(std::uint32_t a) {
  if (a < kMinAlphabet || a > kMaxAlphabet) {
    fail(ErrorCode::kDomainError, "alphabet size " + std::to_string(a) + " outside [2, 65536]");
  }
}

// A symbol string over {0, ..., alphabet-1}.
struct Sequence {
  std::uint32_t alphabet = kByteAlphabet;
  std::vector<Symbol> symbols;

  Sequence() = default;
  Sequence(std::uint32_t a, std::vector<Symbol> s) : alphabet(a), symbols(std::move(s)) {}

  std::size_t size() const noexcept { return symbols.size(); }
  bool empty() const noexcept { return symbols.empty(); }
  Symbol operator[](std::size_t i) const noexcept { return symbols[i]; }

  friend bool operator==(const Sequence&, const Sequence&) = default;
};

// Checks every symbol against the alphabet; throws SymbolOutOfRange.
inline void validate(const Sequence& s) {
  check_alphabet(s.alphabet);
  for (std::size_t i = 0; i < s.symbols.size(); ++i) {
    if (s.symbols[i] >= s.alphabet) {
      fail(ErrorCode::kSymbolOutOfRange, "symbol " + std::to_string(s.symbols[i]) + " at index " +
                                             std::to_string(i) + " not below alphabet size " +
                                             std::to_string(s.alphabet));
    }
  }
}

// Builds a sequence from a digit string such as "0010"; handy for tests and
// small experiments (digits only, so alphabets up to 10).
inline Sequence from_digits(const std::string& digits, std::uint32_t a) {
  Sequence s;
  s.alphabet = a;
  s.symbols.reserve(digits.size());
  for (char c : digits) {
    if (c < '0' || c > '9') fail(ErrorCode::kDomainError, "non-digit in sequence literal");
    s.symbols.push_back(static_cast<Symbol>(c - '0'));
  }
  validate(s);
  return s;
}

inline std::string to_digits(const Sequence& s) {
  std::string out;
  out.reserve(s.size());
  for (Symbol c : s.symbols) out.push_back(c < 10 ? static_cast<char>('0' + c) : '?');
  return out;
}

// ---------------------------------------------------------------------------
// Runs

struct Run {
  Symbol symbol = 0;
  std::size_t length = 0;
  friend bool operator==(const Run&, const Run&) = default;
};

struct RunDecomposition {
  std::vector<Run> runs;
  friend bool operator==(const RunDecomposition&, const RunDecomposition&) = default;
};

inline RunDecomposition run_decompose(const Sequence& seq) {
  RunDecomposition d;
  for (Symbol c : seq.symbols) {
    if (!d.runs.empty() && d.runs.back().symbol == c) {
      ++d.runs.back().length;
    } else {
      d.runs.push_back({c, 1});
    }
  }
  return d;
}

inline Sequence concatenate(const RunDecomposition& d, std::uint32_t a) {
  Sequence s;
  s.alphabet = a;
  for (const Run& r : d.runs) s.symbols.insert(s.symbols.end(), r.length, r.symbol);
  return s;
}

// Run index of every position (run_of[i] = index of the run containing i).
inline std::vector<std::size_t> run_index(const Sequence& seq) {
  std::vector<std::size_t> idx(seq.size());
  std::size_t r = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0 && seq[i] != seq[i - 1]) ++r;
    idx[i] = r;
  }
  return idx;
}

// ---------------------------------------------------------------------------
// Edit patterns

enum class OpKind : std::uint8_t { kNoOp = 0, kDelete = 1, kInsert = 2 };

struct EditOp {
  OpKind kind = OpKind::kNoOp;
  Symbol content = 0;  // meaningful only for kInsert

  static constexpr EditOp noop() { return {OpKind::kNoOp, 0}; }
  static constexpr EditOp del() { return {OpKind::kDelete, 0}; }
  static constexpr EditOp ins(Symbol c) { return {OpKind::kInsert, c}; }

  friend bool operator==(const EditOp& l, const EditOp& r) {
    return l.kind == r.kind && (l.kind != OpKind::kInsert || l.content == r.content);
  }
};

// Ordered op stream; #Delete + #NoOp equals the length of the source sequence.
struct EditPattern {
  std::vector<EditOp> ops;
  std::size_t k_ins = 0;
  std::size_t k_del = 0;

  EditPattern() = default;
  explicit EditPattern(std::vector<EditOp> o) : ops(std::move(o)) { recount(); }

  void recount() {
    k_ins = k_del = 0;
    for (const EditOp& op : ops) {
      if (op.kind == OpKind::kInsert) ++k_ins;
      if (op.kind == OpKind::kDelete) ++k_del;
    }
  }

  // Number of source symbols the pattern consumes.
  std::size_t source_length() const noexcept { return ops.size() - k_ins; }

  void push(EditOp op) {
    ops.push_back(op);
    if (op.kind == OpKind::kInsert) ++k_ins;
    if (op.kind == OpKind::kDelete) ++k_del;
  }

  friend bool operator==(const EditPattern& l, const EditPattern& r) { return l.ops == r.ops; }
};

inline EditPattern identity_pattern(std::size_t n) {
  return EditPattern(std::vector<EditOp>(n, EditOp::noop()));
}

inline Sequence apply_edit_pattern(const Sequence& x, const EditPattern& e) {
  if (e.source_length() != x.size()) {
    fail(ErrorCode::kPatternLengthMismatch,
         "pattern consumes " + std::to_string(e.source_length()) + " symbols but source has " +
             std::to_string(x.size()));
  }
  Sequence y;
  y.alphabet = x.alphabet;
  y.symbols.reserve(x.size() - e.k_del + e.k_ins);
  std::size_t i = 0;
  for (const EditOp& op : e.ops) {
    switch (op.kind) {
      case OpKind::kNoOp:
        y.symbols.push_back(x[i++]);
        break;
      case OpKind::kDelete:
        ++i;
        break;
      case OpKind::kInsert:
        if (op.content >= x.alphabet) {
          fail(ErrorCode::kSymbolOutOfRange, "inserted symbol outside alphabet");
        }
        y.symbols.push_back(op.content);
        break;
    }
  }
  return y;
}

// ---------------------------------------------------------------------------
// Arbitrary cursor edits.  A cursor P in 0..len sits between symbols P-1 and
// P.  Insert places the new symbol at the cursor (it becomes index P); Delete
// removes the symbol in front of the cursor (index P-1), so P = 0 admits only
// insertions.

enum class ArbitraryOp : std::uint8_t { kInsert, kDelete };

struct ArbitraryEdit {
  std::size_t cursor = 0;
  ArbitraryOp op = ArbitraryOp::kInsert;
  Symbol content = 0;

  static ArbitraryEdit ins(std::size_t p, Symbol c) { return {p, ArbitraryOp::kInsert, c}; }
  static ArbitraryEdit del(std::size_t p) { return {p, ArbitraryOp::kDelete, 0}; }

  friend bool operator==(const ArbitraryEdit& l, const ArbitraryEdit& r) {
    return l.cursor == r.cursor && l.op == r.op &&
           (l.op != ArbitraryOp::kInsert || l.content == r.content);
  }
};

inline void check_edit(const ArbitraryEdit& e, std::size_t len, std::uint32_t a) {
  if (e.op == ArbitraryOp::kInsert) {
    if (e.cursor > len) {
      fail(ErrorCode::kCursorOutOfRange, "insert cursor " + std::to_string(e.cursor) +
                                             " beyond length " + std::to_string(len));
    }
    if (e.content >= a) fail(ErrorCode::kSymbolOutOfRange, "inserted symbol outside alphabet");
  } else if (e.cursor == 0 || e.cursor > len) {
    fail(ErrorCode::kCursorOutOfRange, "delete cursor " + std::to_string(e.cursor) +
                                           " invalid for length " + std::to_string(len));
  }
}

// Direct replay of the edits in their given order.
inline Sequence replay_arbitrary(const Sequence& x, const std::vector<ArbitraryEdit>& edits) {
  Sequence y = x;
  for (const ArbitraryEdit& e : edits) {
    check_edit(e, y.size(), x.alphabet);
    if (e.op == ArbitraryOp::kInsert) {
      y.symbols.insert(y.symbols.begin() + static_cast<std::ptrdiff_t>(e.cursor), e.content);
    } else {
      y.symbols.erase(y.symbols.begin() + static_cast<std::ptrdiff_t>(e.cursor - 1));
    }
  }
  return y;
}

struct CanonicalInsertion {
  std::size_t position = 0;  // index of the inserted symbol in the final sequence
  Symbol content = 0;
  friend bool operator==(const CanonicalInsertion&, const CanonicalInsertion&) = default;
};

// Deletions are indices into the original sequence (strictly increasing).
// Insertions are applied left to right to the shortened sequence; each
// position is the final index of the inserted symbol (strictly increasing).
struct CanonicalEdits {
  std::vector<std::size_t> deletions;
  std::vector<CanonicalInsertion> insertions;
  friend bool operator==(const CanonicalEdits&, const CanonicalEdits&) = default;
};

inline CanonicalEdits canonicalize_arbitrary(const Sequence& x,
                                             const std::vector<ArbitraryEdit>& edits) {
  // Each live item remembers where it came from: an original index, or an
  // inserted content.  Inserted items that are later deleted simply vanish.
  struct Item {
    bool inserted;
    std::size_t origin;
    Symbol content;
  };
  std::vector<Item> items;
  items.reserve(x.size() + edits.size());
  for (std::size_t i = 0; i < x.size(); ++i) items.push_back({false, i, x[i]});
  std::vector<bool> deleted(x.size(), false);

  for (const ArbitraryEdit& e : edits) {
    check_edit(e, items.size(), x.alphabet);
    if (e.op == ArbitraryOp::kInsert) {
      items.insert(items.begin() + static_cast<std::ptrdiff_t>(e.cursor), {true, 0, e.content});
    } else {
      const Item& victim = items[e.cursor - 1];
      if (!victim.inserted) deleted[victim.origin] = true;
      items.erase(items.begin() + static_cast<std::ptrdiff_t>(e.cursor - 1));
    }
  }

  CanonicalEdits c;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (deleted[i]) c.deletions.push_back(i);
  }
  for (std::size_t t = 0; t < items.size(); ++t) {
    if (items[t].inserted) c.insertions.push_back({t, items[t].content});
  }
  return c;
}

inline Sequence apply_canonical(const Sequence& x, const CanonicalEdits& c) {
  Sequence y;
  y.alphabet = x.alphabet;
  std::size_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (d < c.deletions.size() && c.deletions[d] == i) {
      ++d;
      continue;
    }
    y.symbols.push_back(x[i]);
  }
  for (const CanonicalInsertion& ins : c.insertions) {
    if (ins.position > y.size()) fail(ErrorCode::kCursorOutOfRange, "insertion beyond end");
    y.symbols.insert(y.symbols.begin() + static_cast<std::ptrdiff_t>(ins.position), ins.content);
  }
  return y;
}

// Arbitrary-edit list realizing a canonical form: deletions left to right,
// then insertions left to right.
inline std::vector<ArbitraryEdit> to_arbitrary_edits(const CanonicalEdits& c) {
  std::vector<ArbitraryEdit> out;
  out.reserve(c.deletions.size() + c.insertions.size());
  for (std::size_t k = 0; k < c.deletions.size(); ++k) {
    out.push_back(ArbitraryEdit::del(c.deletions[k] - k + 1));
  }
  for (const CanonicalInsertion& ins : c.insertions) {
    out.push_back(ArbitraryEdit::ins(ins.position, ins.content));
  }
  return out;
}

// The same net edit expressed as a left-to-right edit pattern.  Insertions
// are placed before the first surviving symbol that follows them in the
// final sequence, so the pattern replays to the same output.
inline EditPattern to_edit_pattern(const Sequence& x, const CanonicalEdits& c) {
  EditPattern e;
  std::size_t d = 0;          // next deletion
  std::size_t k = 0;          // next insertion
  std::size_t out = 0;        // current output index
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (d < c.deletions.size() && c.deletions[d] == i) {
      e.push(EditOp::del());
      ++d;
      continue;
    }
    while (k < c.insertions.size() && c.insertions[k].position == out) {
      e.push(EditOp::ins(c.insertions[k].content));
      ++k;
      ++out;
    }
    e.push(EditOp::noop());
    ++out;
  }
  while (k < c.insertions.size()) {
    e.push(EditOp::ins(c.insertions[k].content));
    ++k;
  }
  return e;
}

}  // namespace indel
