// SPDX-License-Identifier: Apache-2.0
//
// Minimal insertion/deletion edit scripts.
//
// Cost model: insert = delete = 1, match = 0, no substitution.  Among all
// minimal scripts both variants return the same one: scanning left to right,
// the script prefers NoOp, then Delete, then Insert whenever the preference
// still allows a minimal completion.  (A match can always be taken: when
// x[i] == y[j] the suffix distances at (i, j) and (i+1, j+1) coincide.)
//
// edit_distance_full fills the quadratic table of suffix distances and walks
// it forwards.  edit_distance_banded obtains the same suffix distances from
// furthest-reaching diagonals (Ukkonen's O((n+m)k) scheme, run on the
// reversed strings), grows its band by doubling, and replays the rows in
// reverse order from sparse checkpoints so memory stays O(k sqrt k) even for
// million-symbol inputs.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "indel/core.hpp"
#include "indel/error.hpp"

namespace indel {

struct DpResult {
  std::size_t distance = 0;
  std::size_t k_ins = 0;
  std::size_t k_del = 0;
  EditPattern script;
  std::size_t band_used = 0;  // banded variant only
};

namespace detail {

inline void check_same_alphabet(const Sequence& x, const Sequence& y) {
  if (x.alphabet != y.alphabet) {
    fail(ErrorCode::kAlphabetMismatch, "alphabet sizes differ (" + std::to_string(x.alphabet) +
                                           " vs " + std::to_string(y.alphabet) + ")");
  }
}

inline DpResult finish(EditPattern script, std::size_t band) {
  DpResult r;
  r.k_ins = script.k_ins;
  r.k_del = script.k_del;
  r.distance = r.k_ins + r.k_del;
  r.script = std::move(script);
  r.band_used = band;
  return r;
}

}  // namespace detail

// Largest (|x|+1)(|y|+1) table the quadratic oracle will allocate.
inline constexpr std::uint64_t kFullDpMaxCells = std::uint64_t{1} << 28;

inline DpResult edit_distance_full(const Sequence& x, const Sequence& y) {
  detail::check_same_alphabet(x, y);
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  const std::uint64_t cells = static_cast<std::uint64_t>(n + 1) * (m + 1);
  if (cells > kFullDpMaxCells) {
    fail(ErrorCode::kInstanceTooLarge,
         "quadratic DP would need " + std::to_string(cells) + " cells; use the banded variant");
  }
  // s[i][j] = distance between x[i..] and y[j..].
  const std::size_t w = m + 1;
  std::vector<std::uint32_t> s(cells);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return s[i * w + j]; };
  for (std::size_t j = 0; j <= m; ++j) at(n, j) = static_cast<std::uint32_t>(m - j);
  for (std::size_t i = n; i-- > 0;) {
    at(i, m) = static_cast<std::uint32_t>(n - i);
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = x[i] == y[j] ? at(i + 1, j + 1) : 1 + std::min(at(i + 1, j), at(i, j + 1));
    }
  }

  EditPattern e;
  e.ops.reserve(std::max(n, m) + at(0, 0));
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && x[i] == y[j]) {
      e.push(EditOp::noop());
      ++i, ++j;
    } else if (i < n && at(i + 1, j) + 1 == at(i, j)) {
      e.push(EditOp::del());
      ++i;
    } else {
      e.push(EditOp::ins(y[j]));
      ++j;
    }
  }
  return detail::finish(std::move(e), 0);
}

namespace detail {

// Furthest-reaching frontier on the reversed strings.  Reversed coordinates
// (p, q) = (n - i, m - j) measure how much of each suffix has been consumed;
// diagonal k = p - q.  Row d holds, for k = -d, -d+2, ..., d, the largest p on
// diagonal k whose reversed prefix distance (= forward suffix distance) is at
// most d, or -1 when no such point exists.
class ReverseFrontier {
 public:
  using Row = std::vector<std::int32_t>;

  // Reversed copies keep the snake scans sequential in memory.
  ReverseFrontier(const Sequence& x, const Sequence& y)
      : xr_(x.symbols.rbegin(), x.symbols.rend()), yr_(y.symbols.rbegin(), y.symbols.rend()),
        n_(static_cast<std::int64_t>(x.size())), m_(static_cast<std::int64_t>(y.size())) {
    if (n_ >= std::numeric_limits<std::int32_t>::max() / 2 || m_ >= std::numeric_limits<std::int32_t>::max() / 2) {
      fail(ErrorCode::kInstanceTooLarge, "sequences longer than 2^30 symbols");
    }
  }

  Row first_row() const { return {static_cast<std::int32_t>(snake(0, 0))}; }

  // Row d from row d-1, written into `row` (resized to d+1 entries).
  void next_row(const Row& prev, std::int64_t d, Row& row) const {
    row.assign(static_cast<std::size_t>(d + 1), -1);
    const std::int64_t lo = std::max<std::int64_t>(-d, -m_);
    const std::int64_t hi = std::min<std::int64_t>(d, n_);
    const std::int32_t* pv = prev.data();
    std::int32_t* out = row.data();
    for (std::int64_t k = lo + ((lo + d) & 1); k <= hi; k += 2) {
      std::int64_t best = -1;
      // Deletion step: from diagonal k-1, consume one more symbol of x.
      if (k - 1 >= -(d - 1)) {
        const std::int64_t p = pv[(k - 1 + d - 1) / 2];
        if (p >= 0 && p + 1 <= n_) best = p + 1;
      }
      // Insertion step: from diagonal k+1, consume one more symbol of y.
      if (k + 1 <= d - 1) {
        const std::int64_t p = pv[(k + 1 + d - 1) / 2];
        if (p >= 0 && p - k <= m_ && p > best) best = p;
      }
      if (best >= 0) out[(k + d) / 2] = static_cast<std::int32_t>(snake(best, k));
    }
  }

  Row next_row(const Row& prev, std::int64_t d) const {
    Row row;
    next_row(prev, d, row);
    return row;
  }

  static std::int64_t get(const Row& row, std::int64_t d, std::int64_t k) {
    if (k < -d || k > d || ((k + d) & 1)) return -1;
    return row[static_cast<std::size_t>((k + d) / 2)];
  }

  bool reaches_end(const Row& row, std::int64_t d) const { return get(row, d, n_ - m_) >= n_; }

 private:
  std::int64_t snake(std::int64_t p, std::int64_t k) const {
    std::int64_t q = p - k;
    const Symbol* xs = xr_.data();
    const Symbol* ys = yr_.data();
    while (p < n_ && q < m_ && xs[p] == ys[q]) ++p, ++q;
    return p;
  }

  std::vector<Symbol> xr_;
  std::vector<Symbol> yr_;
  std::int64_t n_, m_;
};

}  // namespace detail

inline DpResult edit_distance_banded(const Sequence& x, const Sequence& y) {
  detail::check_same_alphabet(x, y);
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  const std::int64_t m = static_cast<std::int64_t>(y.size());
  detail::ReverseFrontier f(x, y);

  // Forward sweep over the rows, growing the band by doubling until the
  // frontier closes; keep rows at checkpoint spacing B only.
  std::int64_t band = std::max<std::int64_t>(1, n > m ? n - m : m - n);
  using Row = detail::ReverseFrontier::Row;
  std::vector<Row> checkpoints;
  std::int64_t spacing = 64;
  Row row = f.first_row(), scratch;
  std::int64_t d = 0;
  checkpoints.push_back(row);
  while (!f.reaches_end(row, d)) {
    ++d;
    if (d > band) band *= 2;
    f.next_row(row, d, scratch);
    row.swap(scratch);
    // Re-space checkpoints as the distance grows so that both the number of
    // checkpoints and the block length stay near sqrt(d).
    if (d % spacing == 0) {
      checkpoints.push_back(row);
      if (static_cast<std::int64_t>(checkpoints.size()) > 2 * spacing) {
        std::vector<Row> thinned;
        for (std::size_t c = 0; c < checkpoints.size(); c += 2) thinned.push_back(std::move(checkpoints[c]));
        checkpoints = std::move(thinned);
        spacing *= 2;
      }
    }
  }
  const std::int64_t total = d;

  // Backward replay: the forward walk needs rows total-1, total-2, ..., 0 in
  // that order.  Rebuild one block of rows at a time from its checkpoint.
  EditPattern e;
  e.ops.reserve(static_cast<std::size_t>(std::max(n, m) + total));
  std::int64_t i = 0, j = 0, s = total;
  std::vector<Row> block;
  std::int64_t block_lo = -1;  // row index of block[0]

  auto row_at = [&](std::int64_t r) -> const Row& {
    if (block_lo < 0 || r < block_lo || r >= block_lo + static_cast<std::int64_t>(block.size())) {
      const std::int64_t c = r / spacing;
      block_lo = c * spacing;
      block.clear();
      block.push_back(checkpoints[static_cast<std::size_t>(c)]);
      for (std::int64_t t = block_lo + 1; t <= r; ++t) block.push_back(f.next_row(block.back(), t));
    }
    return block[static_cast<std::size_t>(r - block_lo)];
  };

  while (i < n || j < m) {
    if (i < n && j < m && x[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(j)]) {
      e.push(EditOp::noop());
      ++i, ++j;
      continue;
    }
    // Delete iff the suffix distance at (i+1, j) is s-1.
    bool del = false;
    if (i < n) {
      const std::int64_t p = n - i - 1, q = m - j;
      del = detail::ReverseFrontier::get(row_at(s - 1), s - 1, p - q) >= p;
    }
    if (del) {
      e.push(EditOp::del());
      ++i;
    } else {
      e.push(EditOp::ins(y[static_cast<std::size_t>(j)]));
      ++j;
    }
    --s;
  }
  return detail::finish(std::move(e), static_cast<std::size_t>(band));
}

}  // namespace indel
