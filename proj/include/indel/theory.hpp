// SPDX-License-Identifier: Apache-2.0
//
// Executable analysis machinery: extended-run edit counts, typicalized edit
// patterns and their complements, alignment trees between a source and a
// typicalized output, exhaustive post-edit-set enumeration, and a Monte Carlo
// estimate of H(E | X, Y) (the residual uncertainty about the edit pattern).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "indel/bounds.hpp"
#include "indel/core.hpp"
#include "indel/error.hpp"
#include "indel/sim.hpp"

namespace indel {

// ---------------------------------------------------------------------------
// Run geometry and edit ownership.
//
// The extended run of a run adds one neighbouring symbol on each side.  An
// edit adds one to the count of every extended run containing it:
//   * deleting x[i] counts for its own run, for the previous run when x[i]
//     opens its run, and for the next run when x[i] closes its run;
//   * inserting at gap g (in front of x[g]; gap n is the end) counts for the
//     run of x[g-1] and the run of x[g], so an insertion between two runs is
//     counted once in each and an interior insertion once.
// Ownership decides elimination: a deletion belongs to its own run only; an
// insertion belongs to every run that counts it.

namespace detail {

struct RunGeometry {
  std::vector<std::size_t> run_of;  // per position
  std::vector<std::size_t> start;   // per run
  std::vector<std::size_t> end;     // per run, inclusive
  std::size_t runs() const { return start.size(); }

  explicit RunGeometry(const Sequence& x) : run_of(run_index(x)) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i == 0 || x[i] != x[i - 1]) {
        start.push_back(i);
        end.push_back(i);
      } else {
        end.back() = i;
      }
    }
  }

  // Runs whose extended run contains the deletion of x[i]; own run first.
  std::vector<std::size_t> deletion_runs(std::size_t i) const {
    const std::size_t r = run_of[i];
    std::vector<std::size_t> out{r};
    if (i == start[r] && r > 0) out.push_back(r - 1);
    if (i == end[r] && r + 1 < runs()) out.push_back(r + 1);
    return out;
  }

  // Runs counting (and owning) an insertion at gap g.
  std::vector<std::size_t> insertion_runs(std::size_t g) const {
    std::vector<std::size_t> out;
    const std::size_t n = run_of.size();
    if (g > 0) out.push_back(run_of[g - 1]);
    if (g < n && (out.empty() || out.back() != run_of[g])) out.push_back(run_of[g]);
    return out;
  }
};

inline void check_pattern_fits(const Sequence& x, const EditPattern& e) {
  if (e.source_length() != x.size()) {
    fail(ErrorCode::kPatternLengthMismatch, "pattern consumes " + std::to_string(e.source_length()) +
                                                " symbols but source has " + std::to_string(x.size()));
  }
}

}  // namespace detail

struct RunEditCounts {
  std::vector<std::size_t> run;       // edits owned by each run
  std::vector<std::size_t> extended;  // edits inside each extended run
};

inline RunEditCounts run_edit_counts(const Sequence& x, const EditPattern& e) {
  detail::check_pattern_fits(x, e);
  const detail::RunGeometry g(x);
  RunEditCounts c;
  c.run.assign(g.runs(), 0);
  c.extended.assign(g.runs(), 0);
  std::size_t i = 0;
  for (const EditOp& op : e.ops) {
    if (op.kind == OpKind::kInsert) {
      for (std::size_t r : g.insertion_runs(i)) {
        ++c.run[r];
        ++c.extended[r];
      }
      continue;
    }
    if (op.kind == OpKind::kDelete) {
      const auto runs = g.deletion_runs(i);
      ++c.run[runs[0]];
      for (std::size_t r : runs) ++c.extended[r];
    }
    ++i;
  }
  return c;
}

inline std::vector<std::size_t> extended_run_edit_counts(const Sequence& x, const EditPattern& e) {
  return run_edit_counts(x, e).extended;
}

// ---------------------------------------------------------------------------
// Typicalization

enum class ComplementKind : std::uint8_t { kBlank, kElimInsert, kElimDelete };

struct ComplementEntry {
  ComplementKind kind = ComplementKind::kBlank;
  Symbol content = 0;  // for kElimInsert
  friend bool operator==(const ComplementEntry& l, const ComplementEntry& r) {
    return l.kind == r.kind && (l.kind != ComplementKind::kElimInsert || l.content == r.content);
  }
};

struct TypicalizedPattern {
  EditPattern e_hat;
  // One entry per source symbol (Blank or ElimDelete) plus one ElimInsert per
  // eliminated insertion, in pattern order: n + K_I - K^_I entries.
  std::vector<ComplementEntry> complement;
};

// Elimination runs in two passes.  First, an edit is removed when any run
// owning it has more than one edit in its extended run (so a deletion that
// is merely the neighbour of a crowded run survives, while an insertion on a
// boundary falls if either side is crowded).  Second, a run can still see two
// surviving neighbour deletions (x = 012 with both ends deleted); those
// contributions are removed too, which makes every extended run of the result
// hold at most one edit.
inline TypicalizedPattern typicalize(const Sequence& x, const EditPattern& e) {
  detail::check_pattern_fits(x, e);
  const detail::RunGeometry g(x);
  const std::vector<std::size_t> counts = extended_run_edit_counts(x, e);

  // Pass 1.
  std::vector<bool> keep(e.ops.size(), true);
  std::vector<std::size_t> gap(e.ops.size(), 0);  // gap or source index of each op
  std::size_t i = 0;
  for (std::size_t t = 0; t < e.ops.size(); ++t) {
    const EditOp& op = e.ops[t];
    gap[t] = i;
    if (op.kind == OpKind::kInsert) {
      for (std::size_t r : g.insertion_runs(i)) {
        if (counts[r] > 1) keep[t] = false;
      }
      continue;
    }
    if (op.kind == OpKind::kDelete && counts[g.run_of[i]] > 1) keep[t] = false;
    ++i;
  }

  // Pass 2.
  std::vector<std::size_t> kept_counts(g.runs(), 0);
  auto runs_of_op = [&](std::size_t t) {
    return e.ops[t].kind == OpKind::kInsert ? g.insertion_runs(gap[t]) : g.deletion_runs(gap[t]);
  };
  for (std::size_t t = 0; t < e.ops.size(); ++t) {
    if (e.ops[t].kind == OpKind::kNoOp || !keep[t]) continue;
    for (std::size_t r : runs_of_op(t)) ++kept_counts[r];
  }
  for (std::size_t t = 0; t < e.ops.size(); ++t) {
    if (e.ops[t].kind == OpKind::kNoOp || !keep[t]) continue;
    for (std::size_t r : runs_of_op(t)) {
      if (kept_counts[r] > 1) keep[t] = false;
    }
  }

  TypicalizedPattern tp;
  tp.complement.reserve(x.size() + e.k_ins);
  for (std::size_t t = 0; t < e.ops.size(); ++t) {
    const EditOp& op = e.ops[t];
    switch (op.kind) {
      case OpKind::kNoOp:
        tp.e_hat.push(op);
        tp.complement.push_back({ComplementKind::kBlank, 0});
        break;
      case OpKind::kDelete:
        tp.e_hat.push(keep[t] ? op : EditOp::noop());
        tp.complement.push_back({keep[t] ? ComplementKind::kBlank : ComplementKind::kElimDelete, 0});
        break;
      case OpKind::kInsert:
        if (keep[t]) {
          tp.e_hat.push(op);
        } else {
          tp.complement.push_back({ComplementKind::kElimInsert, op.content});
        }
        break;
    }
  }
  return tp;
}

inline Sequence typicalized_posess(const Sequence& x, const TypicalizedPattern& tp) {
  return apply_edit_pattern(x, tp.e_hat);
}

// Merges E^ and its complement back into the original pattern.  Kept and
// eliminated insertions never share a gap (both sides of a gap share the
// same owning runs), so walking the complement and pulling kept insertions
// in front of each source entry restores the original order.
inline EditPattern recombine(const TypicalizedPattern& tp) {
  EditPattern out;
  const auto& ops = tp.e_hat.ops;
  std::size_t p = 0;
  auto misaligned = [](const std::string& why) { fail(ErrorCode::kComplementMisaligned, why); };
  for (const ComplementEntry& c : tp.complement) {
    if (c.kind == ComplementKind::kElimInsert) {
      out.push(EditOp::ins(c.content));
      continue;
    }
    while (p < ops.size() && ops[p].kind == OpKind::kInsert) out.push(ops[p++]);
    if (p == ops.size()) misaligned("complement has more source entries than the pattern");
    const EditOp& op = ops[p++];
    if (c.kind == ComplementKind::kElimDelete) {
      if (op.kind != OpKind::kNoOp) misaligned("eliminated deletion meets an edited symbol");
      out.push(EditOp::del());
    } else {
      out.push(op);
    }
  }
  while (p < ops.size()) {
    if (ops[p].kind != OpKind::kInsert) misaligned("pattern has more source entries than the complement");
    out.push(ops[p++]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Alignment trees

struct GlobalAlignment {
  std::vector<std::size_t> segment_lengths;
  friend bool operator==(const GlobalAlignment&, const GlobalAlignment&) = default;
  friend auto operator<=>(const GlobalAlignment&, const GlobalAlignment&) = default;
};

enum class GammaTag : std::uint8_t { kNone, kGamma1, kGamma2 };

struct AlignmentNode {
  std::size_t segment_length = 0;  // label of the edge from the parent
  std::size_t depth = 0;           // number of Y^-runs aligned so far
  std::size_t consumed = 0;        // source symbols covered so far
  GammaTag tag = GammaTag::kNone;  // ambiguity event for the next Y^-run
  std::vector<std::size_t> children;
};

struct AlignmentTree {
  std::vector<AlignmentNode> nodes;  // nodes[0] is the root
  std::size_t y_runs = 0;

  std::vector<GlobalAlignment> leaves() const {
    std::vector<GlobalAlignment> out;
    std::vector<std::size_t> path;
    collect(0, path, out);
    return out;
  }
  std::size_t leaf_count() const {
    std::size_t c = 0;
    for (const auto& n : nodes) c += n.children.empty() ? 1 : 0;
    return c;
  }
  std::size_t split_count() const {
    std::size_t c = 0;
    for (const auto& n : nodes) c += n.children.size() > 1 ? 1 : 0;
    return c;
  }
  std::size_t tagged_count(GammaTag t) const {
    std::size_t c = 0;
    for (const auto& n : nodes) c += n.tag == t ? 1 : 0;
    return c;
  }

 private:
  void collect(std::size_t v, std::vector<std::size_t>& path, std::vector<GlobalAlignment>& out) const {
    if (nodes[v].children.empty()) {
      out.push_back({path});
      return;
    }
    for (std::size_t c : nodes[v].children) {
      path.push_back(nodes[c].segment_length);
      collect(c, path, out);
      path.pop_back();
    }
  }
};

// Segment vector of a concrete pattern: surviving source symbols belong to
// the Y^-run they land in; a deleted symbol joins the survivors of its own
// run, and a fully deleted run joins the segment of the next surviving symbol
// to its right (the last run, having no right neighbour, joins its left).
// Y^-runs made only of inserted symbols get empty segments.
inline GlobalAlignment alignment_of(const Sequence& x, const EditPattern& e) {
  detail::check_pattern_fits(x, e);
  const Sequence y = apply_edit_pattern(x, e);
  const std::vector<std::size_t> y_run = run_index(y);
  const std::size_t rho = y.empty() ? 0 : y_run.back() + 1;
  GlobalAlignment a;
  a.segment_lengths.assign(rho, 0);
  if (rho == 0) return a;

  const detail::RunGeometry g(x);
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> seg(x.size(), kNone);
  std::size_t i = 0, out = 0;
  for (const EditOp& op : e.ops) {
    if (op.kind == OpKind::kInsert) {
      ++out;
    } else if (op.kind == OpKind::kNoOp) {
      seg[i++] = y_run[out++];
    } else {
      ++i;
    }
  }
  std::vector<std::size_t> run_seg(g.runs(), kNone);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (seg[k] != kNone && run_seg[g.run_of[k]] == kNone) run_seg[g.run_of[k]] = seg[k];
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (seg[k] != kNone) continue;
    const std::size_t r = g.run_of[k];
    if (run_seg[r] != kNone) {
      seg[k] = run_seg[r];
      continue;
    }
    std::size_t right = g.end[r] + 1;
    while (right < x.size() && seg[right] == kNone) ++right;
    if (right < x.size()) {
      seg[k] = seg[right];
    } else {
      std::size_t left = g.start[r];
      while (left > 0 && seg[left - 1] == kNone) --left;
      seg[k] = left > 0 ? seg[left - 1] : 0;
    }
  }
  for (std::size_t k = 0; k < x.size(); ++k) ++a.segment_lengths[seg[k]];
  return a;
}

inline bool is_typical(const Sequence& x, const EditPattern& e) {
  for (std::size_t c : extended_run_edit_counts(x, e)) {
    if (c > 1) return false;
  }
  return true;
}

namespace detail {

// Depth-first enumeration of every typical pattern turning x into y, pruned
// by a memo of dead states.  The only history that matters for the future is
// the extended-run counts of the runs around the cursor, so the memo key is
// (i, j, counts of runs r(i)-1, r(i), r(i)+1).
class TypicalPatternSearch {
 public:
  TypicalPatternSearch(const Sequence& x, const Sequence& y, std::size_t limit)
      : x_(x), y_(y), g_(x), counts_(g_.runs(), 0), limit_(limit),
        memo_((x.size() + 1) * (y.size() + 1) * 8, kUnknown) {}

  template <typename Visit>
  void run(Visit&& visit) {
    if (!feasible(0, 0)) return;
    enumerate(0, 0, visit);
  }

 protected:
  static constexpr std::int8_t kUnknown = -1;

  std::size_t run_at(std::size_t i) const { return i < x_.size() ? g_.run_of[i] : g_.runs(); }

  std::size_t key(std::size_t i, std::size_t j) const {
    const std::size_t r = run_at(i);
    std::size_t bits = 0;
    for (int d = -1; d <= 1; ++d) {
      const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r) + d;
      bits <<= 1;
      if (rr >= 0 && rr < static_cast<std::ptrdiff_t>(g_.runs())) bits |= counts_[static_cast<std::size_t>(rr)] ? 1 : 0;
    }
    return (i * (y_.size() + 1) + j) * 8 + bits;
  }

  bool touch(const std::vector<std::size_t>& runs) {
    bool ok = true;
    for (std::size_t r : runs) ok &= ++counts_[r] <= 1;
    return ok;
  }
  void untouch(const std::vector<std::size_t>& runs) {
    for (std::size_t r : runs) --counts_[r];
  }

  // Tries each move; calls f(next_i, next_j, op) while the move is applied.
  template <typename F>
  void moves(std::size_t i, std::size_t j, F&& f) {
    const std::size_t n = x_.size(), m = y_.size();
    if (i < n && j < m && x_[i] == y_[j]) f(i + 1, j + 1, EditOp::noop());
    if (i < n) {
      const auto runs = g_.deletion_runs(i);
      if (touch(runs)) f(i + 1, j, EditOp::del());
      untouch(runs);
    }
    if (j < m) {
      const auto runs = g_.insertion_runs(i);
      if (touch(runs)) f(i, j + 1, EditOp::ins(y_[j]));
      untouch(runs);
    }
  }

  bool feasible(std::size_t i, std::size_t j) {
    if (i == x_.size() && j == y_.size()) return true;
    std::int8_t& slot = memo_[key(i, j)];
    if (slot != kUnknown) return slot != 0;
    bool ok = false;
    moves(i, j, [&](std::size_t ni, std::size_t nj, EditOp) {
      if (!ok) ok = feasible(ni, nj);
    });
    memo_[key(i, j)] = ok ? 1 : 0;
    return ok;
  }

  template <typename Visit>
  void enumerate(std::size_t i, std::size_t j, Visit& visit) {
    if (i == x_.size() && j == y_.size()) {
      if (++found_ > limit_) fail(ErrorCode::kInstanceTooLarge, "too many typical patterns to enumerate");
      visit(EditPattern(ops_));
      return;
    }
    moves(i, j, [&](std::size_t ni, std::size_t nj, EditOp op) {
      if (!feasible(ni, nj)) return;
      ops_.push_back(op);
      enumerate(ni, nj, visit);
      ops_.pop_back();
    });
  }

  const Sequence& x_;
  const Sequence& y_;
  RunGeometry g_;
  std::vector<std::uint8_t> counts_;
  std::size_t limit_;
  std::size_t found_ = 0;
  std::vector<std::int8_t> memo_;
  std::vector<EditOp> ops_;
};

// The same search, collapsed to segment vectors.  Many typical patterns share
// one alignment (an inserted symbol may sit anywhere inside a run of its
// kind, a deletion may hit any interior symbol of a run), so partial patterns
// that reach the same cursor, run counts and partial segment vector are
// expanded only once.  The vector is built incrementally with the rules of
// alignment_of: a survivor goes to its Y^-run, a deletion after a survivor of
// its run follows that survivor, and any other deletion waits for the next
// survivor (or, at the very end, falls back to the last one).
class AlignmentSearch : public TypicalPatternSearch {
 public:
  AlignmentSearch(const Sequence& x, const Sequence& y, std::size_t limit)
      : TypicalPatternSearch(x, y, limit), y_run_(run_index(y)),
        lengths_(y.empty() ? 0 : y_run_.back() + 1, 0) {}

  std::set<GlobalAlignment> run() {
    if (feasible(0, 0)) walk(0, 0);
    return found_set_;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  void walk(std::size_t i, std::size_t j) {
    if (i == x_.size() && j == y_.size()) {
      GlobalAlignment a{lengths_};
      if (pending_ > 0 && !a.segment_lengths.empty()) {
        a.segment_lengths[last_survivor_ == kNone ? 0 : last_survivor_] += pending_;
      }
      found_set_.insert(std::move(a));
      return;
    }
    std::vector<std::uint64_t> k{i, j, key(i, j), pending_, run_first_, last_survivor_};
    k.insert(k.end(), lengths_.begin(), lengths_.end());
    if (!visited_.insert(std::move(k)).second) return;
    if (++found_ > limit_) fail(ErrorCode::kInstanceTooLarge, "alignment search too large");

    moves(i, j, [&](std::size_t ni, std::size_t nj, EditOp op) {
      if (!feasible(ni, nj)) return;
      if (op.kind == OpKind::kInsert) {
        walk(ni, nj);
        return;
      }
      const std::size_t saved_pending = pending_, saved_first = run_first_, saved_last = last_survivor_;
      const bool new_run = i == 0 || g_.run_of[i] != g_.run_of[i - 1];
      if (new_run) run_first_ = kNone;
      std::size_t touched_seg = kNone, touched_add = 0;
      if (op.kind == OpKind::kNoOp) {
        const std::size_t seg = y_run_[j];
        touched_seg = seg;
        touched_add = 1 + pending_;
        pending_ = 0;
        if (run_first_ == kNone) run_first_ = seg;
        last_survivor_ = seg;
      } else if (run_first_ != kNone) {
        touched_seg = run_first_;
        touched_add = 1;
      } else {
        ++pending_;
      }
      if (touched_seg != kNone) lengths_[touched_seg] += touched_add;
      walk(ni, nj);
      if (touched_seg != kNone) lengths_[touched_seg] -= touched_add;
      pending_ = saved_pending;
      run_first_ = saved_first;
      last_survivor_ = saved_last;
    });
  }

  std::vector<std::size_t> y_run_;
  std::vector<std::size_t> lengths_;
  std::size_t pending_ = 0;
  std::size_t run_first_ = kNone;
  std::size_t last_survivor_ = kNone;
  std::set<std::vector<std::uint64_t>> visited_;
  std::set<GlobalAlignment> found_set_;
};

}  // namespace detail

// Calls visit(pattern) for every typical edit pattern with apply(x, e) = y.
template <typename Visit>
void for_each_typical_pattern(const Sequence& x, const Sequence& y, Visit&& visit,
                              std::size_t limit = 2'000'000) {
  if (x.alphabet != y.alphabet) fail(ErrorCode::kAlphabetMismatch, "alphabets differ");
  detail::TypicalPatternSearch search(x, y, limit);
  search.run(visit);
}

// The tree of all global alignments realizable by typical edit patterns.
// Each node records whether the next Y^-run meets an ambiguous local event:
// Gamma1 when the remaining source run is one shorter than the Y^-run (one
// insertion, or a merge across a deleted separator), Gamma2 when it is one
// longer (one deletion, or a split by an inserted symbol before its last
// symbol).  Both branches are explored until the input rules one out.
inline AlignmentTree align(const Sequence& x, const Sequence& y_hat) {
  if (x.alphabet != y_hat.alphabet) fail(ErrorCode::kAlphabetMismatch, "alphabets differ");
  const std::set<GlobalAlignment> found = detail::AlignmentSearch(x, y_hat, 20'000'000).run();
  if (found.empty()) fail(ErrorCode::kUnalignable, "no typical edit pattern turns the source into the target");

  const RunDecomposition yr = run_decompose(y_hat);
  AlignmentTree t;
  t.y_runs = yr.runs.size();
  auto tag_for = [&](std::size_t depth, std::size_t consumed) {
    if (depth >= yr.runs.size() || consumed >= x.size()) return GammaTag::kNone;
    const Run& r = yr.runs[depth];
    if (x[consumed] != r.symbol) return GammaTag::kNone;
    std::size_t lx = 0;
    while (consumed + lx < x.size() && x[consumed + lx] == r.symbol) ++lx;
    if (lx + 1 == r.length) return GammaTag::kGamma1;
    if (lx == r.length + 1) return GammaTag::kGamma2;
    return GammaTag::kNone;
  };
  t.nodes.push_back({0, 0, 0, tag_for(0, 0), {}});
  for (const GlobalAlignment& a : found) {
    std::size_t v = 0;
    for (std::size_t len : a.segment_lengths) {
      std::size_t next = static_cast<std::size_t>(-1);
      for (std::size_t c : t.nodes[v].children) {
        if (t.nodes[c].segment_length == len) next = c;
      }
      if (next == static_cast<std::size_t>(-1)) {
        AlignmentNode node;
        node.segment_length = len;
        node.depth = t.nodes[v].depth + 1;
        node.consumed = t.nodes[v].consumed + len;
        node.tag = tag_for(node.depth, node.consumed);
        t.nodes.push_back(node);
        next = t.nodes.size() - 1;
        t.nodes[v].children.push_back(next);
      }
      v = next;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Post-edit sets

enum class EditBudget {
  kAtMost,   // every Y reachable with <= max_ins insertions and <= max_del deletions
  kExactly,  // exactly max_del source symbols deleted, then exactly max_ins inserted
};

inline constexpr std::size_t kEnumerateMaxLength = 14;
inline constexpr std::uint32_t kEnumerateMaxAlphabet = 4;

// Exhaustive enumeration.  By the deletion-first canonical form every
// reachable Y is some subsequence of x (deletions) with symbols inserted;
// each layer is deduplicated before the next is expanded.
inline std::set<std::vector<Symbol>> enumerate_post_edit_set(const Sequence& x, std::size_t max_ins,
                                                             std::size_t max_del,
                                                             EditBudget budget = EditBudget::kAtMost) {
  if (x.size() + max_ins > kEnumerateMaxLength || x.alphabet > kEnumerateMaxAlphabet) {
    fail(ErrorCode::kInstanceTooLarge, "enumeration limited to |x| + max_ins <= 14 and a <= 4");
  }
  using Set = std::set<std::vector<Symbol>>;
  Set layer{x.symbols};
  Set acc = layer;
  for (std::size_t d = 0; d < max_del && !layer.empty(); ++d) {
    Set next;
    for (const auto& s : layer) {
      for (std::size_t k = 0; k < s.size(); ++k) {
        auto t = s;
        t.erase(t.begin() + static_cast<std::ptrdiff_t>(k));
        next.insert(std::move(t));
      }
    }
    layer = std::move(next);
    acc.insert(layer.begin(), layer.end());
  }
  Set base = budget == EditBudget::kAtMost ? acc : layer;
  if (budget == EditBudget::kExactly && max_del > x.size()) base.clear();

  layer = base;
  acc = base;
  for (std::size_t k = 0; k < max_ins; ++k) {
    Set next;
    for (const auto& s : layer) {
      for (std::size_t pos = 0; pos <= s.size(); ++pos) {
        for (std::uint32_t c = 0; c < x.alphabet; ++c) {
          auto t = s;
          t.insert(t.begin() + static_cast<std::ptrdiff_t>(pos), static_cast<Symbol>(c));
          next.insert(std::move(t));
        }
      }
    }
    layer = std::move(next);
    acc.insert(layer.begin(), layer.end());
  }
  return budget == EditBudget::kAtMost ? acc : layer;
}

// ---------------------------------------------------------------------------
// Monte Carlo estimate of H(E | X, Y) per source symbol.
//
// For a sample (x, e) with y = apply(x, e), -log2 P(e | x, y) =
// log2 P(y | x) - log2 P(e), and its mean over samples is exactly
// H(E | X, Y).  P(y | x) sums the probability of every edit path from x to y;
// a forward pass over (consumed, emitted) pairs computes it exactly, so no
// explicit posterior enumeration is needed.

struct MonteCarloEstimate {
  double estimate = 0;  // bits per source symbol
  double stderr_ = 0;
  double bound = 0;     // C_a (eps + del)
  std::size_t trials = 0;
};

inline constexpr std::size_t kNaturesSecretMaxLength = 2000;

namespace detail {

// log2 P(y | x) under the left-to-right random InDel process.
inline double log2_prob_y_given_x(const Sequence& x, const Sequence& y, double eps, double del) {
  const std::size_t n = x.size(), m = y.size();
  const long double pi = static_cast<long double>(eps) / x.alphabet;  // insert this symbol
  const long double pd = del;
  const long double pk = 1.0L - eps - del;
  std::vector<long double> prev(m + 1, 0), cur(m + 1, 0);
  long double scale = 0;  // log2 of the unit of `prev`
  prev[0] = 1;
  for (std::size_t j = 1; j <= m; ++j) prev[j] = prev[j - 1] * pi;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = prev[0] * pd;
    for (std::size_t j = 1; j <= m; ++j) {
      long double v = cur[j - 1] * pi + prev[j] * pd;
      if (x[i - 1] == y[j - 1]) v += prev[j - 1] * pk;
      cur[j] = v;
    }
    long double mx = 0;
    for (long double v : cur) mx = std::max(mx, v);
    if (mx <= 0) return -INFINITY;
    for (auto& v : cur) v /= mx;
    scale += std::log2(mx);
    std::swap(prev, cur);
  }
  if (prev[m] <= 0) return -INFINITY;
  return static_cast<double>(std::log2(prev[m]) + scale + std::log2(1.0L - eps));
}

inline double log2_prob_pattern(const EditPattern& e, std::size_t n, std::uint32_t a, double eps,
                                double del) {
  const std::size_t keep = n - e.k_del;
  double lp = std::log2(1.0 - eps);
  if (e.k_ins) lp += static_cast<double>(e.k_ins) * std::log2(eps / a);
  if (e.k_del) lp += static_cast<double>(e.k_del) * std::log2(del);
  if (keep) lp += static_cast<double>(keep) * std::log2(1.0 - eps - del);
  return lp;
}

}  // namespace detail

inline MonteCarloEstimate estimate_natures_secret(std::size_t n, std::uint32_t a, double eps,
                                                  double del, std::size_t trials, std::uint64_t seed) {
  if (n == 0 || n > kNaturesSecretMaxLength) {
    fail(ErrorCode::kInstanceTooLarge, "nature's-secret estimate needs 1 <= n <= 2000");
  }
  if (trials < 2) fail(ErrorCode::kDomainError, "need at least two trials");
  SplitMix64 rng(seed, static_cast<std::uint64_t>(RngStream::kLab));
  double sum = 0, sum2 = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Sequence x = gen_pre_ess(n, a, rng.next());
    RpesParams p{n, a, eps, del, rng.next()};
    const auto [e, y] = gen_ltrrid(x, p);
    double v = detail::log2_prob_y_given_x(x, y, eps, del) - detail::log2_prob_pattern(e, n, a, eps, del);
    v = std::max(v, 0.0);  // rounding can leave a -1e-16 residue
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / double(trials);
  const double var = std::max(0.0, (sum2 - double(trials) * mean * mean) / double(trials - 1));
  MonteCarloEstimate r;
  r.trials = trials;
  r.estimate = mean / double(n);
  r.stderr_ = std::sqrt(var / double(trials)) / double(n);
  r.bound = c_constant(a).value * (eps + del);
  return r;
}

// Fraction of samples whose typicalized output admits more than one global
// alignment (eps = del = rate), with its standard error.
inline MonteCarloEstimate estimate_unresolved_alignments(std::size_t n, std::uint32_t a, double rate,
                                                         std::size_t trials, std::uint64_t seed) {
  if (trials < 2) fail(ErrorCode::kDomainError, "need at least two trials");
  SplitMix64 rng(seed, static_cast<std::uint64_t>(RngStream::kLab));
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Sequence x = gen_pre_ess(n, a, rng.next());
    RpesParams p{n, a, rate, rate, rng.next()};
    const auto [e, y] = gen_ltrrid(x, p);
    const TypicalizedPattern tp = typicalize(x, e);
    const Sequence y_hat = typicalized_posess(x, tp);
    if (align(x, y_hat).leaf_count() > 1) ++hits;
  }
  MonteCarloEstimate r;
  r.trials = trials;
  r.estimate = double(hits) / double(trials);
  r.stderr_ = std::sqrt(r.estimate * (1 - r.estimate) / double(trials));
  r.bound = NAN;
  return r;
}

// Mean number of edits removed by typicalization, per source symbol.
inline MonteCarloEstimate estimate_eliminated_edits(std::size_t n, std::uint32_t a, double eps,
                                                    double del, std::size_t trials, std::uint64_t seed) {
  if (n == 0 || trials < 2) fail(ErrorCode::kDomainError, "need n >= 1 and at least two trials");
  SplitMix64 rng(seed, static_cast<std::uint64_t>(RngStream::kLab));
  double sum = 0, sum2 = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Sequence x = gen_pre_ess(n, a, rng.next());
    RpesParams p{n, a, eps, del, rng.next()};
    const auto [e, y] = gen_ltrrid(x, p);
    const TypicalizedPattern tp = typicalize(x, e);
    const double v = double((e.k_ins + e.k_del) - (tp.e_hat.k_ins + tp.e_hat.k_del)) / double(n);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / double(trials);
  MonteCarloEstimate r;
  r.trials = trials;
  r.estimate = mean;
  r.stderr_ = std::sqrt(std::max(0.0, (sum2 - double(trials) * mean * mean) / double(trials - 1)) / double(trials));
  r.bound = NAN;
  return r;
}

}  // namespace indel
