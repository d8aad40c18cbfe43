#include <algorithm>
#include <array>
#include <iterator>

#include "disco/aligner.hpp"
#include "disco/error.hpp"

namespace disco::align {
namespace {

constexpr std::array<std::pair<int, int>, 8> kNeighbors{{
    {-1, 0}, {0, -1}, {1, 0}, {0, 1}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1},
}};

// Grow-diag-final-and. A candidate link is only added while both its source
// and its target token are still unaligned, in the grow phase as well as in
// the final phase.
std::set<AlignmentLink> grow_diag_final_and(const std::set<AlignmentLink>& fwd,
                                            const std::set<AlignmentLink>& bwd) {
  std::set<AlignmentLink> uni;
  std::set_union(fwd.begin(), fwd.end(), bwd.begin(), bwd.end(),
                 std::inserter(uni, uni.end()));
  std::set<AlignmentLink> result;
  std::set_intersection(fwd.begin(), fwd.end(), bwd.begin(), bwd.end(),
                        std::inserter(result, result.end()));
  std::set<std::size_t> src_covered;
  std::set<std::size_t> tgt_covered;
  for (const auto& l : result) {
    src_covered.insert(l.src);
    tgt_covered.insert(l.tgt);
  }
  const auto try_add = [&](const AlignmentLink& l) {
    if (src_covered.count(l.src) || tgt_covered.count(l.tgt)) return false;
    if (!uni.count(l) || result.count(l)) return false;
    result.insert(l);
    src_covered.insert(l.src);
    tgt_covered.insert(l.tgt);
    return true;
  };

  bool added = true;
  while (added) {
    added = false;
    const std::vector<AlignmentLink> current(result.begin(), result.end());
    for (const auto& l : current) {
      for (const auto& [ds, dt] : kNeighbors) {
        if ((ds < 0 && l.src == 0) || (dt < 0 && l.tgt == 0)) continue;
        const AlignmentLink n{l.src + static_cast<std::size_t>(ds),
                              l.tgt + static_cast<std::size_t>(dt)};
        added |= try_add(n);
      }
    }
  }
  for (const auto& l : uni) try_add(l);
  return result;
}

}  // namespace

Heuristic parse_heuristic(std::string_view name) {
  if (name == "intersection" || name == "intersect") return Heuristic::kIntersection;
  if (name == "union") return Heuristic::kUnion;
  if (name == "grow-diag-final-and" || name == "gdfa") {
    return Heuristic::kGrowDiagFinalAnd;
  }
  throw ValidationError("unknown symmetrization heuristic '" +
                        std::string(name) + "'");
}

AlignmentSet symmetrize(const AlignmentSet& forward,
                        const AlignmentSet& backward, Heuristic heuristic) {
  if (forward.pair_id != backward.pair_id) {
    throw ValidationError("cannot symmetrize '" + forward.pair_id +
                          "' with '" + backward.pair_id + "'");
  }
  AlignmentSet out{forward.pair_id, {}};
  switch (heuristic) {
    case Heuristic::kIntersection:
      std::set_intersection(forward.links.begin(), forward.links.end(),
                            backward.links.begin(), backward.links.end(),
                            std::inserter(out.links, out.links.end()));
      break;
    case Heuristic::kUnion:
      std::set_union(forward.links.begin(), forward.links.end(),
                     backward.links.begin(), backward.links.end(),
                     std::inserter(out.links, out.links.end()));
      break;
    case Heuristic::kGrowDiagFinalAnd:
      out.links = grow_diag_final_and(forward.links, backward.links);
      break;
  }
  return out;
}

}  // namespace disco::align
