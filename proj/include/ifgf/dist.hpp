#pragma once

#include <cstdint>
#include <vector>

#include "ifgf/engine.hpp"

namespace ifgf::dist {

/// Contiguous interval assignment: level-D boxes (hence points) to ranks by
/// a population-balanced prefix split, and each level's cone list to ranks
/// by an equal-count split. Co-centered cones may land on different ranks.
struct RankLayout {
  int n_ranks = 1;
  std::vector<std::uint32_t> box_begin;    // size n_ranks+1, level-D box ordinals
  std::vector<std::uint32_t> point_begin;  // size n_ranks+1, sorted point indices
  std::vector<std::vector<std::uint32_t>> cone_begin;  // [d-3][rank], size n_ranks+1

  int point_owner(std::uint32_t i) const;
  int cone_owner(int d, std::uint32_t q) const;
};

RankLayout partition(const LinearOctree& tree, const RelevantConeSet& cones, int n_ranks);

struct CommLevelStats {
  int d = 0;
  std::uint64_t interp_fetched = 0;   // cross-rank block fetches, deduplicated
  std::uint64_t prop_fetched = 0;     //   per (requester, cone)
  std::uint32_t max_interp_fanout = 0;  // distinct destination ranks per cone
  std::uint32_t max_prop_fanout = 0;
  std::size_t owned_blocks = 0;         // |R_C^d|
  std::size_t peak_rank_cache_blocks = 0;  // max over ranks at this level
  std::size_t max_rank_owned_blocks = 0;
};

struct CommStats {
  std::vector<CommLevelStats> levels;  // index d-3

  std::uint64_t total_fetched() const {
    std::uint64_t t = 0;
    for (const auto& l : levels) t += l.interp_fetched + l.prop_fetched;
    return t;
  }
};

/// Published per-level coefficient storage with an epoch fence. Blocks
/// become readable by other ranks only once the level is fenced; reading an
/// unfenced level is a synchronization error.
class Window {
 public:
  enum class Kind { Interp, Prop };

  Window(int depth, int P, CommStats* stats);

  BlockStore& storage(int d) { return levels_[d - 3].store; }
  const BlockStore& storage(int d) const { return levels_[d - 3].store; }
  void open_level(int d, std::size_t cones);
  void fence(int d);
  bool fenced(int d) const { return levels_[d - 3].fenced; }
  /// Releases a level once its interpolation step is done; blocks of at most
  /// two consecutive levels are live at any time.
  void close_level(int d);

  /// One-sided read of cone q's block from rank `origin` on behalf of
  /// `requester`; counts a cross-rank fetch (and the per-cone destination
  /// fan-out) when the two differ.
  InterpolantBlock get(int origin, int requester, int d, std::uint32_t q, Kind kind);

 private:
  struct LevelSlot {
    BlockStore store;
    bool fenced = false;
    std::vector<std::uint16_t> fanout_interp, fanout_prop;
  };
  std::vector<LevelSlot> levels_;
  int P_ = 0;
  CommStats* stats_ = nullptr;
};

struct DistReport {
  ApplyReport base;
  CommStats comm;
  std::vector<std::size_t> rank_points;  // per rank
};

/// Runs the full interleaved rank algorithm in one process: every rank is an
/// isolated partition working on its own cone and point intervals, reading
/// foreign blocks only through the window into per-level caches. Output is
/// bitwise identical to apply() for every valid rank count.
DistReport run_distributed(PointCloud& pc, const KernelConfig& cfg, const EngineParams& p,
                           int n_ranks);

/// Error-sampling draw for rank-parallel runs: up to m seeded indices from
/// every rank's own point interval, mapped back to the caller's original
/// point order.
std::vector<std::uint32_t> per_rank_samples(const Problem& prob, const RankLayout& layout,
                                            std::size_t m, std::uint64_t seed);

}  // namespace ifgf::dist
