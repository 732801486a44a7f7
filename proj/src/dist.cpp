#include "ifgf/dist.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "ifgf/parallel.hpp"
#include "ifgf/simd_kernels.hpp"

namespace ifgf::dist {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int owner_of(const std::vector<std::uint32_t>& begin, std::uint32_t v) {
  const auto it = std::upper_bound(begin.begin(), begin.end(), v);
  return static_cast<int>(it - begin.begin()) - 1;
}

constexpr std::uint32_t kAbsent = 0xffffffffu;

// Foreign blocks fetched for one (rank, level, pass); lives for exactly one
// level step. slot_of_cone doubles as the dedup set.
struct FetchCache {
  std::vector<std::uint32_t> slot_of_cone;
  BlockStore blocks;
  std::size_t count = 0;

  void reset(std::size_t cones, int P) {
    slot_of_cone.assign(cones, kAbsent);
    blocks.P = P;
    blocks.re.clear();
    blocks.im.clear();
    count = 0;
  }
  bool has(std::uint32_t q) const { return slot_of_cone[q] != kAbsent; }
  void put(std::uint32_t q, const InterpolantBlock& b) {
    slot_of_cone[q] = static_cast<std::uint32_t>(count++);
    blocks.re.insert(blocks.re.end(), b.re.begin(), b.re.end());
    blocks.im.insert(blocks.im.end(), b.im.begin(), b.im.end());
  }
};

// Rank-local view of one level: own interval straight from the window,
// everything else through the fetch cache.
BlockTable make_table(const BlockStore& owned, std::uint32_t own_begin,
                      std::uint32_t own_end, const FetchCache& cache,
                      std::size_t cones) {
  BlockTable t;
  t.re.assign(cones, nullptr);
  t.im.assign(cones, nullptr);
  for (std::uint32_t q = own_begin; q < own_end; ++q) {
    t.re[q] = owned.block_re(q);
    t.im[q] = owned.block_im(q);
  }
  for (std::uint32_t q = 0; q < cones; ++q) {
    const std::uint32_t slot = cache.slot_of_cone[q];
    if (slot == kAbsent) continue;
    t.re[q] = cache.blocks.block_re(slot);
    t.im[q] = cache.blocks.block_im(slot);
  }
  return t;
}

}  // namespace

int RankLayout::point_owner(std::uint32_t i) const { return owner_of(point_begin, i); }

int RankLayout::cone_owner(int d, std::uint32_t q) const {
  return owner_of(cone_begin[d - 3], q);
}

RankLayout partition(const LinearOctree& tree, const RelevantConeSet& cones, int n_ranks) {
  if (n_ranks < 1) throw std::invalid_argument("partition: need at least one rank");
  const OctreeLevel& lvl = tree.level(tree.depth());
  const std::size_t n_boxes = lvl.size();
  if (static_cast<std::size_t>(n_ranks) > n_boxes)
    throw std::invalid_argument(
        "partition: more ranks than relevant finest-level boxes (the smallest "
        "distribution unit)");

  RankLayout layout;
  layout.n_ranks = n_ranks;

  // Greedy prefix split of box populations toward N/N_r per rank, while
  // leaving enough boxes for the remaining ranks.
  const std::size_t n_points =
      lvl.boxes.back().first_point + lvl.boxes.back().point_count;
  layout.box_begin.resize(n_ranks + 1);
  layout.point_begin.resize(n_ranks + 1);
  layout.box_begin[0] = 0;
  layout.point_begin[0] = 0;
  std::uint32_t b = 0;
  for (int r = 0; r < n_ranks - 1; ++r) {
    // Cut at the first box whose cumulative population reaches the running
    // target, keeping at least one box here and one per remaining rank.
    const double target = static_cast<double>(n_points) * (r + 1) / n_ranks;
    const std::uint32_t max_end =
        static_cast<std::uint32_t>(n_boxes) - static_cast<std::uint32_t>(n_ranks - 1 - r);
    std::uint32_t e = b + 1;
    while (e < max_end &&
           static_cast<double>(lvl.boxes[e - 1].first_point +
                               lvl.boxes[e - 1].point_count) < target)
      ++e;
    layout.box_begin[r + 1] = e;
    layout.point_begin[r + 1] =
        lvl.boxes[e - 1].first_point + lvl.boxes[e - 1].point_count;
    b = e;
  }
  layout.box_begin[n_ranks] = static_cast<std::uint32_t>(n_boxes);
  layout.point_begin[n_ranks] = static_cast<std::uint32_t>(n_points);

  // Equal-count split of each level's cone order; sizes differ by <= 1.
  layout.cone_begin.resize(cones.levels.size());
  for (std::size_t li = 0; li < cones.levels.size(); ++li) {
    const std::size_t n = cones.levels[li].size();
    auto& cb = layout.cone_begin[li];
    cb.resize(n_ranks + 1);
    const std::size_t base = n / n_ranks, extra = n % n_ranks;
    cb[0] = 0;
    for (int r = 0; r < n_ranks; ++r)
      cb[r + 1] = cb[r] + static_cast<std::uint32_t>(base + (static_cast<std::size_t>(r) < extra ? 1 : 0));
  }
  return layout;
}

Window::Window(int depth, int P, CommStats* stats) : P_(P), stats_(stats) {
  levels_.resize(depth - 2);
}

void Window::open_level(int d, std::size_t cones) {
  LevelSlot& slot = levels_[d - 3];
  slot.store.allocate(cones, P_);
  slot.fenced = false;
  slot.fanout_interp.assign(cones, 0);
  slot.fanout_prop.assign(cones, 0);
}

void Window::fence(int d) { levels_[d - 3].fenced = true; }

void Window::close_level(int d) {
  LevelSlot& slot = levels_[d - 3];
  slot.store = BlockStore{};
  slot.fenced = false;
  slot.fanout_interp = {};
  slot.fanout_prop = {};
}

InterpolantBlock Window::get(int origin, int requester, int d, std::uint32_t q,
                             Kind kind) {
  LevelSlot& slot = levels_[d - 3];
  if (!slot.fenced)
    throw std::runtime_error("window get before the level's epoch fence");
  if (origin != requester && stats_) {
    CommLevelStats& ls = stats_->levels[d - 3];
    if (kind == Kind::Interp) {
      ls.interp_fetched++;
      ls.max_interp_fanout = std::max<std::uint32_t>(ls.max_interp_fanout,
                                                     ++slot.fanout_interp[q]);
    } else {
      ls.prop_fetched++;
      ls.max_prop_fanout = std::max<std::uint32_t>(ls.max_prop_fanout,
                                                   ++slot.fanout_prop[q]);
    }
  }
  return {std::span<const double>(slot.store.block_re(q), static_cast<std::size_t>(P_)),
          std::span<const double>(slot.store.block_im(q), static_cast<std::size_t>(P_))};
}

namespace {

// CommunicateInterpolationData(d): for every owned surface point and every
// cousin box, resolve the containing relevant cone and fetch it if foreign.
void communicate_interpolation_data(const Problem& prob, const RankLayout& layout,
                                    Window& win, int d, int rank, FetchCache& cache) {
  const OctreeLevel& lvl = prob.tree.level(d);
  const LevelConeSet& cs = prob.cones.level(d);
  const ConeGridSpec& spec = prob.cones.spec;
  cache.reset(cs.size(), spec.orders.total());

  for (std::uint32_t i = layout.point_begin[rank]; i < layout.point_begin[rank + 1]; ++i) {
    const Vec3 x = prob.cloud.point(i);
    const std::uint32_t b = prob.tree.box_of_sorted_point(i, d);
    for (std::uint32_t ci = lvl.cousin_off[b]; ci < lvl.cousin_off[b + 1]; ++ci) {
      const std::uint32_t cb = lvl.cousin[ci];
      const std::uint64_t gamma =
          cone_of_point(spec, d, lvl.boxes[cb].center, lvl.h, x);
      const std::uint32_t q = cs.find(cb, gamma);
      if (q == kNoCone)
        throw std::logic_error("communicate: cousin cone not relevant");
      const int origin = layout.cone_owner(d, q);
      if (origin == rank || cache.has(q)) continue;
      cache.put(q, win.get(origin, rank, d, q, Window::Kind::Interp));
    }
  }
}

// CommunicatePropagationData(d): for every owned parent cone on level d-1,
// every relevant child of its co-centered box and every node, resolve the
// containing child cone and fetch it if foreign.
void communicate_propagation_data(const Problem& prob, const RankLayout& layout,
                                  Window& win, int d, int rank, FetchCache& cache) {
  const OctreeLevel& plvl = prob.tree.level(d - 1);
  const OctreeLevel& clvl = prob.tree.level(d);
  const LevelConeSet& pcs = prob.cones.level(d - 1);
  const LevelConeSet& ccs = prob.cones.level(d);
  const ConeGridSpec& spec = prob.cones.spec;
  const InterpOrders& orders = spec.orders;
  const int P = orders.total();
  cache.reset(ccs.size(), P);

  std::vector<Vec3> nodes(P);
  const auto& cb_range = layout.cone_begin[d - 1 - 3];
  for (std::uint32_t q = cb_range[rank]; q < cb_range[rank + 1]; ++q) {
    const std::uint32_t pb = pcs.cone_box[q];
    const Vec3 pcenter = plvl.boxes[pb].center;
    const ConeSegment seg = cone_segment(spec, d - 1, pcs.cone_gamma[q]);
    interpolation_nodes(orders, seg, pcenter, plvl.h, nodes.data());
    for (std::uint32_t cb = plvl.child_begin[pb]; cb < plvl.child_begin[pb + 1]; ++cb) {
      const Vec3 ccenter = clvl.boxes[cb].center;
      for (int m = 0; m < P; ++m) {
        const std::uint64_t gamma = cone_of_point(spec, d, ccenter, clvl.h, nodes[m]);
        const std::uint32_t cq = ccs.find(cb, gamma);
        if (cq == kNoCone)
          throw std::logic_error("communicate: child cone not relevant");
        const int origin = layout.cone_owner(d, cq);
        if (origin == rank || cache.has(cq)) continue;
        cache.put(cq, win.get(origin, rank, d, cq, Window::Kind::Prop));
      }
    }
  }
}

}  // namespace

DistReport run_distributed(PointCloud& pc, const KernelConfig& cfg, const EngineParams& p,
                           int n_ranks) {
  if (pc.size() < 2) throw std::invalid_argument("run_distributed: need two points");
  const int threads = resolve_threads(p.threads);

  DistReport rep;
  const auto t_total = clock_type::now();
  auto t0 = clock_type::now();
  Problem prob = Problem::build(pc, cfg, p);
  const int depth = prob.depth;
  const int P = p.orders.total();

  RankLayout layout = partition(prob.tree, prob.cones, n_ranks);
  rep.base.seconds.setup = seconds_since(t0);

  rep.comm.levels.resize(depth - 2);
  for (int d = 3; d <= depth; ++d) {
    rep.comm.levels[d - 3].d = d;
    rep.comm.levels[d - 3].owned_blocks = prob.cones.level(d).size();
    std::size_t max_owned = 0;
    for (int r = 0; r < n_ranks; ++r)
      max_owned = std::max<std::size_t>(
          max_owned, layout.cone_begin[d - 3][r + 1] - layout.cone_begin[d - 3][r]);
    rep.comm.levels[d - 3].max_rank_owned_blocks = max_owned;
  }

  std::fill(prob.cloud.i_re.begin(), prob.cloud.i_re.end(), 0.0);
  std::fill(prob.cloud.i_im.begin(), prob.cloud.i_im.end(), 0.0);

  // Level-D neighbor interactions; each rank owns the result slots of its
  // own points and reads the shared geometry.
  t0 = clock_type::now();
  for (int r = 0; r < n_ranks; ++r)
    singular_pass(prob, cfg, layout.point_begin[r], layout.point_begin[r + 1], threads,
                  prob.cloud.i_re, prob.cloud.i_im);
  rep.base.seconds.singular = seconds_since(t0);

  Window win(depth, P, &rep.comm);
  win.open_level(depth, prob.cones.level(depth).size());
  rep.base.peak_live_blocks = prob.cones.level(depth).size();

  t0 = clock_type::now();
  for (int r = 0; r < n_ranks; ++r)
    eval_level_d(prob, cfg, layout.cone_begin[depth - 3][r],
                 layout.cone_begin[depth - 3][r + 1], threads, win.storage(depth));
  win.fence(depth);
  rep.base.seconds.level_d = seconds_since(t0);

  std::vector<FetchCache> interp_cache(n_ranks), prop_cache(n_ranks),
      next_prop_cache(n_ranks);

  if (depth > 3)
    for (int r = 0; r < n_ranks; ++r)
      communicate_propagation_data(prob, layout, win, depth, r, prop_cache[r]);

  for (int d = depth; d >= 3; --d) {
    const std::size_t n_cones = prob.cones.level(d).size();
    const auto& own = layout.cone_begin[d - 3];

    for (int r = 0; r < n_ranks; ++r)
      communicate_interpolation_data(prob, layout, win, d, r, interp_cache[r]);

    for (int r = 0; r < n_ranks; ++r)
      rep.comm.levels[d - 3].peak_rank_cache_blocks =
          std::max(rep.comm.levels[d - 3].peak_rank_cache_blocks,
                   interp_cache[r].count + (d > 3 ? prop_cache[r].count : 0));

    if (d > 3) {
      const std::size_t n_parent = prob.cones.level(d - 1).size();
      const auto& pown = layout.cone_begin[d - 4];
      win.open_level(d - 1, n_parent);
      rep.base.peak_live_blocks =
          std::max(rep.base.peak_live_blocks, n_cones + n_parent);

      t0 = clock_type::now();
      for (int r = 0; r < n_ranks; ++r) {
        const BlockTable table =
            make_table(win.storage(d), own[r], own[r + 1], prop_cache[r], n_cones);
        propagation_pass(prob, cfg, d, table, pown[r], pown[r + 1], threads,
                         win.storage(d - 1));
      }
      win.fence(d - 1);
      rep.base.seconds.propagation += seconds_since(t0);

      if (d > 4)
        for (int r = 0; r < n_ranks; ++r)
          communicate_propagation_data(prob, layout, win, d - 1, r, next_prop_cache[r]);
    }

    t0 = clock_type::now();
    for (int r = 0; r < n_ranks; ++r) {
      const BlockTable table =
          make_table(win.storage(d), own[r], own[r + 1], interp_cache[r], n_cones);
      interpolation_pass(prob, cfg, d, table, layout.point_begin[r],
                         layout.point_begin[r + 1], threads, prob.cloud.i_re,
                         prob.cloud.i_im);
    }
    rep.base.seconds.interpolation += seconds_since(t0);

    // Caches live for exactly one level step, and so does the level itself.
    std::swap(prop_cache, next_prop_cache);
    win.close_level(d);
  }

  for (std::size_t i = 0; i < prob.cloud.size(); ++i) {
    pc.i_re[prob.perm[i]] = prob.cloud.i_re[i];
    pc.i_im[prob.perm[i]] = prob.cloud.i_im[i];
  }

  rep.base.depth = depth;
  rep.base.n = pc.size();
  rep.base.h_level_d = prob.tree.level(depth).h;
  for (int d = 3; d <= depth; ++d)
    rep.base.levels.push_back({d, prob.tree.level(d).size(), prob.cones.level(d).size()});
  rep.base.simd_variant = simd::active_variant_name();
  rep.base.seconds.total = seconds_since(t_total);
  rep.rank_points.resize(n_ranks);
  for (int r = 0; r < n_ranks; ++r)
    rep.rank_points[r] = layout.point_begin[r + 1] - layout.point_begin[r];
  return rep;
}

std::vector<std::uint32_t> per_rank_samples(const Problem& prob, const RankLayout& layout,
                                            std::size_t m, std::uint64_t seed) {
  std::vector<std::uint32_t> out;
  for (int r = 0; r < layout.n_ranks; ++r) {
    const std::uint32_t begin = layout.point_begin[r];
    const std::size_t count = layout.point_begin[r + 1] - begin;
    const auto local = sample_indices(count, std::min(m, count), seed + r);
    for (const std::uint32_t i : local) out.push_back(prob.perm[begin + i]);
  }
  return out;
}

}  // namespace ifgf::dist
