// Benchmark and verification harness around the IFGF library: single runs
// with a JSON report, direct-oracle verification, and complexity sweeps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ifgf/bench.hpp"
#include "ifgf/dist.hpp"
#include "ifgf/engine.hpp"
#include "ifgf/parallel.hpp"
#include "ifgf/simd_kernels.hpp"

using json = nlohmann::ordered_json;

namespace {

struct CommonOpts {
  std::string shape = "sphere";
  double size_lambda = 4.0;
  std::size_t n = 20000;
  std::string kernel = "helmholtz";
  int depth = 0;
  double box_lambda = 0.25;
  std::vector<int> p;      // interpolation orders (s, theta, phi)
  std::vector<int> cones;  // level-D segment counts (s, theta, phi)
  int ranks = 1;
  int threads = 0;
  std::uint64_t seed = 1;
  std::string input;
  std::string output;
  std::size_t m = 1000;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--shape", o.shape, "sphere|oblate|prolate")
      ->check(CLI::IsMember({"sphere", "oblate", "prolate"}));
  cmd->add_option("--size-lambda", o.size_lambda, "surface diameter in wavelengths");
  cmd->add_option("--n", o.n, "requested point count (rounded to 6 k^2)");
  cmd->add_option("--kernel", o.kernel, "helmholtz|laplace")
      ->check(CLI::IsMember({"helmholtz", "laplace"}));
  cmd->add_option("--depth", o.depth, "octree depth D (0 = auto)");
  cmd->add_option("--box-lambda", o.box_lambda,
                  "smallest admissible finest-box size in wavelengths");
  cmd->add_option("--p", o.p, "interpolation orders s,theta,phi")->delimiter(',');
  cmd->add_option("--cones", o.cones, "level-D cone counts s,theta,phi")->delimiter(',');
  cmd->add_option("--ranks", o.ranks, "simulated rank count");
  cmd->add_option("--threads", o.threads,
                  "execution units (0 = IFGF_THREADS env or hardware)");
  cmd->add_option("--seed", o.seed, "seed for coefficients and sampling");
  cmd->add_option("--input", o.input, "point file (binary or CSV) instead of a shape");
  cmd->add_option("--output", o.output, "write the report here instead of stdout");
  cmd->add_option("--m", o.m, "error-sample size per rank");
}

struct Built {
  ifgf::PointCloud pc;
  ifgf::KernelConfig cfg;
  ifgf::EngineParams params;
  double diameter = 0.0;
  std::size_t n_requested = 0;
};

Built build_case(const CommonOpts& o, std::size_t n_override = 0,
                 double size_override = 0.0) {
  Built b;
  b.cfg.kind = o.kernel == "laplace" ? ifgf::KernelKind::Laplace
                                     : ifgf::KernelKind::Helmholtz;
  const std::size_t n_req = n_override ? n_override : o.n;
  const double size_lambda = size_override > 0.0 ? size_override : o.size_lambda;
  b.n_requested = n_req;

  if (!o.input.empty()) {
    b.pc = ifgf::read_points(o.input);
    b.diameter = ifgf::diameter(b.pc);
  } else {
    const auto shape = ifgf::shape_from_string(o.shape);
    const int k = std::max(2, static_cast<int>(std::lround(
                                  std::sqrt(static_cast<double>(n_req) / 6.0))));
    b.pc = ifgf::generate_surface(shape, 1.0, k, o.seed);
    b.diameter = ifgf::shape_diameter(shape, 1.0);
  }

  if (b.cfg.kind == ifgf::KernelKind::Helmholtz) {
    if (size_lambda <= 0.0)
      throw CLI::ValidationError("--size-lambda must be positive for helmholtz");
    b.cfg.wavenumber = 2.0 * std::numbers::pi * size_lambda / b.diameter;
  } else {
    // A real kernel with real data keeps the output real.
    std::fill(b.pc.a_im.begin(), b.pc.a_im.end(), 0.0);
  }

  b.params.depth = o.depth;
  b.params.box_lambda = o.box_lambda;
  b.params.threads = o.threads;
  if (!o.p.empty()) {
    if (o.p.size() != 3) throw CLI::ValidationError("--p needs three values");
    b.params.orders = {o.p[0], o.p[1], o.p[2]};
  }
  if (!o.cones.empty()) {
    if (o.cones.size() != 3) throw CLI::ValidationError("--cones needs three values");
    b.params.base_s = o.cones[0];
    b.params.base_theta = o.cones[1];
    b.params.base_phi = o.cones[2];
  }
  return b;
}

json config_json(const CommonOpts& o, const Built& b) {
  json j;
  j["shape"] = o.input.empty() ? o.shape : "file:" + o.input;
  j["kernel"] = o.kernel;
  j["wavenumber"] = b.cfg.wavenumber;
  j["size_lambda"] = o.size_lambda;
  j["n_requested"] = b.n_requested;
  j["seed"] = o.seed;
  j["depth"] = o.depth;
  j["box_lambda"] = o.box_lambda;
  j["p"] = {b.params.orders.p_s, b.params.orders.p_theta, b.params.orders.p_phi};
  j["cones"] = {b.params.base_s, b.params.base_theta, b.params.base_phi};
  j["ranks"] = o.ranks;
  j["threads"] = ifgf::resolve_threads(o.threads);
  j["m"] = o.m;
  return j;
}

json report_json(const CommonOpts& o, const Built& b, const ifgf::ApplyReport& rep,
                 const ifgf::dist::CommStats* comm, double eps, std::size_t m_used) {
  json j;
  j["schema_version"] = 1;
  j["config"] = config_json(o, b);
  j["n"] = rep.n;
  j["depth"] = rep.depth;
  const double lambda = b.cfg.wavelength();
  j["diameter_lambda"] = lambda > 0.0 ? b.diameter / lambda : 0.0;
  j["h_level_d_lambda"] = lambda > 0.0 ? rep.h_level_d / lambda : 0.0;
  j["stage_seconds"] = {{"setup", rep.seconds.setup},
                        {"singular", rep.seconds.singular},
                        {"level_d_eval", rep.seconds.level_d},
                        {"interpolation", rep.seconds.interpolation},
                        {"propagation", rep.seconds.propagation},
                        {"total", rep.seconds.total}};
  j["epsilon"] = {{"m", m_used}, {"seed", o.seed}, {"value", eps}};
  json levels = json::array();
  for (const auto& l : rep.levels)
    levels.push_back({{"d", l.d}, {"boxes", l.boxes}, {"cones", l.cones}});
  j["levels"] = levels;
  j["peak_live_blocks"] = rep.peak_live_blocks;
  if (comm) {
    json cl = json::array();
    for (const auto& l : comm->levels)
      cl.push_back({{"d", l.d},
                    {"interp_fetched", l.interp_fetched},
                    {"prop_fetched", l.prop_fetched},
                    {"max_interp_fanout", l.max_interp_fanout},
                    {"max_prop_fanout", l.max_prop_fanout},
                    {"owned_blocks", l.owned_blocks},
                    {"peak_rank_cache_blocks", l.peak_rank_cache_blocks}});
    j["comm"] = {{"levels", cl}, {"total_fetched", comm->total_fetched()}};
  }
  j["simd_variant"] = rep.simd_variant;
  j["result_checksum"] = ifgf::bench::checksum_hex(b.pc.i_re, b.pc.i_im);
  double imag_max = 0.0;
  for (const double v : b.pc.i_im) imag_max = std::max(imag_max, std::abs(v));
  j["imag_max_abs"] = imag_max;
  return j;
}

void emit(const std::string& output, const std::string& text) {
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot open " + output);
    out << text;
  }
}

int cmd_run(const CommonOpts& o) {
  Built b = build_case(o);
  ifgf::ApplyReport rep;
  std::optional<ifgf::dist::CommStats> comm;
  if (o.ranks > 1) {
    auto drep = ifgf::dist::run_distributed(b.pc, b.cfg, b.params, o.ranks);
    rep = drep.base;
    comm = drep.comm;
  } else {
    rep = ifgf::apply(b.pc, b.cfg, b.params);
  }
  const std::size_t m_used = std::min<std::size_t>(o.m * std::max(1, o.ranks),
                                                   b.pc.size());
  const double eps = ifgf::estimate_error(b.pc, b.cfg, m_used, o.seed + 1,
                                          b.params.threads);
  emit(o.output,
       report_json(o, b, rep, comm ? &*comm : nullptr, eps, m_used).dump(2) + "\n");
  return 0;
}

int cmd_verify(const CommonOpts& o, const std::string& mode, double threshold) {
  Built b = build_case(o);
  if (mode == "full" && b.pc.size() > 5000)
    throw CLI::ValidationError("--verify full is limited to N <= 5000");

  if (o.ranks > 1)
    ifgf::dist::run_distributed(b.pc, b.cfg, b.params, o.ranks);
  else
    ifgf::apply(b.pc, b.cfg, b.params);

  double eps = 0.0;
  if (mode == "full") {
    std::vector<std::uint32_t> all(b.pc.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
    eps = ifgf::error_at_indices(b.pc, b.cfg, all, b.params.threads);
  } else if (o.ranks > 1) {
    // m points drawn on each rank from its own interval.
    ifgf::Problem prob = ifgf::Problem::build(b.pc, b.cfg, b.params);
    const auto layout = ifgf::dist::partition(prob.tree, prob.cones, o.ranks);
    const auto idx = ifgf::dist::per_rank_samples(prob, layout, o.m, o.seed + 1);
    eps = ifgf::error_at_indices(b.pc, b.cfg, idx, b.params.threads);
  } else {
    const std::size_t m_used = std::min<std::size_t>(o.m, b.pc.size());
    eps = ifgf::estimate_error(b.pc, b.cfg, m_used, o.seed + 1, b.params.threads);
  }
  std::printf("epsilon %.6e threshold %.6e : %s\n", eps, threshold,
              eps <= threshold ? "pass" : "FAIL");
  return eps <= threshold ? 0 : 1;
}

int cmd_scale(const CommonOpts& o, const std::vector<std::size_t>& ns) {
  std::ostringstream csv;
  csv << "n,size_lambda,depth,t_seconds,t_per_nlog2n,peak_live_blocks,"
         "relevant_cones,blocks_fetched_total,fetched_per_nlog2n\n";
  const std::size_t n0 = ns.front();
  for (const std::size_t n : ns) {
    // Fixed points per box: the acoustic size grows with sqrt(N).
    const double size = o.size_lambda * std::sqrt(static_cast<double>(n) / n0);
    Built b = build_case(o, n, size);
    ifgf::ApplyReport rep;
    std::uint64_t fetched = 0;
    if (o.ranks > 1) {
      auto drep = ifgf::dist::run_distributed(b.pc, b.cfg, b.params, o.ranks);
      rep = drep.base;
      fetched = drep.comm.total_fetched();
    } else {
      rep = ifgf::apply(b.pc, b.cfg, b.params);
    }
    std::size_t cones_total = 0;
    for (const auto& l : rep.levels) cones_total += l.cones;
    const double nlogn = static_cast<double>(rep.n) * std::log2(static_cast<double>(rep.n));
    csv << rep.n << "," << size << "," << rep.depth << "," << rep.seconds.total << ","
        << rep.seconds.total / nlogn << "," << rep.peak_live_blocks << "," << cones_total
        << "," << fetched << "," << static_cast<double>(fetched) / nlogn << "\n";
  }
  emit(o.output, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IFGF operator evaluation benchmark"};
  app.require_subcommand(1);

  CommonOpts run_opts, verify_opts, scale_opts;
  std::string verify_mode = "subsample";
  double verify_threshold = 5e-3;
  std::vector<std::size_t> scale_ns;

  CLI::App* run = app.add_subcommand("run", "single evaluation with a JSON report");
  add_common(run, run_opts);

  CLI::App* verify = app.add_subcommand("verify", "compare against the direct oracle");
  add_common(verify, verify_opts);
  verify->add_option("--verify", verify_mode, "full|subsample")
      ->check(CLI::IsMember({"full", "subsample"}));
  verify->add_option("--threshold", verify_threshold, "epsilon threshold");

  CLI::App* scale = app.add_subcommand("scale", "complexity sweep, CSV output");
  add_common(scale, scale_opts);
  scale->add_option("--ns", scale_ns, "point counts to sweep")
      ->delimiter(',')
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (verify->parsed()) return cmd_verify(verify_opts, verify_mode, verify_threshold);
    if (scale->parsed()) return cmd_scale(scale_opts, scale_ns);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
