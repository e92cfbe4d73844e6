// pcfbands <subcommand> --config <file> [--out <dir>] [--jobs <n>] [--dump-fields]
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "pcf/pcf.hpp"

namespace fs = std::filesystem;
using namespace pcf;

namespace {

struct Run {
  Config cfg;
  fs::path out;
  int jobs = 1;
  bool dump = false;
};

std::ofstream open_out(const Run& r, const std::string& name) {
  std::ofstream os(r.out / name);
  if (!os) throw std::runtime_error("cannot write " + (r.out / name).string());
  return os;
}

void write_json(const Run& r, const std::string& name, const json& j) { open_out(r, name) << j.dump(2) << '\n'; }

ThetaGrid sweep_grid(const SolverConfig& s) {
  return s.path ? symmetry_path(s.path_steps) : uniform_grid(s.grid1, s.grid2);
}

FourierField combine(const FieldSystem& sys, const std::vector<Eigen::Index>& idx, const CMat& vecs, Eigen::Index col) {
  FourierField u(sys.lattice.theta, sys.options.cutoff, 2);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    FourierField f = field_of(sys, idx[k]);
    u.coeffs += vecs(static_cast<Eigen::Index>(k), col) * f.coeffs;
  }
  return u;
}

// Spectrum at one theta, optionally dumping the lowest mode.
std::vector<double> solve_at(const Run& r, const BlochTheta& t, std::size_t i) {
  const SolverConfig& s = r.cfg.solver;
  const CellSpec& cell = r.cfg.cell;
  Spectrum sp;
  FourierField mode;
  if (s.kind == "limit") {
    ConstrainedBasis b = build_V_basis(t, cell, s.resolution.cutoff, s.resolution.source_cutoff,
                                       s.resolution.gram_threshold);
    sp = solve_limit_on(b, cell, s.k_max);
    if (r.dump) mode = combine(*b.system, b.fields, sp.eigenvectors, 0);
  } else {
    FieldSystem sys = build_field_system(Lattice{t, {1, 1}}, cell.geometry, detail::epsilon_options(s.resolution));
    std::vector<Eigen::Index> idx = sys.select(true, true);
    sp = solve_epsilon_on(sys, idx, s.eps, cell, s.k_max, s.resolution);
    if (r.dump) mode = combine(sys, idx, sp.eigenvectors, 0);
  }
  if (r.dump) {
    std::ofstream os(r.out / "fields" / ("mode1_theta" + std::to_string(i) + ".csv"));
    write_csv(os, mode);
  }
  return sp.eigenvalues;
}

BandStructure run_sweep(const Run& r) {
  if (r.dump) fs::create_directories(r.out / "fields");
  const ThetaGrid g = sweep_grid(r.cfg.solver);
  BandStructure bs;
  bs.solver = r.cfg.solver.kind;
  bs.grid = g;
  bs.values.resize(g.points.size());
  parallel_for(g.points.size(), r.jobs, [&](std::size_t i) { bs.values[i] = solve_at(r, g.points[i], i); });
  compute_extents(bs);
  return bs;
}

void cmd_bands(const Run& r) {
  BandStructure bs = run_sweep(r);
  auto os = open_out(r, "bands.csv");
  write_bands_csv(os, bs);
  write_json(r, "bands.json", to_json(bs));
}

void cmd_gaps(const Run& r) {
  BandStructure bs = run_sweep(r);
  std::vector<GapRecord> gaps = detect_gaps(bs);
  auto os = open_out(r, "gaps.csv");
  write_gaps_csv(os, gaps);
  const auto& el = r.cfg.study.eps_list;
  double lo = *std::min_element(el.begin(), el.end()), hi = *std::max_element(el.begin(), el.end());
  std::vector<OmegaKRegion> regions;
  for (const GapRecord& g : gaps) regions.push_back(map_gap_to_omega_k(g, r.cfg.cell, lo, hi));
  auto ok = open_out(r, "omega_k.csv");
  write_omega_k_csv(ok, regions);
  json j = to_json(bs);
  j["eps_range"] = {lo, hi};
  write_json(r, "gaps.json", j);
}

void cmd_converge(const Run& r) {
  const SolverConfig& s = r.cfg.solver;
  ConvergenceStudy st = convergence_study(r.cfg.cell, sweep_grid(s), r.cfg.study.eps_list,
                                          static_cast<std::size_t>(s.k_max), s.resolution, r.cfg.study.window, r.jobs);
  auto os = open_out(r, "hausdorff.csv");
  write_hausdorff_csv(os, st);
  json eps = json::array();
  for (std::size_t e = 0; e < st.eps.size(); ++e)
    eps.push_back({{"eps", st.eps[e]}, {"hausdorff", st.distances[e]}, {"bands", to_json(st.eps_bands[e])}});
  write_json(r, "converge.json",
             {{"window", st.window}, {"k_max", st.k_max}, {"limit", to_json(st.limit)}, {"epsilon", eps}});
}

void cmd_slab1d(const Run& r) {
  const auto* slab = std::get_if<Slab>(&r.cfg.cell.geometry);
  if (!slab) throw ConfigError("geometry.type", "slab1d requires a slab geometry");
  SlabProblem p{slab->a, slab->b, r.cfg.cell.eps0, r.cfg.cell.eps1};
  std::vector<std::string> warnings;
  BandStructure bs = slab_band_structure(p, r.cfg.study.slab.theta_points, r.cfg.study.slab.trace, r.jobs, &warnings);
  std::vector<GapRecord> gaps = detect_gaps(bs);
  auto os = open_out(r, "slab_bands.csv");
  write_slab_csv(os, bs);
  auto og = open_out(r, "slab_gaps.csv");
  write_slab_gaps_csv(og, gaps);
  json j = to_json(bs);
  j["warnings"] = warnings;
  write_json(r, "slab1d.json", j);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void cmd_green(const Run& r) {
  const GreenConfig& g = r.cfg.study.green;
  auto og = open_out(r, "green.csv");
  auto od = open_out(r, "derivative.csv");
  auto oi = open_out(r, "disc.csv");
  og << "theta1,theta2,k,g0,error\n";
  od << "theta1,theta2,k,finite_difference,spectral_sum,tail_bound\n";
  oi << "delta,theta1,theta2,lhs,rhs,relative_difference\n";
  json j = {{"g0", json::array()}, {"derivative", json::array()}, {"disc", json::array()}};
  for (const BlochTheta& t : g.thetas) {
    for (double k : g.ks) {
      GreenConstant c = green_g0(t, k, g.resolution);
      og << fmt(t[0]) << ',' << fmt(t[1]) << ',' << fmt(k) << ',' << fmt(c.value) << ',' << fmt(c.error) << '\n';
      j["g0"].push_back(to_json(c));
      if (k + g.h < spectrum_bottom(t)) {
        DerivativeIdentity d = green_derivative_identity(t, k, g.h, g.resolution);
        od << fmt(t[0]) << ',' << fmt(t[1]) << ',' << fmt(k) << ',' << fmt(d.finite_difference) << ','
           << fmt(d.spectral_sum) << ',' << fmt(d.tail_bound) << '\n';
        j["derivative"].push_back({{"theta", to_json(t)}, {"k", k}, {"finite_difference", d.finite_difference},
                                   {"spectral_sum", d.spectral_sum}, {"tail_bound", d.tail_bound},
                                   {"partial_sums", d.partial_sums}});
      }
    }
    for (double delta : g.deltas) {
      DiscIntegral d = disc_integral_u(delta, t, g.disc_cutoff, g.resolution);
      double rel = std::abs(d.lhs - d.rhs) / std::abs(d.rhs);
      oi << fmt(delta) << ',' << fmt(t[0]) << ',' << fmt(t[1]) << ',' << fmt(d.lhs) << ',' << fmt(d.rhs) << ','
         << fmt(rel) << '\n';
      j["disc"].push_back({{"delta", delta}, {"theta", to_json(t)}, {"lhs", d.lhs}, {"rhs", d.rhs}});
    }
  }
  write_json(r, "green.json", j);
}

void cmd_arrow(const Run& r) {
  const ArrowConfig& a = r.cfg.study.arrow;
  const auto* disc = std::get_if<Disc>(&r.cfg.cell.geometry);
  if (!disc) throw ConfigError("geometry.type", "arrow requires a disc geometry");
  ThetaGrid grid = uniform_grid(a.grid, a.grid);
  auto os = open_out(r, "arrow.csv");
  json reports = json::array();
  bool header = true;
  for (double delta : a.deltas) {
    CellSpec cell = r.cfg.cell;
    cell.geometry = Disc{delta, disc->center};
    ArrowOptions opt;
    opt.cutoff = a.cutoff;
    opt.limit = r.cfg.solver.resolution;
    ArrowBoundsReport rep = arrow_bounds(cell, grid.points, opt);
    std::ostringstream tmp;
    write_arrow_csv(tmp, rep);
    std::string body = tmp.str();
    if (!header) body = body.substr(body.find('\n') + 1);
    header = false;
    os << body;
    json j = to_json(rep);
    if (a.direct_sweep) {
      BandStructure bs = sweep("limit", grid, limit_solver(cell, std::max(3, r.cfg.solver.k_max), r.cfg.solver.resolution),
                               r.jobs);
      j["direct"] = to_json(bs);
    }
    reports.push_back(j);
  }
  write_json(r, "arrow.json", reports);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structures of high-contrast photonic-crystal-fibre cladding"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  int jobs = 1;
  bool dump = false;
  const std::vector<std::pair<std::string, std::string>> names = {
      {"bands", "limit or epsilon band structure over a theta grid"},
      {"gaps", "band structure, gaps and the forbidden (omega^2, k^2) region"},
      {"converge", "Hausdorff distance between epsilon and limit spectra"},
      {"slab1d", "exact one-dimensional multilayer bands"},
      {"green", "regularised Green's-function constant and its identities"},
      {"arrow", "ARROW band-gap bounds for small discs"}};
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--dump-fields", dump, "write Fourier coefficients of the lowest mode per theta");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  Run run;
  try {
    run.cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  run.out = out_dir.empty() ? fs::path(run.cfg.out_dir) : fs::path(out_dir);
  run.jobs = jobs;
  run.dump = dump;
  try {
    fs::create_directories(run.out);
    if (cmd == "bands") cmd_bands(run);
    else if (cmd == "gaps") cmd_gaps(run);
    else if (cmd == "converge") cmd_converge(run);
    else if (cmd == "slab1d") cmd_slab1d(run);
    else if (cmd == "green") cmd_green(run);
    else if (cmd == "arrow") cmd_arrow(run);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 1;
  }
  std::cout << cmd << ": wrote " << run.out.string() << '\n';
  return 0;
}
