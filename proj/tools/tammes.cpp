// Command-line driver for the contact-graph pipeline.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "tammes/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tammes;
using pipeline::IoError;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) throw IoError("cannot open " + path);
  return f;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  return f;
}

std::string num(double x) { return nlohmann::json(x).dump(); }

struct WindowSpec {
  std::string text = "auto";
  int n = 0;
  int restarts = 20;
  std::uint64_t seed = 1;
  int threads = 1;
};

// "auto" runs the optimizer; otherwise "lo,hi" in radians.
pipeline::Window resolve_window(const WindowSpec& w, Configuration* best = nullptr) {
  if (w.text == "auto") {
    if (w.n < 2) throw UsageError("--d-window auto needs --n");
    OptimizeOptions o;
    o.restarts = w.restarts;
    o.seed = w.seed;
    o.threads = w.threads;
    const auto res = tammes_optimize(w.n, o);
    if (best) *best = res.best;
    return pipeline::auto_window(res.best);
  }
  pipeline::Window win;
  char comma = 0;
  std::istringstream in(w.text);
  if (!(in >> win.d_lo >> comma >> win.d_hi) || comma != ',' || !(win.d_lo < win.d_hi))
    throw UsageError("--d-window expects auto or lo,hi with lo < hi");
  return win;
}

void print_enumerate(const pipeline::EnumerateStats& s) {
  std::cout << "input graphs: " << s.input << "\naccepted: " << s.accepted
            << "\n  triangles and quadrilaterals only: " << s.triangles_quads
            << "\n  with a pentagon (no hexagon): " << s.pentagons
            << "\n  with a hexagon (no isolated vertex): " << s.hexagons
            << "\n  with isolated vertices: " << s.isolated << '\n';
}

void print_stage(const char* name, const pipeline::StageStats& s) {
  std::cout << name << ": records " << s.records << ", processed " << s.processed << ", passed " << s.passed
            << ", eliminated " << s.eliminated << '\n';
}

struct Common {
  int n = 0;
  bool generate = false;
  std::string planar_code;
  std::string in, out, out_dir, config, csv;
  WindowSpec window;
  int max_depth = PruneOptions{}.max_depth;
  long max_nodes = PruneOptions{}.max_nodes;
  int threads = 1;
  std::uint64_t seed = 1;
  int restarts = 200;
  double pad = VerifyOptions{}.pad;
};

PruneOptions prune_options(const Common& c, const pipeline::Window& w) {
  PruneOptions o;
  o.d_lo = w.d_lo;
  o.d_hi = w.d_hi;
  o.max_depth = c.max_depth;
  o.max_nodes = c.max_nodes;
  if (c.max_depth < 1) throw UsageError("--max-depth must be at least 1");
  return o;
}

EmbedOptions embed_options(const Common& c) {
  EmbedOptions o;
  o.seed = c.seed;
  return o;
}

pipeline::EnumerateStats run_enumerate(const Common& c, std::ostream& out) {
  if (c.generate == !c.planar_code.empty()) throw UsageError("give exactly one of --generate and --planar-code");
  if (c.generate) return pipeline::enumerate_generate(c.n, out);
  auto in = open_in(c.planar_code, true);
  return pipeline::enumerate_planar_code(c.n, in, out);
}

int cmd_enumerate(const Common& c) {
  if (c.generate == !c.planar_code.empty()) throw UsageError("give exactly one of --generate and --planar-code");
  auto out = open_out(c.out);
  print_enumerate(run_enumerate(c, out));
  pipeline::write_meta(c.out, "enumerate",
                       {{"n", std::to_string(c.n)}, {"source", c.generate ? "generate" : c.planar_code}});
  return 0;
}

int cmd_prune(Common c) {
  c.window.n = c.n;
  c.window.seed = c.seed;
  c.window.threads = c.threads;
  const auto win = resolve_window(c.window);
  auto in = open_in(c.in);
  auto out = open_out(c.out);
  print_stage("prune", pipeline::prune_stage(in, out, prune_options(c, win), c.threads));
  pipeline::write_meta(c.out, "prune",
                       {{"d_lo", num(win.d_lo)},
                        {"d_hi", num(win.d_hi)},
                        {"max_depth", std::to_string(c.max_depth)},
                        {"max_nodes", std::to_string(c.max_nodes)},
                        {"branching", "widest relative width, lowest id on ties, midpoint split"}});
  return 0;
}

int cmd_embed(const Common& c) {
  auto in = open_in(c.in);
  auto out = open_out(c.out);
  print_stage("embed", pipeline::embed_stage(in, out, embed_options(c), c.threads));
  pipeline::write_meta(c.out, "embed", {{"seed", std::to_string(c.seed)}, {"solver", "projected Levenberg-Marquardt"}});
  return 0;
}

int cmd_verify(const Common& c) {
  VerifyOptions vo;
  vo.pad = c.pad;
  auto out = open_out(c.out);
  if (!c.planar_code.empty()) {
    if (c.config.empty()) throw UsageError("--planar-code needs --config");
    const auto cfg = Configuration::load(c.config);
    auto in = open_in(c.planar_code, true);
    print_stage("verify-maximal", pipeline::verify_planar_code(in, cfg, out, vo));
  } else {
    if (c.in.empty()) throw UsageError("give --in or --planar-code");
    auto in = open_in(c.in);
    print_stage("verify-maximal", pipeline::verify_stage(in, out, vo, c.threads));
  }
  pipeline::write_meta(c.out, "verify-maximal", {{"pad", num(c.pad)}});
  return 0;
}

int cmd_optimize(const Common& c) {
  OptimizeOptions o;
  o.restarts = c.restarts;
  o.seed = c.seed;
  o.threads = c.threads;
  const auto res = tammes_optimize(c.n, o);
  res.best.save(c.out);
  if (!c.csv.empty()) {
    auto csv = open_out(c.csv);
    csv << "restart,psi,best_psi\n";
    double best = 0.0;
    for (std::size_t r = 0; r < res.restart_psi.size(); ++r) {
      best = std::max(best, res.restart_psi[r]);
      csv << r << ',' << num(res.restart_psi[r]) << ',' << num(best) << '\n';
    }
  }
  std::cout << "n=" << c.n << " psi=" << num(res.best.psi()) << " rad (" << geom::degrees(res.best.psi())
            << " deg), best restart " << res.best_restart << " of " << c.restarts << '\n';
  pipeline::write_meta(c.out, "optimize",
                       {{"n", std::to_string(c.n)},
                        {"restarts", std::to_string(c.restarts)},
                        {"seed", std::to_string(c.seed)},
                        {"active_threshold", num(o.active)}});
  return 0;
}

int cmd_report(const Common& c) {
  auto in = open_in(c.in);
  std::ofstream csv;
  if (!c.csv.empty()) csv = open_out(c.csv);
  const auto r = pipeline::report(in, c.csv.empty() ? nullptr : &csv);
  pipeline::print_report(r, std::cout);
  return 0;
}

int cmd_pipeline(Common c) {
  if (c.out_dir.empty()) throw UsageError("--out-dir is required");
  const fs::path dir = c.out_dir;
  fs::create_directories(dir);

  c.window.n = c.n;
  c.window.seed = c.seed;
  c.window.threads = c.threads;
  Configuration best;
  const auto win = resolve_window(c.window, &best);
  if (c.window.text == "auto") {
    best.save(dir / "optimum.json");
    std::cout << "optimizer: psi=" << num(best.psi()) << " rad\n";
  }
  std::cout << "window: [" << num(win.d_lo) << ", " << num(win.d_hi) << "]\n";

  {
    auto out = open_out(dir / "graphs.ndjson");
    print_enumerate(run_enumerate(c, out));
  }
  {
    auto in = open_in((dir / "graphs.ndjson").string());
    auto out = open_out(dir / "pruned.ndjson");
    print_stage("prune", pipeline::prune_stage(in, out, prune_options(c, win), c.threads));
  }
  {
    auto in = open_in((dir / "pruned.ndjson").string());
    auto out = open_out(dir / "embedded.ndjson");
    print_stage("embed", pipeline::embed_stage(in, out, embed_options(c), c.threads));
  }
  {
    VerifyOptions vo;
    vo.pad = c.pad;
    auto in = open_in((dir / "embedded.ndjson").string());
    auto out = open_out(dir / "verified.ndjson");
    print_stage("verify-maximal", pipeline::verify_stage(in, out, vo, c.threads));
  }
  auto in = open_in((dir / "verified.ndjson").string());
  auto csv = open_out(dir / "report.csv");
  const auto r = pipeline::report(in, &csv);
  pipeline::print_report(r, std::cout);
  pipeline::write_meta(dir / "verified.ndjson", "pipeline",
                       {{"n", std::to_string(c.n)},
                        {"d_lo", num(win.d_lo)},
                        {"d_hi", num(win.d_hi)},
                        {"max_depth", std::to_string(c.max_depth)},
                        {"max_nodes", std::to_string(c.max_nodes)},
                        {"seed", std::to_string(c.seed)},
                        {"pad", num(c.pad)}});
  return 0;
}

int cmd_gamma14(const Common& c) {
  const auto cfg = Configuration::load(c.config);
  const auto variants = gamma14_variants(planar_contact_graph(cfg));
  const fs::path dir = c.out_dir.empty() ? fs::path(".") : fs::path(c.out_dir);
  fs::create_directories(dir);
  for (const auto& [name, g] : variants) {
    const fs::path p = dir / ("gamma14_" + name + ".pc");
    write_planar_code_file(p, {g});
    std::cout << p.string() << ": " << g.num_edges() << " edges\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact graphs of optimal spherical point arrangements"};
  app.require_subcommand(1);
  Common c;

  auto add_n = [&](CLI::App* s, bool required = true) {
    auto* o = s->add_option("--n", c.n, "number of points")->check(CLI::Range(2, 1000));
    if (required) o->required();
  };
  auto add_source = [&](CLI::App* s) {
    s->add_flag("--generate", c.generate, "generate graphs internally (n <= 12)");
    s->add_option("--planar-code", c.planar_code, "planar_code input file");
  };
  auto add_prune = [&](CLI::App* s) {
    s->add_option("--d-window", c.window.text, "auto or lo,hi (radians)");
    s->add_option("--max-depth", c.max_depth, "maximum number of box splits per branch");
    s->add_option("--max-nodes", c.max_nodes, "box budget per graph");
    s->add_option("--restarts", c.window.restarts, "optimizer restarts for --d-window auto");
  };
  auto add_threads = [&](CLI::App* s) { s->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber); };

  auto* en = app.add_subcommand("enumerate", "list candidate graphs");
  add_n(en);
  add_source(en);
  en->add_option("--out", c.out, "record file")->required();

  auto* pr = app.add_subcommand("prune", "branch-and-prune on angle systems");
  add_n(pr, false);
  add_prune(pr);
  add_threads(pr);
  pr->add_option("--seed", c.seed, "optimizer seed for --d-window auto");
  pr->add_option("--in", c.in)->required();
  pr->add_option("--out", c.out)->required();

  auto* em = app.add_subcommand("embed", "solve surviving graphs for point configurations");
  add_threads(em);
  em->add_option("--seed", c.seed, "seed for perturbed starts");
  em->add_option("--in", c.in)->required();
  em->add_option("--out", c.out)->required();

  auto* ve = app.add_subcommand("verify-maximal", "maximality verdicts");
  add_threads(ve);
  ve->add_option("--in", c.in, "embedded records");
  ve->add_option("--planar-code", c.planar_code, "graphs sharing the labels of --config");
  ve->add_option("--config", c.config, "configuration JSON");
  ve->add_option("--pad", c.pad, "tangent enclosure pad")->check(CLI::NonNegativeNumber);
  ve->add_option("--out", c.out)->required();

  auto* op = app.add_subcommand("optimize", "multi-start max-min optimizer");
  add_n(op);
  add_threads(op);
  op->add_option("--restarts", c.restarts)->check(CLI::PositiveNumber);
  op->add_option("--seed", c.seed);
  op->add_option("--out", c.out, "configuration JSON")->required();
  op->add_option("--csv", c.csv, "per-restart psi table");

  auto* re = app.add_subcommand("report", "summarize a record file");
  re->add_option("--in", c.in)->required();
  re->add_option("--csv", c.csv, "per-graph table");

  auto* pi = app.add_subcommand("pipeline", "enumerate, prune, embed, verify and report");
  add_n(pi);
  add_source(pi);
  add_prune(pi);
  add_threads(pi);
  pi->add_option("--seed", c.seed);
  pi->add_option("--pad", c.pad)->check(CLI::NonNegativeNumber);
  pi->add_option("--out-dir", c.out_dir)->required();

  auto* ga = app.add_subcommand("gamma14", "write the fourteen-point graph variants as planar_code");
  ga->add_option("--config", c.config, "fourteen-point configuration JSON")->required();
  ga->add_option("--out-dir", c.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*en) return cmd_enumerate(c);
    if (*pr) return cmd_prune(c);
    if (*em) return cmd_embed(c);
    if (*ve) return cmd_verify(c);
    if (*op) return cmd_optimize(c);
    if (*re) return cmd_report(c);
    if (*pi) return cmd_pipeline(c);
    if (*ga) return cmd_gamma14(c);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TooLarge& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const pipeline::SchemaError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const BadHeader& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const TruncatedRecord& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NeighborOutOfRange& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const UnsupportedRecord& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidEmbedding& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
