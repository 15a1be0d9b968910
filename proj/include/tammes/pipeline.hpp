#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tammes/embed.hpp"
#include "tammes/maximality.hpp"
#include "tammes/prune.hpp"

// Record-stream stages. Every stage reads newline-delimited JSON records and
// writes one record per input record, in input order; records eliminated by
// an earlier stage pass through unchanged, so the final file lists every
// graph of the census exactly once.
namespace tammes::pipeline {

inline constexpr char kRecordSchema[] = "tammes.record/1";

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Window {
  double d_lo = 0.0, d_hi = 0.0;
};

/// [psi(best) - slack, fejes_toth_bound(n)]: any maximal configuration has
/// minimal distance at least that of the best arrangement found.
Window auto_window(const Configuration& best, double slack = 1e-9);

struct EnumerateStats {
  long input = 0;             // graphs read or generated before filtering
  long accepted = 0;          // records written
  long triangles_quads = 0;   // faces of size 3 and 4 only
  long pentagons = 0;         // at least one pentagon, no hexagon
  long hexagons = 0;          // at least one hexagon, no isolated vertex
  long isolated = 0;          // with isolated vertices
};

/// Internal census on n points: every graph with n - k vertices (k >= 0)
/// from generate_small, augmented with k isolated vertices, filtered and
/// deduplicated, sorted by canonical form.
EnumerateStats enumerate_generate(int n, std::ostream& out);

/// Streams a planar_code file: graphs on n vertices are filtered, graphs on
/// fewer vertices are augmented with isolated vertices first. No state is
/// kept across input graphs, so the input should be isomorph-free.
EnumerateStats enumerate_planar_code(int n, std::istream& in, std::ostream& out);

struct StageStats {
  long records = 0;
  long processed = 0;   // records this stage acted on
  long passed = 0;      // of those, records that moved on
  long eliminated = 0;  // of those, records eliminated here
};

StageStats prune_stage(std::istream& in, std::ostream& out, const PruneOptions& opt, int threads = 1);
StageStats embed_stage(std::istream& in, std::ostream& out, const EmbedOptions& opt, int threads = 1);
StageStats verify_stage(std::istream& in, std::ostream& out, const VerifyOptions& opt, int threads = 1);

/// Verdicts for graphs given directly (e.g. fixtures) against a fixed
/// configuration whose labels they share.
StageStats verify_planar_code(std::istream& in, const Configuration& c, std::ostream& out,
                              const VerifyOptions& opt);

struct Candidate {
  std::string canonical;
  double psi = 0.0;
  std::string method;
};

struct Report {
  long total = 0;
  std::map<std::string, long> eliminated_at;  // stage -> count
  std::map<std::string, long> methods;        // verdict method -> count
  std::vector<Candidate> candidates;
};

/// Aggregates a final record file; optionally writes a CSV of
/// (canonical, stage eliminated, method) with one line per record.
Report report(std::istream& in, std::ostream* csv = nullptr);
void print_report(const Report& r, std::ostream& out);

std::string graph_record(const PlanarGraph& g);   // a fresh "candidate" record line
PlanarGraph graph_from_record(const std::string& line);

/// Writes `<output>.meta.json` next to an output file.
void write_meta(const std::filesystem::path& output, const std::string& command,
                const std::vector<std::pair<std::string, std::string>>& params);

}  // namespace tammes::pipeline
