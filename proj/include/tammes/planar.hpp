#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tammes {

class InvalidEmbedding : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Combinatorial plane graph given by a rotation system. rotation[v] lists
/// the neighbors of v counterclockwise seen from outside the sphere. Faces
/// are traced with the interior on the left: after the dart u->v comes
/// v->w where w precedes u in the rotation of v. Isolated vertices have an
/// empty rotation and are assigned to a face of the remaining graph.
class PlanarGraph {
 public:
  PlanarGraph() = default;

  /// Validates symmetry and simplicity, traces faces, and checks Euler's
  /// formula on the non-isolated part (which must be connected).
  static PlanarGraph from_rotation(std::vector<std::vector<int>> rotation,
                                   std::vector<std::pair<int, int>> isolated = {});

  /// Rebuilds the rotation system from counterclockwise face cycles.
  static PlanarGraph from_faces(int n, const std::vector<std::vector<int>>& faces,
                                std::vector<std::pair<int, int>> isolated = {});

  [[nodiscard]] int n() const { return static_cast<int>(rotation_.size()); }
  [[nodiscard]] const std::vector<std::vector<int>>& rotation() const { return rotation_; }
  [[nodiscard]] const std::vector<int>& rotation(int v) const { return rotation_[static_cast<std::size_t>(v)]; }
  [[nodiscard]] const std::vector<std::vector<int>>& faces() const { return faces_; }
  [[nodiscard]] const std::vector<std::pair<int, int>>& isolated() const { return isolated_; }
  [[nodiscard]] int degree(int v) const { return static_cast<int>(rotation_[static_cast<std::size_t>(v)].size()); }
  [[nodiscard]] int num_edges() const;
  [[nodiscard]] bool is_isolated(int v) const { return rotation_[static_cast<std::size_t>(v)].empty(); }
  [[nodiscard]] std::vector<std::pair<int, int>> edges() const;  // (i < j), sorted
  [[nodiscard]] bool has_edge(int a, int b) const;
  [[nodiscard]] int count_faces_of_size(int m) const;

  /// The corner at v between consecutive rotation neighbors rotation(v)[k]
  /// and rotation(v)[k+1], as (face index, position of v in that face).
  [[nodiscard]] std::pair<int, int> corner(int v, int k) const;

  /// Face containing the dart a -> b.
  [[nodiscard]] int dart_face(int a, int b) const;

  /// Same graph with every rotation reversed.
  [[nodiscard]] PlanarGraph mirrored() const;

  /// Drops isolated vertices and relabels the rest in increasing order.
  [[nodiscard]] PlanarGraph without_isolated() const;

  /// Deletes edges; faces are recomputed. Isolated vertices are dropped.
  [[nodiscard]] PlanarGraph remove_edges(const std::vector<std::pair<int, int>>& del) const;

  /// Applies a vertex permutation: vertex v becomes perm[v].
  [[nodiscard]] PlanarGraph relabeled(const std::vector<int>& perm) const;

 private:
  std::vector<std::vector<int>> rotation_;
  std::vector<std::vector<int>> faces_;
  std::vector<std::pair<int, int>> isolated_;
  std::vector<std::vector<std::pair<int, int>>> dart_face_;  // per vertex, per rotation slot
};

// ---------------------------------------------------------------------------
// planar_code streams

class BadHeader : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class TruncatedRecord : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NeighborOutOfRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// Records with more than 255 vertices use a different encoding.
class UnsupportedRecord : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kPlanarCodeHeader[] = ">>planar_code<<";

/// Streaming reader; holds only the current record.
class PlanarCodeReader {
 public:
  explicit PlanarCodeReader(std::istream& in);
  /// Reads the next graph; false at a clean end of stream.
  bool next(PlanarGraph& g);
  [[nodiscard]] long count() const { return count_; }

 private:
  std::istream& in_;
  long count_ = 0;
};

std::vector<PlanarGraph> read_planar_code(std::istream& in);
std::vector<PlanarGraph> read_planar_code_file(const std::filesystem::path& path);

/// Writes the header once, then one record per graph. Neighbors are written
/// clockwise, as plantri does.
void write_planar_code_header(std::ostream& out);
void write_planar_code(std::ostream& out, const PlanarGraph& g);
void write_planar_code_file(const std::filesystem::path& path, const std::vector<PlanarGraph>& graphs);

// ---------------------------------------------------------------------------
// Canonical form, generation, filtering

/// Equal strings iff the graphs are isomorphic as plane graphs, allowing
/// reflections, with isolated vertices compared by the face they occupy.
/// Hex encoded.
std::string canonical_form(const PlanarGraph& g);

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All triangulations with n vertices (4 <= n <= 12), up to isomorphism and
/// reflection, sorted by canonical form.
std::vector<PlanarGraph> triangulations(int n);

struct GenerateOptions {
  int min_degree = 3;
  int max_degree = 5;
  int max_face = 6;
};

/// Isomorph-free list of 2-connected simple plane graphs on n vertices with
/// degrees and face sizes in range, sorted by canonical form. Obtained by
/// edge deletion from all triangulations with the same vertex count.
std::vector<PlanarGraph> generate_small(int n, const GenerateOptions& opt = {});

/// Degrees in {0,3,4,5} (0 only for isolated vertices), face sizes in
/// {3,...,6}, each isolated vertex in a hexagon, at most one per hexagon.
bool prop31_filter(const PlanarGraph& g);

/// One graph per k-subset of the free hexagonal faces, each hosting a new
/// isolated vertex. Empty when there are fewer than k free hexagons.
std::vector<PlanarGraph> augment_isolated(const PlanarGraph& g, int k);

/// Removes canonical duplicates, keeping the first occurrence, then sorts by
/// canonical form. Returns (canonical, graph) pairs.
std::vector<std::pair<std::string, PlanarGraph>> dedup_sorted(const std::vector<PlanarGraph>& graphs);

}  // namespace tammes
