#include "tammes/planar.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace tammes {

namespace {

int index_in(const std::vector<int>& v, int x) {
  const auto it = std::find(v.begin(), v.end(), x);
  return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

}  // namespace

PlanarGraph PlanarGraph::from_rotation(std::vector<std::vector<int>> rotation,
                                       std::vector<std::pair<int, int>> isolated) {
  PlanarGraph g;
  const int n = static_cast<int>(rotation.size());
  g.rotation_ = std::move(rotation);
  int edge_ends = 0, live = 0;
  for (int v = 0; v < n; ++v) {
    const auto& r = g.rotation_[v];
    std::set<int> seen;
    for (int u : r) {
      if (u < 0 || u >= n || u == v) throw InvalidEmbedding("rotation references an invalid vertex");
      if (!seen.insert(u).second) throw InvalidEmbedding("multiple edge in rotation");
      if (index_in(g.rotation_[u], v) < 0) throw InvalidEmbedding("rotation system is not symmetric");
    }
    edge_ends += static_cast<int>(r.size());
    if (!r.empty()) ++live;
  }
  if (edge_ends == 0) throw InvalidEmbedding("graph has no edges");

  // Trace faces.
  g.dart_face_.assign(n, {});
  for (int v = 0; v < n; ++v) g.dart_face_[v].assign(g.rotation_[v].size(), {-1, -1});
  for (int v = 0; v < n; ++v) {
    for (std::size_t k = 0; k < g.rotation_[v].size(); ++k) {
      if (g.dart_face_[v][k].first >= 0) continue;
      const int f = static_cast<int>(g.faces_.size());
      std::vector<int> cycle;
      int a = v, i = static_cast<int>(k);
      while (g.dart_face_[a][i].first < 0) {
        g.dart_face_[a][i] = {f, static_cast<int>(cycle.size())};
        cycle.push_back(a);
        const int b = g.rotation_[a][i];
        const int deg = static_cast<int>(g.rotation_[b].size());
        const int j = index_in(g.rotation_[b], a);
        a = b;
        i = (j + deg - 1) % deg;
      }
      if (a != v || i != static_cast<int>(k)) throw InvalidEmbedding("face tracing did not close");
      g.faces_.push_back(std::move(cycle));
    }
  }

  // Connectivity of the non-isolated part, then Euler.
  int start = 0;
  while (g.rotation_[start].empty()) ++start;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  int reached = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++reached;
    for (int u : g.rotation_[v])
      if (!seen[u]) seen[u] = 1, stack.push_back(u);
  }
  if (reached != live) throw InvalidEmbedding("graph is not connected");
  const int e = edge_ends / 2;
  if (live - e + static_cast<int>(g.faces_.size()) != 2) throw InvalidEmbedding("rotation system is not planar");

  for (auto [v, f] : isolated) {
    if (v < 0 || v >= n || !g.rotation_[v].empty()) throw InvalidEmbedding("isolated vertex has edges");
    if (f < 0 || f >= static_cast<int>(g.faces_.size())) throw InvalidEmbedding("isolated vertex face out of range");
  }
  std::sort(isolated.begin(), isolated.end());
  g.isolated_ = std::move(isolated);
  return g;
}

PlanarGraph PlanarGraph::from_faces(int n, const std::vector<std::vector<int>>& faces,
                                    std::vector<std::pair<int, int>> isolated) {
  // Consecutive u, v, w on a face give succ_v(w) = u.
  std::vector<std::map<int, int>> succ(static_cast<std::size_t>(n));
  for (const auto& f : faces) {
    const std::size_t m = f.size();
    if (m < 3) throw InvalidEmbedding("face with fewer than 3 vertices");
    for (std::size_t t = 0; t < m; ++t) {
      const int u = f[(t + m - 1) % m], v = f[t], w = f[(t + 1) % m];
      if (v < 0 || v >= n) throw InvalidEmbedding("face references an invalid vertex");
      if (!succ[v].emplace(w, u).second) throw InvalidEmbedding("face list is inconsistent");
    }
  }
  std::vector<std::vector<int>> rot(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    if (succ[v].empty()) continue;
    int w = succ[v].begin()->first;
    for (std::size_t k = 0; k < succ[v].size(); ++k) {
      rot[v].push_back(w);
      const auto it = succ[v].find(w);
      if (it == succ[v].end()) throw InvalidEmbedding("face list does not close around a vertex");
      w = it->second;
    }
    if (w != rot[v].front()) throw InvalidEmbedding("face list does not close around a vertex");
  }
  return from_rotation(std::move(rot), std::move(isolated));
}

int PlanarGraph::num_edges() const {
  int s = 0;
  for (const auto& r : rotation_) s += static_cast<int>(r.size());
  return s / 2;
}

std::vector<std::pair<int, int>> PlanarGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int v = 0; v < n(); ++v)
    for (int u : rotation_[v])
      if (v < u) out.emplace_back(v, u);
  std::sort(out.begin(), out.end());
  return out;
}

bool PlanarGraph::has_edge(int a, int b) const { return index_in(rotation_[a], b) >= 0; }

int PlanarGraph::count_faces_of_size(int m) const {
  return static_cast<int>(std::count_if(faces_.begin(), faces_.end(),
                                        [m](const auto& f) { return static_cast<int>(f.size()) == m; }));
}

std::pair<int, int> PlanarGraph::corner(int v, int k) const { return dart_face_[v][k]; }

int PlanarGraph::dart_face(int a, int b) const {
  const int k = index_in(rotation_[a], b);
  if (k < 0) throw std::out_of_range("dart_face: not an edge");
  return dart_face_[a][k].first;
}

PlanarGraph PlanarGraph::mirrored() const {
  auto rot = rotation_;
  for (auto& r : rot) std::reverse(r.begin(), r.end());
  PlanarGraph tmp = from_rotation(rot);
  std::vector<std::pair<int, int>> iso;
  for (auto [v, f] : isolated_) {
    const auto& face = faces_[f];
    iso.emplace_back(v, tmp.dart_face(face[1], face[0]));
  }
  return from_rotation(std::move(rot), std::move(iso));
}

PlanarGraph PlanarGraph::without_isolated() const {
  std::vector<int> perm(n(), -1);
  int next = 0;
  for (int v = 0; v < n(); ++v)
    if (!rotation_[v].empty()) perm[v] = next++;
  std::vector<std::vector<int>> rot(next);
  for (int v = 0; v < n(); ++v) {
    if (perm[v] < 0) continue;
    for (int u : rotation_[v]) rot[perm[v]].push_back(perm[u]);
  }
  return from_rotation(std::move(rot));
}

PlanarGraph PlanarGraph::remove_edges(const std::vector<std::pair<int, int>>& del) const {
  auto rot = rotation_;
  for (auto [a, b] : del) {
    if (!has_edge(a, b)) throw std::out_of_range("remove_edges: not an edge");
    rot[a].erase(std::find(rot[a].begin(), rot[a].end(), b));
    rot[b].erase(std::find(rot[b].begin(), rot[b].end(), a));
  }
  return from_rotation(std::move(rot)).without_isolated();
}

PlanarGraph PlanarGraph::relabeled(const std::vector<int>& perm) const {
  std::vector<std::vector<int>> rot(n());
  for (int v = 0; v < n(); ++v)
    for (int u : rotation_[v]) rot[perm[v]].push_back(perm[u]);
  PlanarGraph tmp = from_rotation(rot);
  std::vector<std::pair<int, int>> iso;
  for (auto [v, f] : isolated_) iso.emplace_back(perm[v], tmp.dart_face(perm[faces_[f][0]], perm[faces_[f][1]]));
  return from_rotation(std::move(rot), std::move(iso));
}

// ---------------------------------------------------------------------------

PlanarCodeReader::PlanarCodeReader(std::istream& in) : in_(in) {
  const std::string header = kPlanarCodeHeader;
  std::string buf(header.size(), '\0');
  in_.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in_.gcount() != static_cast<std::streamsize>(buf.size()) || buf != header) {
    throw BadHeader("stream does not start with >>planar_code<<");
  }
}

bool PlanarCodeReader::next(PlanarGraph& g) {
  const int first = in_.get();
  if (first == std::char_traits<char>::eof()) return false;
  const int n = first;
  if (n == 0) throw UnsupportedRecord("planar_code records with more than 255 vertices are not supported");
  std::vector<std::vector<int>> rot(n);
  for (int v = 0; v < n; ++v) {
    for (;;) {
      const int b = in_.get();
      if (b == std::char_traits<char>::eof()) throw TruncatedRecord("planar_code record ends early");
      if (b == 0) break;
      if (b > n) throw NeighborOutOfRange("planar_code neighbor exceeds vertex count");
      rot[v].push_back(b - 1);
    }
    std::reverse(rot[v].begin(), rot[v].end());
  }
  g = PlanarGraph::from_rotation(std::move(rot));
  ++count_;
  return true;
}

std::vector<PlanarGraph> read_planar_code(std::istream& in) {
  PlanarCodeReader reader(in);
  std::vector<PlanarGraph> out;
  PlanarGraph g;
  while (reader.next(g)) out.push_back(g);
  return out;
}

std::vector<PlanarGraph> read_planar_code_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_planar_code(in);
}

void write_planar_code_header(std::ostream& out) { out << kPlanarCodeHeader; }

void write_planar_code(std::ostream& out, const PlanarGraph& g) {
  if (g.n() > 255) throw UnsupportedRecord("planar_code writer supports at most 255 vertices");
  out.put(static_cast<char>(g.n()));
  for (int v = 0; v < g.n(); ++v) {
    const auto& r = g.rotation(v);
    for (auto it = r.rbegin(); it != r.rend(); ++it) out.put(static_cast<char>(*it + 1));
    out.put('\0');
  }
}

void write_planar_code_file(const std::filesystem::path& path, const std::vector<PlanarGraph>& graphs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  write_planar_code_header(out);
  for (const auto& g : graphs) write_planar_code(out, g);
}

// ---------------------------------------------------------------------------
// Canonical form: BFS codes from every dart in both orientations.

namespace {

struct CodeBuilder {
  const PlanarGraph& g;
  std::vector<int> label, queue, first;
  std::vector<int> best;
  bool have_best = false;

  explicit CodeBuilder(const PlanarGraph& graph) : g(graph), label(graph.n()), first(graph.n()) {}

  // Builds the code rooted at the dart root -> rotation(root)[root_slot] and
  // compares it with `best`: +1 aborts early when larger, 0 equal, -1 smaller
  // (or no best yet).
  int build(int root, int root_slot, bool ccw, std::vector<int>& out) {
    std::fill(label.begin(), label.end(), 0);
    queue.clear();
    out.clear();
    label[root] = 1;
    first[root] = root_slot;
    queue.push_back(root);
    int next = 2;
    int cmp = have_best ? 0 : -1;
    auto emit = [&](int value) {
      out.push_back(value);
      if (cmp != 0) return false;
      const int b = best[out.size() - 1];
      if (value > b) return true;
      if (value < b) cmp = -1;
      return false;
    };
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int x = queue[q];
      const auto& r = g.rotation(x);
      const int deg = static_cast<int>(r.size());
      for (int t = 0; t < deg; ++t) {
        const int k = ccw ? (first[x] + t) % deg : (first[x] - t + deg) % deg;
        const int y = r[k];
        if (label[y] == 0) {
          label[y] = next++;
          first[y] = index_in(g.rotation(y), x);
          queue.push_back(y);
        }
        if (emit(label[y])) return 1;
      }
      if (emit(0)) return 1;
    }
    return cmp;
  }
};

std::vector<int> min_rotation(std::vector<int> c) {
  std::vector<int> best = c;
  for (std::size_t s = 1; s < c.size(); ++s) {
    std::rotate(c.begin(), c.begin() + 1, c.end());
    if (c < best) best = c;
  }
  return best;
}

std::vector<int> isolated_part(const PlanarGraph& g, const std::vector<int>& label, bool ccw) {
  std::vector<std::vector<int>> desc;
  for (auto [v, f] : g.isolated()) {
    std::vector<int> c;
    for (int u : g.faces()[f]) c.push_back(label[u]);
    if (!ccw) std::reverse(c.begin(), c.end());
    desc.push_back(min_rotation(std::move(c)));
  }
  std::sort(desc.begin(), desc.end());
  std::vector<int> out;
  for (const auto& d : desc) {
    out.push_back(static_cast<int>(d.size()));
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

std::string to_hex(const std::vector<int>& values) {
  const bool wide = std::any_of(values.begin(), values.end(), [](int v) { return v > 255; });
  static const char* digits = "0123456789abcdef";
  std::string s = wide ? "w" : "";
  for (int v : values) {
    if (wide) {
      s.push_back(digits[(v >> 12) & 15]);
      s.push_back(digits[(v >> 8) & 15]);
    }
    s.push_back(digits[(v >> 4) & 15]);
    s.push_back(digits[v & 15]);
  }
  return s;
}

}  // namespace

std::string canonical_form(const PlanarGraph& g) {
  CodeBuilder cb(g);
  std::vector<int> code, iso_best;
  bool have_iso = false;
  for (int v = 0; v < g.n(); ++v) {
    for (int k = 0; k < g.degree(v); ++k) {
      for (bool ccw : {true, false}) {
        const int c = cb.build(v, k, ccw, code);
        if (c > 0) continue;
        if (g.isolated().empty()) {
          if (c < 0) cb.best = code, cb.have_best = true;
          continue;
        }
        auto iso = isolated_part(g, cb.label, ccw);
        if (c < 0 || !have_iso || iso < iso_best) {
          if (c < 0) cb.best = code, cb.have_best = true;
          iso_best = std::move(iso);
          have_iso = true;
        }
      }
    }
  }
  int live = 0;
  for (int v = 0; v < g.n(); ++v) live += g.degree(v) > 0;
  std::vector<int> all{g.n(), live, static_cast<int>(g.isolated().size())};
  all.insert(all.end(), cb.best.begin(), cb.best.end());
  all.insert(all.end(), iso_best.begin(), iso_best.end());
  return to_hex(all);
}

}  // namespace tammes
