#include <algorithm>
#include <cstdint>
#include <map>
#include <set>

#include "tammes/planar.hpp"

namespace tammes {

namespace {

constexpr int kMaxGenerate = 12;

PlanarGraph k4() { return PlanarGraph::from_faces(4, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}}); }

// Splits v into v and a new vertex x: x takes the rotation arc w_i..w_j, v
// keeps w_j..w_i, and both stay adjacent to w_i and w_j.
PlanarGraph split_vertex(const PlanarGraph& t, int v, int i, int j) {
  const int x = t.n();
  const auto& w = t.rotation(v);
  const int deg = static_cast<int>(w.size());
  std::vector<std::vector<int>> faces;
  for (const auto& f : t.faces()) {
    if (std::find(f.begin(), f.end(), v) == f.end()) faces.push_back(f);
  }
  for (int s = j; s != i; s = (s + 1) % deg) faces.push_back({v, w[s], w[(s + 1) % deg]});
  for (int s = i; s != j; s = (s + 1) % deg) faces.push_back({x, w[s], w[(s + 1) % deg]});
  faces.push_back({v, w[i], x});
  faces.push_back({v, x, w[j]});
  return PlanarGraph::from_faces(x + 1, faces);
}

// Edge-deletion search over one triangulation. Faces are merged with a
// union-find that records vertex sets, so each merge can check that the new
// face stays a simple cycle (equivalently, the graph stays 2-connected).
class DeletionSearch {
 public:
  DeletionSearch(const PlanarGraph& t, const GenerateOptions& opt, std::map<std::string, PlanarGraph>& out)
      : t_(t), opt_(opt), out_(out), edges_(t.edges()) {
    const int nf = static_cast<int>(t.faces().size());
    parent_.resize(nf);
    size_.resize(nf);
    mask_.resize(nf);
    for (int f = 0; f < nf; ++f) {
      parent_[f] = f;
      size_[f] = static_cast<int>(t.faces()[f].size());
      for (int v : t.faces()[f]) mask_[f] |= 1u << v;
    }
    deg_.resize(t.n());
    undecided_.resize(t.n());
    for (int v = 0; v < t.n(); ++v) deg_[v] = undecided_[v] = t.degree(v);
    removed_.assign(edges_.size(), 0);
  }

  void run() { recurse(0); }

 private:
  int find(int f) const {
    while (parent_[f] != f) f = parent_[f];
    return f;
  }

  bool degree_ok(int v) const {
    return deg_[v] >= opt_.min_degree && deg_[v] - undecided_[v] <= opt_.max_degree;
  }

  void recurse(std::size_t k) {
    if (k == edges_.size()) {
      emit();
      return;
    }
    const auto [a, b] = edges_[k];
    --undecided_[a];
    --undecided_[b];
    // Keep the edge.
    if (degree_ok(a) && degree_ok(b)) recurse(k + 1);
    // Delete the edge.
    const int fa = find(t_.dart_face(a, b)), fb = find(t_.dart_face(b, a));
    const std::uint32_t ends = (1u << a) | (1u << b);
    if (fa != fb && (mask_[fa] & mask_[fb]) == ends && size_[fa] + size_[fb] - 2 <= opt_.max_face &&
        deg_[a] - 1 >= opt_.min_degree && deg_[b] - 1 >= opt_.min_degree) {
      const auto [big, small] = size_[fa] >= size_[fb] ? std::pair{fa, fb} : std::pair{fb, fa};
      const std::uint32_t old_mask = mask_[big];
      const int old_size = size_[big];
      parent_[small] = big;
      mask_[big] |= mask_[small];
      size_[big] += size_[small] - 2;
      --deg_[a];
      --deg_[b];
      removed_[k] = 1;
      if (degree_ok(a) && degree_ok(b)) recurse(k + 1);
      removed_[k] = 0;
      ++deg_[a];
      ++deg_[b];
      size_[big] = old_size;
      mask_[big] = old_mask;
      parent_[small] = small;
    }
    ++undecided_[a];
    ++undecided_[b];
  }

  void emit() {
    std::vector<std::pair<int, int>> del;
    for (std::size_t k = 0; k < edges_.size(); ++k)
      if (removed_[k]) del.push_back(edges_[k]);
    for (int v = 0; v < t_.n(); ++v)
      if (deg_[v] > opt_.max_degree) return;
    PlanarGraph g = del.empty() ? t_ : t_.remove_edges(del);
    for (const auto& f : g.faces())
      if (static_cast<int>(f.size()) > opt_.max_face) return;
    std::string key = canonical_form(g);
    out_.emplace(std::move(key), std::move(g));
  }

  const PlanarGraph& t_;
  const GenerateOptions& opt_;
  std::map<std::string, PlanarGraph>& out_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> parent_, size_;
  std::vector<std::uint32_t> mask_;
  std::vector<int> deg_, undecided_;
  std::vector<char> removed_;
};

}  // namespace

std::vector<PlanarGraph> triangulations(int n) {
  if (n > kMaxGenerate) throw TooLarge("triangulations: internal generation is limited to 12 vertices");
  if (n < 4) return {};
  std::map<std::string, PlanarGraph> level;
  const PlanarGraph base = k4();
  level.emplace(canonical_form(base), base);
  for (int m = 4; m < n; ++m) {
    std::map<std::string, PlanarGraph> next;
    for (const auto& [key, t] : level) {
      for (int v = 0; v < t.n(); ++v) {
        const int deg = t.degree(v);
        for (int i = 0; i < deg; ++i)
          for (int j = 0; j < deg; ++j) {
            if (i == j) continue;
            PlanarGraph s = split_vertex(t, v, i, j);
            std::string c = canonical_form(s);
            next.emplace(std::move(c), std::move(s));
          }
      }
    }
    level = std::move(next);
  }
  std::vector<PlanarGraph> out;
  for (auto& [key, t] : level) out.push_back(std::move(t));
  return out;
}

std::vector<PlanarGraph> generate_small(int n, const GenerateOptions& opt) {
  if (n > kMaxGenerate) throw TooLarge("generate_small: internal generation is limited to 12 vertices");
  std::map<std::string, PlanarGraph> found;
  for (const auto& t : triangulations(n)) DeletionSearch(t, opt, found).run();
  std::vector<PlanarGraph> out;
  for (auto& [key, g] : found) out.push_back(std::move(g));
  return out;
}

bool prop31_filter(const PlanarGraph& g) {
  std::set<int> hosts;
  std::vector<char> assigned(g.n(), 0);
  for (auto [v, f] : g.isolated()) {
    if (g.faces()[f].size() != 6 || !hosts.insert(f).second) return false;
    assigned[v] = 1;
  }
  for (int v = 0; v < g.n(); ++v) {
    const int d = g.degree(v);
    if (d == 0 ? !assigned[v] : (d < 3 || d > 5)) return false;
  }
  for (const auto& f : g.faces())
    if (f.size() < 3 || f.size() > 6) return false;
  return true;
}

std::vector<PlanarGraph> augment_isolated(const PlanarGraph& g, int k) {
  std::set<int> used;
  for (auto [v, f] : g.isolated()) used.insert(f);
  std::vector<int> free;
  for (int f = 0; f < static_cast<int>(g.faces().size()); ++f)
    if (g.faces()[f].size() == 6 && !used.count(f)) free.push_back(f);
  std::vector<PlanarGraph> out;
  const int h = static_cast<int>(free.size());
  if (k < 0 || k > h) return out;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  for (;;) {
    auto rot = g.rotation();
    auto iso = g.isolated();
    for (int i = 0; i < k; ++i) {
      iso.emplace_back(g.n() + i, free[pick[i]]);
      rot.emplace_back();
    }
    out.push_back(PlanarGraph::from_rotation(std::move(rot), std::move(iso)));
    int i = k - 1;
    while (i >= 0 && pick[i] == h - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

std::vector<std::pair<std::string, PlanarGraph>> dedup_sorted(const std::vector<PlanarGraph>& graphs) {
  std::map<std::string, PlanarGraph> m;
  for (const auto& g : graphs) m.emplace(canonical_form(g), g);
  return {m.begin(), m.end()};
}

}  // namespace tammes
