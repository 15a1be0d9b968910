#include "tammes/pipeline.hpp"

#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <thread>

#include "json.hpp"

namespace tammes::pipeline {

using nlohmann::json;

namespace {

json graph_json(const PlanarGraph& g) {
  json iso = json::array();
  for (auto [v, f] : g.isolated()) iso.push_back({v, f});
  return {{"n", g.n()}, {"rotation", g.rotation()}, {"isolated", iso}};
}

PlanarGraph graph_from_json(const json& j) {
  auto rot = j.at("rotation").get<std::vector<std::vector<int>>>();
  std::vector<std::pair<int, int>> iso;
  for (const auto& p : j.at("isolated")) iso.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  return PlanarGraph::from_rotation(std::move(rot), std::move(iso));
}

json new_record(const PlanarGraph& g, const std::string& canonical) {
  return {{"schema", kRecordSchema}, {"canonical", canonical}, {"graph", graph_json(g)}, {"status", "candidate"}};
}

json parse_record(const std::string& line) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed record: ") + e.what());
  }
  if (!rec.is_object() || !rec.contains("schema") || rec["schema"] != kRecordSchema)
    throw SchemaError(std::string("record schema mismatch; expected ") + kRecordSchema);
  return rec;
}

void eliminate(json& rec, const std::string& stage, const std::string& reason) {
  rec["status"] = "eliminated";
  rec["eliminated_at"] = stage;
  rec["reason"] = reason;
}

enum class Outcome { Untouched, Passed, Eliminated };

// Reads records in batches, applies fn on `threads` workers, and writes the
// batch back in input order.
template <class F>
StageStats map_records(std::istream& in, std::ostream& out, int threads, F&& fn) {
  StageStats st;
  threads = std::max(1, threads);
  const std::size_t batch = 16 * static_cast<std::size_t>(threads);
  std::vector<json> recs;
  std::vector<Outcome> outcomes;
  std::string line;
  bool eof = false;
  while (!eof) {
    recs.clear();
    while (recs.size() < batch) {
      if (!std::getline(in, line)) {
        eof = true;
        break;
      }
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      recs.push_back(parse_record(line));
    }
    if (recs.empty()) break;
    outcomes.assign(recs.size(), Outcome::Untouched);
    const int workers = std::min<int>(threads, static_cast<int>(recs.size()));
    if (workers == 1) {
      for (std::size_t i = 0; i < recs.size(); ++i) outcomes[i] = fn(recs[i]);
    } else {
      std::vector<std::exception_ptr> errors(workers);
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i = w; i < recs.size(); i += workers) outcomes[i] = fn(recs[i]);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      for (auto& t : pool) t.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    for (std::size_t i = 0; i < recs.size(); ++i) {
      ++st.records;
      if (outcomes[i] != Outcome::Untouched) ++st.processed;
      if (outcomes[i] == Outcome::Passed) ++st.passed;
      if (outcomes[i] == Outcome::Eliminated) ++st.eliminated;
      out << recs[i].dump() << '\n';
    }
  }
  if (!out) throw IoError("failed writing records");
  return st;
}

void classify(const PlanarGraph& g, EnumerateStats& st) {
  ++st.accepted;
  if (!g.isolated().empty())
    ++st.isolated;
  else if (g.count_faces_of_size(6) > 0)
    ++st.hexagons;
  else if (g.count_faces_of_size(5) > 0)
    ++st.pentagons;
  else
    ++st.triangles_quads;
}

std::vector<double> to_vec(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

Window auto_window(const Configuration& best, double slack) {
  return {best.psi() - slack, geom::fejes_toth_bound(best.n())};
}

std::string graph_record(const PlanarGraph& g) { return new_record(g, canonical_form(g)).dump(); }

PlanarGraph graph_from_record(const std::string& line) { return graph_from_json(parse_record(line).at("graph")); }

EnumerateStats enumerate_generate(int n, std::ostream& out) {
  EnumerateStats st;
  std::map<std::string, PlanarGraph> found;
  for (int k = 0; n - k >= 4; ++k) {
    for (const auto& g : generate_small(n - k)) {
      ++st.input;
      if (k == 0) {
        if (prop31_filter(g)) found.emplace(canonical_form(g), g);
        continue;
      }
      for (const auto& a : augment_isolated(g, k))
        if (prop31_filter(a)) found.emplace(canonical_form(a), a);
    }
  }
  for (const auto& [c, g] : found) {
    classify(g, st);
    out << new_record(g, c).dump() << '\n';
  }
  if (!out) throw IoError("failed writing records");
  return st;
}

EnumerateStats enumerate_planar_code(int n, std::istream& in, std::ostream& out) {
  EnumerateStats st;
  PlanarCodeReader reader(in);
  PlanarGraph g;
  while (reader.next(g)) {
    ++st.input;
    if (g.n() == n) {
      if (prop31_filter(g)) {
        classify(g, st);
        out << new_record(g, canonical_form(g)).dump() << '\n';
      }
    } else if (g.n() < n) {
      for (const auto& [c, a] : dedup_sorted(augment_isolated(g, n - g.n()))) {
        if (!prop31_filter(a)) continue;
        classify(a, st);
        out << new_record(a, c).dump() << '\n';
      }
    }
  }
  if (!out) throw IoError("failed writing records");
  return st;
}

StageStats prune_stage(std::istream& in, std::ostream& out, const PruneOptions& opt, int threads) {
  return map_records(in, out, threads, [&](json& rec) {
    if (rec.at("status") != "candidate") return Outcome::Untouched;
    const PlanarGraph g = graph_from_json(rec.at("graph"));
    const PruneOutcome r = prune_graph(g, opt);
    rec["window"] = {opt.d_lo, opt.d_hi};
    rec["depth"] = r.depth;
    rec["nodes"] = r.nodes;
    if (r.eliminated) {
      eliminate(rec, "prune", r.reason);
      return Outcome::Eliminated;
    }
    json boxes = json::array();
    for (const auto& b : r.survivors) boxes.push_back({{"lo", b.lo}, {"hi", b.hi}});
    rec["status"] = "survivor";
    rec["boxes"] = std::move(boxes);
    rec["budget_exhausted"] = r.budget_exhausted;
    return Outcome::Passed;
  });
}

StageStats embed_stage(std::istream& in, std::ostream& out, const EmbedOptions& opt, int threads) {
  return map_records(in, out, threads, [&](json& rec) {
    if (rec.at("status") != "survivor") return Outcome::Untouched;
    const PlanarGraph g = graph_from_json(rec.at("graph"));
    const auto& win = rec.at("window");
    const AngleSystem sys = build_system(g, win.at(0).get<double>(), win.at(1).get<double>()).first;
    EmbedResult first_failure;
    bool have_failure = false;
    int index = 0;
    for (const auto& jb : rec.at("boxes")) {
      Box box{to_vec(jb.at("lo")), to_vec(jb.at("hi"))};
      EmbedResult r = nonlinear_embed(sys, box, opt);
      if (r.status == EmbedStatus::Embedded) {
        json pts = json::array();
        for (const auto& p : r.config->points()) pts.push_back({p.x(), p.y(), p.z()});
        rec["embedding"] = {{"status", to_string(r.status)}, {"d", r.d},        {"psi", r.config->psi()},
                            {"residual", r.residual},        {"start", r.start}, {"box", index},
                            {"points", pts}};
        rec["status"] = "embedded";
        return Outcome::Passed;
      }
      if (!have_failure || (first_failure.status == EmbedStatus::NoSolution &&
                            r.status == EmbedStatus::VerificationFailed)) {
        first_failure = std::move(r);
        have_failure = true;
      }
      ++index;
    }
    rec["embedding"] = {{"status", to_string(first_failure.status)}, {"detail", first_failure.detail}};
    eliminate(rec, "embed",
              std::string(to_string(first_failure.status)) +
                  (first_failure.detail.empty() ? "" : ": " + first_failure.detail));
    return Outcome::Eliminated;
  });
}

namespace {

json verdict_json(const Verdict& v) {
  json details = json::object();
  for (const auto& [k, x] : v.details) details[k] = x;
  if (!v.note.empty()) details["note"] = v.note;
  return details;
}

Outcome apply_verdict(json& rec, const Verdict& v) {
  rec["method"] = v.method;
  rec["verdict"] = v.verdict;
  rec["details"] = verdict_json(v);
  if (v.verdict == "rejected") {
    eliminate(rec, "verify", v.method);
    return Outcome::Eliminated;
  }
  rec["status"] = "maximal_candidate";
  return Outcome::Passed;
}

Configuration config_from_points(const json& pts) {
  std::vector<UnitVector> p;
  for (const auto& q : pts) p.emplace_back(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>());
  return Configuration(std::move(p));
}

}  // namespace

StageStats verify_stage(std::istream& in, std::ostream& out, const VerifyOptions& opt, int threads) {
  return map_records(in, out, threads, [&](json& rec) {
    if (rec.at("status") != "embedded") return Outcome::Untouched;
    const PlanarGraph g = graph_from_json(rec.at("graph"));
    const Configuration c = config_from_points(rec.at("embedding").at("points"));
    return apply_verdict(rec, verify_maximal(g, c, opt));
  });
}

StageStats verify_planar_code(std::istream& in, const Configuration& c, std::ostream& out,
                              const VerifyOptions& opt) {
  StageStats st;
  PlanarCodeReader reader(in);
  PlanarGraph g;
  while (reader.next(g)) {
    ++st.records;
    ++st.processed;
    json rec = new_record(g, canonical_form(g));
    if (apply_verdict(rec, verify_maximal(g, c, opt)) == Outcome::Passed)
      ++st.passed;
    else
      ++st.eliminated;
    out << rec.dump() << '\n';
  }
  if (!out) throw IoError("failed writing records");
  return st;
}

Report report(std::istream& in, std::ostream* csv) {
  Report r;
  if (csv) *csv << "canonical,stage_eliminated,method\n";
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json rec = parse_record(line);
    ++r.total;
    const std::string status = rec.at("status");
    std::string stage = "none", method;
    if (rec.contains("method")) {
      method = rec["method"];
      ++r.methods[method];
    }
    if (status == "eliminated") {
      stage = rec.at("eliminated_at");
      ++r.eliminated_at[stage];
      if (method.empty()) method = rec.value("reason", "");
    } else if (status == "maximal_candidate") {
      double psi = 0.0;
      if (rec.contains("embedding")) psi = rec["embedding"].value("psi", 0.0);
      r.candidates.push_back({rec.at("canonical"), psi, method});
    } else {
      stage = "pending:" + status;
    }
    if (csv) *csv << rec.at("canonical").get<std::string>() << ',' << stage << ",\"" << method << "\"\n";
  }
  return r;
}

void print_report(const Report& r, std::ostream& out) {
  out << "records: " << r.total << '\n';
  for (const auto& [stage, count] : r.eliminated_at) out << "eliminated at " << stage << ": " << count << '\n';
  for (const auto& [method, count] : r.methods) out << "verdicts by " << method << ": " << count << '\n';
  out << "maximal candidates: " << r.candidates.size() << '\n';
  for (const auto& c : r.candidates) {
    out << "  " << c.canonical << "  psi=" << json(c.psi).dump() << " rad (" << geom::degrees(c.psi)
        << " deg) via " << c.method << '\n';
  }
}

void write_meta(const std::filesystem::path& output, const std::string& command,
                const std::vector<std::pair<std::string, std::string>>& params) {
  json p = json::object();
  for (const auto& [k, v] : params) p[k] = v;
  json meta = {{"schema", "tammes.meta/1"},
               {"command", command},
               {"output", output.filename().string()},
               {"params", p},
               {"record_schema", kRecordSchema},
               {"tangent_basis", "e1 = z-axis projected to the tangent plane (x-axis within 1e-9 of a pole), e2 = x cross e1"},
               {"tolerances",
                {{"contact", kContactTol},
                 {"lp_slack", lp::Options{}.slack},
                 {"lp_tolerance", lp::Options{}.tolerance},
                 {"embed_residual", EmbedOptions{}.residual_tol},
                 {"embed_edge", EmbedOptions{}.edge_tol}}}};
  std::filesystem::path path = output;
  path += ".meta.json";
  std::ofstream f(path);
  f << meta.dump(2) << '\n';
  if (!f) throw IoError("cannot write " + path.string());
}

}  // namespace tammes::pipeline
