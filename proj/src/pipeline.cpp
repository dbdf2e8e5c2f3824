#include "ixgen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ixgen/corpus.hpp"
#include "ixgen/manifest.hpp"
#include "ixgen/opendrive.hpp"
#include "ixgen/random.hpp"
#include "ixgen/svg.hpp"

namespace ixgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError(PipelineError::Kind::Input, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError(PipelineError::Kind::Input, "cannot write '" + path.string() + "'");
  out << text;
}

void create_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw PipelineError(PipelineError::Kind::Input, "cannot create '" + dir.string() + "': " + ec.message());
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Reads known keys of one config section, rejecting the rest.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw PipelineError(PipelineError::Kind::Config, where_ + " must be an object");
  }
  template <class T>
  void get(const char* key, T& field) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      field = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw PipelineError(PipelineError::Kind::Config, "bad value for " + where_ + "." + key);
    }
  }
  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw PipelineError(PipelineError::Kind::Config, "unknown config key " + where_ + "." + k);
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::vector<double> radii_from_json(const json& j) {
  std::vector<double> out;
  if (!j.is_array()) throw PipelineError(PipelineError::Kind::Config, "min_radii must be an array");
  for (const auto& v : j) {
    if (v.is_string() && v.get<std::string>() == "inf") out.push_back(kStraight);
    else if (v.is_number()) out.push_back(v.get<double>());
    else throw PipelineError(PipelineError::Kind::Config, "min_radii entries must be numbers or \"inf\"");
  }
  return out;
}

void read_domains(const json& j, FeatureDomains& d, const std::string& where) {
  Section s(j, where);
  s.get("lane_counts", d.lane_counts);
  if (auto r = s.child("min_radii")) d.min_radii = radii_from_json(*r);
  s.get("max_slopes", d.max_slopes);
  s.finish();
}

struct Task {
  const ClassFile* cls;
  std::shared_ptr<const LabeledDigraph> topology;
  std::size_t sample;
  InterchangeFeature feature;
  std::string id;
};

struct Outcome {
  ManifestRow row;
  std::string log;
};

ManifestRow base_row(const Task& t) {
  ManifestRow row;
  row.id = t.id;
  row.class_id = t.cls->class_id;
  row.sample = t.sample;
  const auto& g = *t.topology;
  for (auto r : g.vertices_of(VertexKind::Road)) row.lanes.emplace_back(g.vertex(r).name, t.feature.lanes.at(r));
  for (auto r : g.vertices_of(VertexKind::Ramp)) {
    const auto& tgt = t.feature.ramp_geometry.at(r);
    row.targets.push_back({g.vertex(r).name, tgt.min_radius, tgt.max_slope, true});
  }
  return row;
}

void fill_achieved(ManifestRow& row, const LabeledDigraph& g, const ConcreteInterchange& ic) {
  row.generations = 0;
  for (auto r : g.vertices_of(VertexKind::Ramp)) {
    auto it = ic.ramps.find(r);
    if (it == ic.ramps.end()) {
      row.achieved.push_back({g.vertex(r).name, 0, 0, false});
      continue;
    }
    row.achieved.push_back({g.vertex(r).name, it->second.achieved.min_radius, it->second.achieved.max_abs_slope, true});
    row.generations += it->second.generations;
  }
}

Outcome synthesize_task(const Task& t, const PipelineConfig& config, const fs::path& out) {
  Outcome o;
  o.row = base_row(t);
  const std::uint64_t seed = derive_seed(config.seed, t.id);
  try {
    const RoadLayout layout = layout_roads(*t.topology, t.feature.lanes, config.layout, derive_seed(seed, "layout"));
    const ConcreteInterchange ic =
        synthesize_interchange(t.feature, layout, config.synthesis, derive_seed(seed, "synthesis"), t.id, t.cls->class_id);
    fill_achieved(o.row, *t.topology, ic);
    o.row.success = true;
    write_opendrive(ic, out / "xodr" / (t.id + ".xodr"));
    write_svg(ic, out / "svg" / (t.id + ".svg"));
  } catch (const SynthesisFailed& e) {
    fill_achieved(o.row, *t.topology, e.partial());
    o.row.success = false;
    std::string note;
    for (const auto& f : e.failures()) note += (note.empty() ? "" : "; ") + f.name + ": " + f.reason;
    o.row.note = note;
    o.log = t.id + ": " + note;
  } catch (const LayoutError& e) {
    o.row.success = false;
    o.row.note = std::string("layout: ") + e.what();
    o.log = t.id + ": " + o.row.note;
  } catch (const ExportError& e) {
    o.row.success = false;
    o.row.note = std::string("export: ") + e.what();
    o.log = t.id + ": " + o.row.note;
  }
  return o;
}

GenerateSummary summarize(const std::vector<ClassFile>& classes, const std::vector<ManifestRow>& rows) {
  GenerateSummary s;
  for (const auto& c : classes) {
    ClassSummary cs;
    cs.class_id = c.class_id;
    cs.name = c.name;
    double gens = 0;
    for (const auto& r : rows) {
      if (r.class_id != c.class_id) continue;
      ++cs.rows;
      if (r.success.value_or(false)) ++cs.successes;
      gens += static_cast<double>(r.generations);
    }
    cs.mean_generations = cs.rows ? gens / static_cast<double>(cs.rows) : 0.0;
    s.rows += cs.rows;
    s.successes += cs.successes;
    s.classes.push_back(cs);
  }
  return s;
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw PipelineError(PipelineError::Kind::Config, std::string("config parse error: ") + e.what());
  }
  PipelineConfig c;
  Section top(j, "config");
  top.get("seed", c.seed);
  top.get("jobs", c.jobs);
  if (auto d = top.child("domains")) read_domains(*d, c.domains, "domains");
  if (auto s = top.child("sampling")) {
    Section sec(*s, "sampling");
    sec.get("candidates", c.candidates);
    sec.get("limit", c.limit);
    sec.finish();
  }
  if (auto s = top.child("layout")) {
    Section sec(*s, "layout");
    auto& l = c.layout;
    sec.get("level_clearance", l.level_clearance);
    sec.get("lane_width", l.lane_width);
    sec.get("half_length", l.half_length);
    sec.get("endpoint_jitter", l.endpoint_jitter);
    sec.get("median", l.median);
    sec.get("median_jitter", l.median_jitter);
    sec.get("crossing_jitter_deg", l.crossing_jitter_deg);
    sec.get("stem_gap", l.stem_gap);
    sec.finish();
  }
  if (auto s = top.child("optimizer")) {
    Section sec(*s, "optimizer");
    auto& de = c.synthesis.de;
    sec.get("population_size", de.population_size);
    sec.get("differential_weight", de.differential_weight);
    sec.get("crossover_rate", de.crossover_rate);
    sec.get("max_generations", de.max_generations);
    sec.get("tolerance", de.tolerance);
    sec.finish();
  }
  if (auto s = top.child("penalty")) {
    Section sec(*s, "penalty");
    auto& w = c.synthesis.weights;
    sec.get("radius_band", w.radius_band);
    sec.get("slope_band", w.slope_band);
    sec.get("curvature_scale", w.curvature_scale);
    sec.get("straight_curvature", w.straight_curvature);
    sec.get("samples_per_segment", w.samples_per_segment);
    sec.finish();
  }
  if (auto s = top.child("synthesis")) {
    Section sec(*s, "synthesis");
    auto& y = c.synthesis;
    sec.get("retry_limit", y.retry_limit);
    sec.get("ramp_lanes", y.ramp_lanes);
    sec.get("ramp_lane_width", y.ramp_lane_width);
    sec.get("attach_fraction", y.attach_fraction);
    sec.get("radius_slack", y.radius_slack);
    sec.get("grade_fill", y.grade_fill);
    sec.get("min_tail", y.min_tail);
    sec.get("straight_placement_radius", y.straight_placement_radius);
    sec.finish();
  }
  top.finish();

  try {
    c.domains.validate();
    c.synthesis.de.validate();
  } catch (const std::exception& e) {
    throw PipelineError(PipelineError::Kind::Config, e.what());
  }
  if (c.jobs < 1) throw PipelineError(PipelineError::Kind::Config, "jobs must be at least 1");
  if (c.candidates < 1) throw PipelineError(PipelineError::Kind::Config, "sampling.candidates must be at least 1");
  if (c.synthesis.retry_limit < 0) throw PipelineError(PipelineError::Kind::Config, "synthesis.retry_limit must be >= 0");
  if (c.synthesis.weights.samples_per_segment < 3) {
    throw PipelineError(PipelineError::Kind::Config, "penalty.samples_per_segment must be >= 3");
  }
  if (c.synthesis.ramp_lanes < 1) throw PipelineError(PipelineError::Kind::Config, "synthesis.ramp_lanes must be >= 1");
  return c;
}

PipelineConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

std::string domains_json(const FeatureDomains& d) {
  json j;
  j["lane_counts"] = d.lane_counts;
  json radii = json::array();
  for (double r : d.min_radii) {
    if (std::isinf(r)) radii.push_back("inf");
    else radii.push_back(r);
  }
  j["min_radii"] = radii;
  j["max_slopes"] = d.max_slopes;
  return j.dump(2) + "\n";
}

FeatureDomains parse_domains_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw PipelineError(PipelineError::Kind::Input, std::string("domains parse error: ") + e.what());
  }
  FeatureDomains d;
  read_domains(j, d, "domains");
  return d;
}

std::string class_name(int class_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "class-%02d", class_id);
  return buf;
}

std::vector<ClassFile> load_class_files(const std::vector<fs::path>& paths) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.rfind("class-", 0) == 0 && e.path().extension() == ".txt") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  std::vector<ClassFile> out;
  std::set<int> ids;
  for (const auto& f : files) {
    std::vector<InterchangeRecord> recs;
    try {
      recs = parse_corpus(f);
    } catch (const CorpusError& e) {
      throw PipelineError(PipelineError::Kind::Input, f.string() + ": " + e.what());
    }
    for (auto& r : recs) {
      ClassFile c;
      c.class_id = static_cast<int>(out.size()) + 1;
      for (const auto& [k, v] : r.metadata) {
        if (k == "class") {
          try {
            c.class_id = std::stoi(v);
          } catch (const std::exception&) {
            throw PipelineError(PipelineError::Kind::Input, f.string() + ": bad class id '" + v + "'");
          }
        }
      }
      if (!ids.insert(c.class_id).second) {
        throw PipelineError(PipelineError::Kind::Input, "duplicate class id " + std::to_string(c.class_id));
      }
      c.name = r.id;
      c.record = std::move(r);
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<TopologyClass> run_classify(const fs::path& corpus, const fs::path& out, std::ostream& log) {
  std::vector<InterchangeRecord> records;
  try {
    records = parse_corpus(corpus);
  } catch (const CorpusError& e) {
    std::string where = corpus.string();
    if (e.line()) where += ":" + std::to_string(e.line());
    throw PipelineError(PipelineError::Kind::Input, where + ": " + e.what());
  }
  auto classes = classify(records);
  create_dirs(out);
  std::string report = "class\tsize\trepresentative\tmembers\n";
  for (const auto& c : classes) {
    std::string members;
    for (const auto& m : c.members) members += (members.empty() ? "" : ",") + m.id;
    report += std::to_string(c.class_id) + "\t" + std::to_string(c.members.size()) + "\t" + c.representative.id + "\t" +
              members + "\n";
    InterchangeRecord rec = c.representative;
    rec.id = class_name(c.class_id);
    rec.metadata = {{"class", std::to_string(c.class_id)},
                    {"representative", c.representative.id},
                    {"size", std::to_string(c.members.size())}};
    write_corpus(out / (rec.id + ".txt"), {rec});
  }
  write_file(out / "classes.tsv", report);
  log << records.size() << " records, " << classes.size() << " classes\n";
  return classes;
}

GenerateSummary run_sample(const std::vector<ClassFile>& classes, const PipelineConfig& config, const fs::path& out,
                           std::ostream& log) {
  return run_generate(classes, config, out, log, true);
}

GenerateSummary run_generate(const std::vector<ClassFile>& classes, const PipelineConfig& config, const fs::path& out,
                             std::ostream& log, bool dry_run) {
  create_dirs(out / "arrays");
  if (!dry_run) {
    create_dirs(out / "xodr");
    create_dirs(out / "svg");
  }
  write_file(out / "domains.json", domains_json(config.domains));

  std::vector<Task> tasks;
  for (const auto& cls : classes) {
    auto topology = std::make_shared<const LabeledDigraph>(cls.record.graph);
    CoveringArray array;
    try {
      array = generate_covering_array(*topology, config.domains, derive_seed(config.seed, "array:" + cls.name),
                                      config.candidates);
    } catch (const SamplingError& e) {
      throw PipelineError(PipelineError::Kind::Input, cls.name + ": " + e.what());
    }
    if (find_uncovered_pair(array)) {
      throw PipelineError(PipelineError::Kind::Input, cls.name + ": covering array misses a pair");
    }
    write_file(out / "arrays" / (cls.name + ".tsv"), serialize_array(array));
    auto features = features_from_array(topology, array);
    const std::size_t n = config.limit ? std::min(config.limit, features.size()) : features.size();
    for (std::size_t i = 0; i < n; ++i) {
      char id[64];
      std::snprintf(id, sizeof id, "%s-s%03zu", cls.name.c_str(), i + 1);
      tasks.push_back({&cls, topology, i + 1, std::move(features[i]), id});
    }
  }

  std::vector<Outcome> outcomes(tasks.size());
  if (dry_run) {
    for (std::size_t i = 0; i < tasks.size(); ++i) outcomes[i].row = base_row(tasks[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) outcomes[i] = synthesize_task(tasks[i], config, out);
    };
    const int workers = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  }

  std::vector<ManifestRow> rows;
  for (auto& o : outcomes) {
    if (!o.log.empty()) log << "failed " << o.log << "\n";
    rows.push_back(std::move(o.row));
  }
  write_file(out / (dry_run ? "features.tsv" : "manifest.tsv"), serialize_manifest(rows));

  GenerateSummary summary = summarize(classes, rows);
  log << "class\trows\tsuccess\trate\tmean_generations\n";
  for (const auto& c : summary.classes) {
    log << c.class_id << "\t" << c.rows << "\t" << (dry_run ? std::string("-") : std::to_string(c.successes)) << "\t"
        << (dry_run || !c.rows ? std::string("-") : fmt("%.1f%%", 100.0 * c.successes / c.rows)) << "\t"
        << (dry_run ? std::string("-") : fmt("%.1f", c.mean_generations)) << "\n";
  }
  if (!dry_run) {
    log << "total\t" << summary.rows << "\t" << summary.successes << "\t"
        << (summary.rows ? fmt("%.1f%%", 100.0 * summary.successes / summary.rows) : std::string("-")) << "\n";
    if (summary.rows > 0 && summary.successes == 0) {
      throw PipelineError(PipelineError::Kind::TotalFailure, "every interchange failed to synthesize");
    }
  }
  return summary;
}

bool DatasetReport::all_pass() const {
  return std::all_of(classes.begin(), classes.end(), [](const ClassReport& c) { return c.coverage_pass; });
}

DatasetReport run_report(const fs::path& dataset) {
  const fs::path manifest_path = dataset / "manifest.tsv";
  if (!fs::exists(manifest_path)) {
    throw PipelineError(PipelineError::Kind::Input, "no manifest at '" + manifest_path.string() + "'");
  }
  std::vector<ManifestRow> rows;
  try {
    rows = read_manifest(manifest_path);
  } catch (const ManifestError& e) {
    throw PipelineError(PipelineError::Kind::Input, e.what());
  }
  FeatureDomains domains;
  if (fs::exists(dataset / "domains.json")) domains = parse_domains_json(read_file(dataset / "domains.json"));

  DatasetReport report;
  std::map<int, std::vector<const ManifestRow*>> by_class;
  for (const auto& r : rows) by_class[r.class_id].push_back(&r);

  std::vector<double> lanes_domain(domains.lane_counts.begin(), domains.lane_counts.end());
  for (const auto& [cid, members] : by_class) {
    ClassReport cr;
    cr.class_id = cid;
    cr.rows = members.size();
    double gens = 0;
    for (const auto* r : members) {
      cr.successes += r->success.value_or(false);
      gens += static_cast<double>(r->generations);
    }
    cr.mean_generations = gens / static_cast<double>(cr.rows);

    // Rebuild the class's covering array from the manifest rows and rescan it.
    CoveringArray array;
    const ManifestRow& first = *members.front();
    for (const auto& [name, n] : first.lanes) array.parameters.push_back({"lanes:" + name, ParamKind::Lanes, 0, lanes_domain});
    for (const auto& t : first.targets) {
      array.parameters.push_back({"radius:" + t.name, ParamKind::Radius, 0, domains.min_radii});
      array.parameters.push_back({"slope:" + t.name, ParamKind::Slope, 0, domains.max_slopes});
    }
    std::string problem;
    for (const auto* r : members) {
      std::vector<std::pair<std::string, double>> values;
      for (const auto& [name, n] : r->lanes) values.emplace_back("lanes:" + name, n);
      for (const auto& t : r->targets) {
        values.emplace_back("radius:" + t.name, t.min_radius);
        values.emplace_back("slope:" + t.name, t.max_slope);
      }
      if (values.size() != array.parameters.size()) {
        problem = "row " + r->id + " has a different parameter set";
        break;
      }
      std::vector<std::size_t> idx;
      for (std::size_t p = 0; p < values.size() && problem.empty(); ++p) {
        const auto& param = array.parameters[p];
        if (values[p].first != param.name) {
          problem = "row " + r->id + " has a different parameter set";
          break;
        }
        auto it = std::find(param.values.begin(), param.values.end(), values[p].second);
        if (it == param.values.end()) {
          problem = "row " + r->id + ": value " + format_value(values[p].second) + " for " + param.name + " outside domain";
          break;
        }
        idx.push_back(static_cast<std::size_t>(it - param.values.begin()));
      }
      if (!problem.empty()) break;
      array.rows.push_back(idx);
    }
    if (problem.empty()) {
      if (auto gap = find_uncovered_pair(array)) {
        const auto& p = array.parameters[gap->p];
        const auto& q = array.parameters[gap->q];
        problem = "pair (" + p.name + "=" + format_value(p.values[gap->a]) + ", " + q.name + "=" +
                  format_value(q.values[gap->b]) + ") not covered";
      }
    }
    cr.coverage_pass = problem.empty();
    cr.coverage_detail = problem;
    report.classes.push_back(cr);
  }

  const std::vector<std::string> radius_bins{"[0,1)", "[1,2)", "[2,3)", "[3,4)", "[4,5)", ">=5"};
  const std::vector<std::string> slope_bins{"[0,0.05)", "[0.05,0.1)", "[0.1,0.15)", "[0.15,0.2)", ">=0.2"};
  std::vector<std::size_t> rh(radius_bins.size()), sh(slope_bins.size());
  for (const auto& r : rows) {
    if (!r.success.value_or(false)) continue;
    for (std::size_t i = 0; i < r.targets.size() && i < r.achieved.size(); ++i) {
      const auto& t = r.targets[i];
      const auto& a = r.achieved[i];
      if (!a.fitted) continue;
      if (std::isfinite(t.min_radius)) {
        const double e = 100.0 * std::abs(a.min_radius - t.min_radius) / t.min_radius;
        ++rh[std::min<std::size_t>(static_cast<std::size_t>(e), 5)];
      }
      const double e = std::abs(a.max_slope - t.max_slope);
      ++sh[std::min<std::size_t>(static_cast<std::size_t>(e / 0.05), 4)];
    }
  }
  for (std::size_t i = 0; i < rh.size(); ++i) report.radius_histogram.emplace_back(radius_bins[i], rh[i]);
  for (std::size_t i = 0; i < sh.size(); ++i) report.slope_histogram.emplace_back(slope_bins[i], sh[i]);

  std::ostringstream os;
  os << "class\trows\tsuccess\trate\tmean_generations\tcoverage\n";
  for (const auto& c : report.classes) {
    os << c.class_id << "\t" << c.rows << "\t" << c.successes << "\t" << fmt("%.1f%%", 100.0 * c.successes / c.rows)
       << "\t" << fmt("%.1f", c.mean_generations) << "\t"
       << (c.coverage_pass ? std::string("PASS") : "FAIL: " + c.coverage_detail) << "\n";
  }
  os << "\nradius error (% of target)\tramps\n";
  for (const auto& [bin, n] : report.radius_histogram) os << bin << "\t" << n << "\n";
  os << "\nslope error (percentage points)\tramps\n";
  for (const auto& [bin, n] : report.slope_histogram) os << bin << "\t" << n << "\n";
  report.text = os.str();
  return report;
}

void run_export_svg(const std::vector<fs::path>& inputs, const fs::path& out, bool labels, double scale) {
  const bool single_file = inputs.size() == 1 && out.extension() == ".svg";
  if (!single_file) create_dirs(out);
  for (const auto& in : inputs) {
    try {
      const auto ic = read_opendrive(in).to_interchange();
      const fs::path target = single_file ? out : out / (in.stem().string() + ".svg");
      write_svg(ic, target, {labels, scale});
    } catch (const ExportError& e) {
      throw PipelineError(PipelineError::Kind::Input, in.string() + ": " + e.what());
    } catch (const TopologyError& e) {
      throw PipelineError(PipelineError::Kind::Input, in.string() + ": " + e.what());
    }
  }
}

}  // namespace ixgen
