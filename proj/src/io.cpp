#include "loglin/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace loglin {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& name, int line, const std::string& what) {
  throw UsageError(name + ":" + std::to_string(line) + ": " + what);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "' for reading");
  return in;
}

std::string levels_comment(const CellSpace& space) {
  std::ostringstream out;
  out << "# levels ";
  for (int v = 0; v < space.vertex_count(); ++v)
    out << (v ? "," : "") << space.level_count(v);
  return out.str();
}

// Parses "# levels 2,2,3"; returns empty on no match.
std::vector<int> parse_levels_comment(const std::string& line) {
  std::istringstream in(line);
  std::string hash, word;
  in >> hash >> word;
  if (hash != "#" || word != "levels") return {};
  std::string rest;
  in >> rest;
  std::vector<int> levels;
  std::istringstream items(rest);
  std::string tok;
  while (std::getline(items, tok, ',')) levels.push_back(std::stoi(tok));
  return levels;
}

}  // namespace

void write_graph(std::ostream& out, const Graph& g) {
  out << "#vertices " << g.vertex_count() << "\n";
  for (const auto& [u, v] : g.edges()) out << u << " " << v << "\n";
}

Graph read_graph(std::istream& in, const std::string& name) {
  std::string line;
  int lineno = 0;
  int vertices = -1;
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string word;
      hs >> word;
      if (word == "vertices" && !(hs >> vertices))
        parse_error(name, lineno, "bad #vertices header");
      continue;
    }
    std::istringstream es(line);
    int u, v;
    if (!(es >> u >> v)) parse_error(name, lineno, "expected 'u v' edge pair");
    edges.emplace_back(u, v);
  }
  if (vertices < 0) parse_error(name, lineno, "missing '#vertices n' header");
  try {
    return Graph(vertices, std::move(edges));
  } catch (const UsageError& e) {
    parse_error(name, lineno, e.what());
  }
}

void write_graph_file(const std::string& path, const Graph& g) {
  auto out = open_out(path);
  write_graph(out, g);
}

Graph read_graph_file(const std::string& path) {
  auto in = open_in(path);
  return read_graph(in, path);
}

void write_table_csv(std::ostream& out, const ContingencyTable& table) {
  out << levels_comment(table.space()) << "\n";
  out << "cell,count\n";
  for (const auto& [cell, count] : table.entries())
    out << encode_cell(table.space(), cell) << "," << count << "\n";
}

ContingencyTable read_table_csv(std::istream& in, const std::string& name) {
  std::string line;
  int lineno = 0;
  std::vector<int> levels;
  bool header_seen = false;
  std::vector<std::pair<Cell, std::int64_t>> rows;
  std::optional<CellSpace> space;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto l = parse_levels_comment(line);
      if (!l.empty()) {
        levels = std::move(l);
        space.emplace(levels);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "cell,count") parse_error(name, lineno, "expected header 'cell,count'");
      header_seen = true;
      continue;
    }
    if (!space) parse_error(name, lineno, "missing '# levels ...' line before data");
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) parse_error(name, lineno, "expected 'cell,count'");
    try {
      Cell cell = decode_cell(*space, line.substr(0, comma));
      const std::int64_t count = std::stoll(line.substr(comma + 1));
      rows.emplace_back(std::move(cell), count);
    } catch (const std::exception& e) {
      parse_error(name, lineno, e.what());
    }
  }
  if (!space) parse_error(name, lineno, "missing '# levels ...' line");
  ContingencyTable table(*space);
  for (auto& [cell, count] : rows) table.add(cell, count);
  return table;
}

void write_table_file(const std::string& path, const ContingencyTable& table) {
  auto out = open_out(path);
  write_table_csv(out, table);
}

ContingencyTable read_table_file(const std::string& path) {
  auto in = open_in(path);
  return read_table_csv(in, path);
}

void write_samples(std::ostream& out, const SampleSet& samples) {
  out << levels_comment(samples.space) << "\n";
  for (const Cell& c : samples.cells) out << encode_cell(samples.space, c) << "\n";
}

SampleSet read_samples(std::istream& in, const std::string& name) {
  std::string line;
  int lineno = 0;
  std::optional<CellSpace> space;
  std::vector<Cell> cells;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto l = parse_levels_comment(line);
      if (!l.empty()) space.emplace(l);
      continue;
    }
    if (!space) parse_error(name, lineno, "missing '# levels ...' line before data");
    try {
      cells.push_back(decode_cell(*space, line));
    } catch (const std::exception& e) {
      parse_error(name, lineno, e.what());
    }
  }
  if (!space) parse_error(name, lineno, "missing '# levels ...' line");
  return SampleSet{*space, std::move(cells), {}, name};
}

void write_samples_file(const std::string& path, const SampleSet& samples) {
  auto out = open_out(path);
  write_samples(out, samples);
}

SampleSet read_samples_file(const std::string& path) {
  auto in = open_in(path);
  return read_samples(in, path);
}

std::string theta_to_json(const ThetaVector& theta, const JSet& jset) {
  if (theta.values.size() != jset.size())
    throw UsageError("theta_to_json: theta length mismatch");
  json entries = json::array();
  for (int k = 0; k < jset.size(); ++k)
    entries.push_back({{"cell", encode_cell(jset.space(), jset.cell(k))},
                       {"value", theta.values[k]}});
  return json{{"theta0", theta.theta0}, {"entries", entries}}.dump(2);
}

ThetaVector theta_from_json(const std::string& text, const JSet& jset) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("theta JSON: ") + e.what());
  }
  ThetaVector out;
  out.theta0 = j.at("theta0").get<double>();
  out.values = Eigen::VectorXd::Zero(jset.size());
  Eigen::VectorXi seen = Eigen::VectorXi::Zero(jset.size());
  for (const auto& entry : j.at("entries")) {
    const Cell cell = decode_cell(jset.space(), entry.at("cell").get<std::string>());
    const auto k = jset.find(cell);
    if (!k) throw UsageError("theta JSON: cell '" + entry.at("cell").get<std::string>() +
                             "' is not in the J-set");
    out.values[*k] = entry.at("value").get<double>();
    seen[*k] = 1;
  }
  if (seen.sum() != jset.size())
    throw UsageError("theta JSON: missing entries for some J-set cells");
  return out;
}

void write_theta_file(const std::string& path, const ThetaVector& theta, const JSet& jset) {
  auto out = open_out(path);
  out << theta_to_json(theta, jset) << "\n";
}

ThetaVector read_theta_file(const std::string& path, const JSet& jset) {
  auto in = open_in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return theta_from_json(buf.str(), jset);
}

std::string report_to_json(const EstimateReport& report, const JSet& jset,
                           const std::string& provenance_json) {
  json j;
  j["method"] = report.method;
  j["existence"] = report.existence;
  if (!provenance_json.empty()) {
    try {
      j["invocation"] = json::parse(provenance_json);
    } catch (const json::parse_error& e) {
      throw UsageError(std::string("report provenance: ") + e.what());
    }
  }
  j["diagnostics"] = {{"iterations", report.iterations}, {"residual", report.residual}};
  if (!report.note.empty()) j["note"] = report.note;
  if (report.theta0.has_value()) j["theta0"] = *report.theta0;
  if (report.theta.has_value()) {
    json entries = json::array();
    for (int k = 0; k < jset.size(); ++k) {
      json entry = {{"cell", encode_cell(jset.space(), jset.cell(k))},
                    {"value", (*report.theta)[k]}};
      if (static_cast<std::size_t>(k) < report.sources.size())
        entry["sources"] = report.sources[static_cast<std::size_t>(k)];
      entries.push_back(std::move(entry));
    }
    j["entries"] = entries;
  }
  return j.dump(2);
}

void write_report_file(const std::string& path, const EstimateReport& report,
                       const JSet& jset, const std::string& provenance_json) {
  auto out = open_out(path);
  out << report_to_json(report, jset, provenance_json) << "\n";
}

}  // namespace loglin
