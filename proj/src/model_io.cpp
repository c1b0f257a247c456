#include "credal/model_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "credal/errors.hpp"

namespace credal {

using Json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw FormatError("write failed for '" + path.string() + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one record; quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        field += '"';
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back(trim(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  out.emplace_back(trim(field));
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  CsvTable table;
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    ++line_no;
    start = end + 1;
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto fields = split_record(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size())
        throw FormatError(path.string() + ": line " + std::to_string(line_no) + " has " +
                          std::to_string(fields.size()) + " fields, header has " +
                          std::to_string(table.header.size()));
      table.rows.push_back(std::move(fields));
      table.line_numbers.push_back(line_no);
    }
    if (end == text.size()) break;
  }
  if (table.header.empty()) throw FormatError(path.string() + ": missing header row");
  return table;
}

template <typename T>
T parse_number(const std::string& cell, const std::filesystem::path& path, std::size_t line,
               const std::string& column) {
  T value{};
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last)
    throw FormatError(path.string() + ": line " + std::to_string(line) + ", column '" + column +
                      "': not a number: '" + cell + "'");
  return value;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Dataset read_dataset_csv(const std::filesystem::path& path,
                         const std::optional<std::string>& label_column) {
  const CsvTable table = read_csv(path);
  std::optional<std::size_t> label_idx;
  if (label_column) {
    for (std::size_t k = 0; k < table.header.size(); ++k)
      if (table.header[k] == *label_column) label_idx = k;
    if (!label_idx)
      throw FormatError(path.string() + ": no column named '" + *label_column + "'");
  }
  const std::size_t p = table.header.size() - (label_idx ? 1 : 0);
  if (p == 0) throw FormatError(path.string() + ": no feature columns");
  if (table.rows.empty()) throw FormatError(path.string() + ": no data rows");

  Dataset data{Matrix(table.rows.size(), p), std::nullopt,
               path.stem().string()};
  if (label_idx) data.labels.emplace(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::size_t q = 0;
    for (std::size_t k = 0; k < table.header.size(); ++k) {
      const auto& cell = table.rows[i][k];
      if (label_idx && k == *label_idx) {
        (*data.labels)[i] = parse_number<int>(cell, path, table.line_numbers[i], table.header[k]);
        continue;
      }
      const double v = parse_number<double>(cell, path, table.line_numbers[i], table.header[k]);
      if (!std::isfinite(v))
        throw FormatError(path.string() + ": line " + std::to_string(table.line_numbers[i]) +
                          ", column '" + table.header[k] + "': non-finite value");
      data.features(i, q++) = v;
    }
  }
  return data;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::string out;
  char buf[40];
  for (std::size_t q = 0; q < data.dims(); ++q) out += (q ? ",f" : "f") + std::to_string(q + 1);
  if (data.labels) out += ",y";
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t q = 0; q < data.dims(); ++q) {
      std::snprintf(buf, sizeof buf, "%.17g", data.features(i, q));
      if (q) out += ',';
      out += buf;
    }
    if (data.labels) out += ',' + std::to_string((*data.labels)[i]);
    out += '\n';
  }
  write_file(path, out);
}

void write_assignment_csv(const HardAssignment& hard, const CredalPartition& partition,
                          const std::filesystem::path& path) {
  std::string out = "label,outlier,empty_mass\n";
  char buf[40];
  for (std::size_t i = 0; i < hard.labels.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", partition.empty_mass[i]);
    out += std::to_string(hard.labels[i] + 1) + ',' + (hard.outlier_flags[i] ? "1" : "0") + ',' +
           buf + '\n';
  }
  write_file(path, out);
}

std::vector<int> read_labels_csv(const std::filesystem::path& path,
                                 const std::optional<std::string>& column) {
  const CsvTable table = read_csv(path);
  std::size_t idx = 0;
  const std::string wanted = column.value_or("label");
  bool found = false;
  for (std::size_t k = 0; k < table.header.size(); ++k)
    if (table.header[k] == wanted) {
      idx = k;
      found = true;
    }
  if (!found && column) throw FormatError(path.string() + ": no column named '" + wanted + "'");
  std::vector<int> labels;
  labels.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    labels.push_back(parse_number<int>(table.rows[i][idx], path, table.line_numbers[i],
                                       table.header[idx]));
  return labels;
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

Json matrix_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = Json::array();
  for (double v : m.data()) j["data"].push_back(v);
  return j;
}

void require_keys(const Json& j, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw FormatError(where + ": unknown key '" + key + "'");
  for (const auto& key : required)
    if (!j.contains(key)) throw FormatError(where + ": missing key '" + key + "'");
}

Matrix matrix_from(const Json& j, const std::string& where) {
  require_keys(j, {"rows", "cols", "data"}, {"rows", "cols", "data"}, where);
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto& data = j.at("data");
  if (!data.is_array() || data.size() != rows * cols)
    throw FormatError(where + ": data length does not match shape");
  Matrix m(rows, cols);
  for (std::size_t k = 0; k < data.size(); ++k) m.data()[k] = data[k].get<double>();
  return m;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json config_json(const FitConfig& c) {
  Json j;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["delta"] = c.delta;
  j["gamma"] = c.gamma;
  j["lambda"] = c.lambda;
  j["epsilon"] = number_or_null(c.epsilon);  // null encodes +inf
  j["max_iter"] = c.max_iter;
  j["max_cardinality"] = c.max_cardinality;
  j["ridge"] = c.ridge;
  return j;
}

FitConfig config_from(const Json& j) {
  const std::set<std::string> keys = {"alpha",    "beta",           "delta", "gamma", "lambda",
                                      "epsilon",  "max_iter",       "max_cardinality", "ridge"};
  require_keys(j, keys, keys, "config");
  FitConfig c;
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.delta = j.at("delta").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.epsilon = j.at("epsilon").is_null() ? std::numeric_limits<double>::infinity()
                                        : j.at("epsilon").get<double>();
  c.max_iter = j.at("max_iter").get<int>();
  c.max_cardinality = j.at("max_cardinality").get<std::size_t>();
  c.ridge = j.at("ridge").get<double>();
  return c;
}

Json structure_json(const FocalStructure& s) {
  Json sets = Json::array();
  for (const auto& members : s.sets()) {
    Json set = Json::array();
    for (std::size_t k : members) set.push_back(k + 1);
    sets.push_back(std::move(set));
  }
  return sets;
}

// Rebuilds the canonical structure and checks the stored sets against it.
FocalStructure structure_from(const Json& sets, std::size_t clusters, std::size_t cap,
                              const std::string& where) {
  FocalStructure s;
  try {
    s = enumerate_focal_sets(clusters, cap);
  } catch (const InvalidArgument& e) {
    throw FormatError(where + ": " + e.what());
  }
  if (!sets.is_array() || sets.size() != s.size())
    throw FormatError(where + ": focal set list does not match the canonical enumeration");
  for (std::size_t j = 0; j < s.size(); ++j) {
    std::vector<std::size_t> members;
    for (const auto& k : sets[j]) {
      const auto one_based = k.get<std::size_t>();
      if (one_based < 1) throw FormatError(where + ": cluster indices start at 1");
      members.push_back(one_based - 1);
    }
    if (members != s.members(j))
      throw FormatError(where + ": focal set " + std::to_string(j) + " out of canonical order");
  }
  return s;
}

void check_version(const Json& j, const std::string& where) {
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer())
    throw FormatError(where + ": missing schema_version");
  const int version = j.at("schema_version").get<int>();
  if (version != kSchemaVersion)
    throw FormatError(where + ": unsupported schema_version " + std::to_string(version) +
                      " (this build reads version " + std::to_string(kSchemaVersion) + ")");
}

Json parse(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(where + ": malformed JSON: " + e.what());
  }
}

template <typename F>
auto guarded(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

}  // namespace

ModelDocument to_document(const ClusterModel& model) {
  ModelDocument doc;
  doc.kind = model.association ? "tecm" : "ecm";
  doc.config = model.config;
  doc.structure = model.structure;
  doc.centers = model.centers;
  doc.barycenters = model.barycenters;
  if (model.association) doc.association = model.association->r;
  doc.objective_trace = model.objective_trace;
  doc.converged = model.converged;
  doc.iterations = model.iterations;
  return doc;
}

std::string model_to_json(const ModelDocument& doc) {
  Json j;
  j["schema_version"] = doc.schema_version;
  j["kind"] = doc.kind;
  j["seed"] = doc.config.seed;
  j["config"] = config_json(doc.config);
  j["clusters"] = doc.structure.clusters();
  j["structure"] = structure_json(doc.structure);
  j["centers"] = matrix_json(doc.centers);
  j["barycenters"] = matrix_json(doc.barycenters);
  if (doc.association) j["association"] = matrix_json(*doc.association);
  j["objective_trace"] = doc.objective_trace;
  j["converged"] = doc.converged;
  j["iterations"] = doc.iterations;
  return j.dump(2) + "\n";
}

ModelDocument model_from_json(const std::string& text) {
  const std::string where = "model";
  const Json j = parse(text, where);
  check_version(j, where);
  return guarded(where, [&] {
    require_keys(j,
                 {"schema_version", "kind", "seed", "config", "clusters", "structure", "centers",
                  "barycenters", "association", "objective_trace", "converged", "iterations"},
                 {"schema_version", "kind", "seed", "config", "clusters", "structure", "centers",
                  "barycenters", "objective_trace", "converged", "iterations"},
                 where);
    ModelDocument doc;
    doc.kind = j.at("kind").get<std::string>();
    if (doc.kind != "ecm" && doc.kind != "tecm")
      throw FormatError(where + ": kind must be 'ecm' or 'tecm'");
    doc.config = config_from(j.at("config"));
    doc.config.seed = j.at("seed").get<std::uint64_t>();
    const auto c = j.at("clusters").get<std::size_t>();
    doc.structure = structure_from(j.at("structure"), c, effective_cap(doc.config, c), where);
    doc.centers = matrix_from(j.at("centers"), where + ".centers");
    doc.barycenters = matrix_from(j.at("barycenters"), where + ".barycenters");
    if (j.contains("association"))
      doc.association = matrix_from(j.at("association"), where + ".association");
    doc.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    doc.converged = j.at("converged").get<bool>();
    doc.iterations = j.at("iterations").get<int>();

    if (doc.centers.rows() != c || doc.barycenters.rows() != doc.structure.size() ||
        doc.barycenters.cols() != doc.centers.cols())
      throw FormatError(where + ": centre/barycenter shapes inconsistent with structure");
    if (doc.association && doc.association->cols() != doc.structure.size())
      throw FormatError(where + ": association columns do not match structure");
    if ((doc.kind == "tecm") != doc.association.has_value())
      throw FormatError(where + ": association must be present exactly for tecm models");
    return doc;
  });
}

void write_model(const ModelDocument& doc, const std::filesystem::path& path) {
  write_file(path, model_to_json(doc));
}

ModelDocument read_model(const std::filesystem::path& path) {
  return model_from_json(read_file(path));
}

std::string knowledge_to_json(const SourceKnowledge& knowledge) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "source-knowledge";
  j["clusters"] = knowledge.structure.clusters();
  j["max_cardinality"] = knowledge.structure.max_cardinality();
  j["structure"] = structure_json(knowledge.structure);
  j["barycenters"] = matrix_json(knowledge.barycenters);
  return j.dump(2) + "\n";
}

SourceKnowledge knowledge_from_json(const std::string& text) {
  const std::string where = "source knowledge";
  const Json j = parse(text, where);
  check_version(j, where);
  return guarded(where, [&] {
    const std::set<std::string> keys = {"schema_version", "kind",      "clusters",
                                        "max_cardinality", "structure", "barycenters"};
    require_keys(j, keys, keys, where);
    if (j.at("kind") != "source-knowledge")
      throw FormatError(where + ": kind must be 'source-knowledge'");
    SourceKnowledge k;
    k.structure = structure_from(j.at("structure"), j.at("clusters").get<std::size_t>(),
                                 j.at("max_cardinality").get<std::size_t>(), where);
    k.barycenters = matrix_from(j.at("barycenters"), where + ".barycenters");
    if (k.barycenters.rows() != k.structure.size())
      throw FormatError(where + ": barycenter count does not match structure");
    for (double v : k.barycenters.data())
      if (!std::isfinite(v)) throw FormatError(where + ": non-finite barycenter");
    return k;
  });
}

void write_knowledge(const SourceKnowledge& knowledge, const std::filesystem::path& path) {
  write_file(path, knowledge_to_json(knowledge));
}

SourceKnowledge read_knowledge(const std::filesystem::path& path) {
  return knowledge_from_json(read_file(path));
}

std::string grid_report_to_json(const GridSearchResult& result, Scorer scorer) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["scorer"] = scorer == Scorer::accuracy ? "ac" : "silhouette";
  j["best_lambda"] = result.best_lambda;
  j["cells"] = Json::array();
  for (const auto& cell : result.cells) {
    Json c;
    c["lambda"] = cell.lambda;
    c["mean"] = cell.mean;
    c["std"] = cell.stddev;
    c["scores"] = cell.scores;
    j["cells"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

}  // namespace credal
