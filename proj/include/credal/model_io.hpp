#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "credal/belief.hpp"
#include "credal/config.hpp"
#include "credal/dataset.hpp"
#include "credal/engine.hpp"
#include "credal/kernels.hpp"
#include "credal/matrix.hpp"

namespace credal {

inline constexpr int kSchemaVersion = 1;

/// Reads a comma-separated file with a mandatory header row. When
/// `label_column` is given, that column is parsed as integers, removed from
/// the features and stored as labels. Errors name the offending row and
/// column.
Dataset read_dataset_csv(const std::filesystem::path& path,
                         const std::optional<std::string>& label_column = std::nullopt);

/// Header f1..fp (plus y when labelled), 17 significant digits, LF endings.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

/// Per-object hardened output: label (1-based), outlier flag, empty mass.
void write_assignment_csv(const HardAssignment& hard, const CredalPartition& partition,
                          const std::filesystem::path& path);

/// Reads the `label` column of a file written by write_assignment_csv (or
/// the first column of any headered CSV) as integers.
std::vector<int> read_labels_csv(const std::filesystem::path& path,
                                 const std::optional<std::string>& column = std::nullopt);

/// Persisted form of a fitted model. Masses are not stored; they follow from
/// the centres and the data.
struct ModelDocument {
  int schema_version = kSchemaVersion;
  std::string kind;  // "ecm" or "tecm"
  FitConfig config;
  FocalStructure structure;
  Matrix centers;
  Matrix barycenters;
  std::optional<Matrix> association;
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations = 0;

  friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

ModelDocument to_document(const ClusterModel& model);

std::string model_to_json(const ModelDocument& doc);
ModelDocument model_from_json(const std::string& text);
void write_model(const ModelDocument& doc, const std::filesystem::path& path);
ModelDocument read_model(const std::filesystem::path& path);

std::string knowledge_to_json(const SourceKnowledge& knowledge);
SourceKnowledge knowledge_from_json(const std::string& text);
void write_knowledge(const SourceKnowledge& knowledge, const std::filesystem::path& path);
SourceKnowledge read_knowledge(const std::filesystem::path& path);

std::string grid_report_to_json(const GridSearchResult& result, Scorer scorer);

/// Shortest decimal that reads back to the same double (at most 17
/// significant digits).
std::string format_double(double v);

}  // namespace credal
