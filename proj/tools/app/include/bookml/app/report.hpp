#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bookml/metrics.hpp"
#include "bookml/tree.hpp"

namespace bookml::app {

// Aligned plain-text table: first column left-aligned, the rest right-aligned.
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render() const;
};

// Fixed-point text with `digits` decimals.
std::string fixed(double v, int digits = 4);
std::string seconds_text(double s);

// Columns: Model, Accuracy, Precision, Recall, F1, Time.
TextTable classification_table();
void add_classification_row(TextTable& t, std::string_view model, const MetricsReport& r, double seconds);

// Columns: Feature, Importance; rows sorted by importance, descending.
TextTable importance_table(const BlockMap& blocks, const Importances& imp);

TextTable confusion_table(const MetricsReport& r, const std::vector<std::string>& class_names);

// Output directory owned by one command run. The completion marker is
// removed on open and written by finish(), so a partial run never looks
// complete.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  const std::filesystem::path& path() const noexcept { return dir_; }
  // Writes via a temporary file and rename.
  void write(std::string_view name, std::string_view content) const;
  void finish() const;

  static constexpr std::string_view kMarker = "_SUCCESS";

 private:
  std::filesystem::path dir_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace bookml::app
