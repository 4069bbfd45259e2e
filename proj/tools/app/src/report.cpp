#include "bookml/app/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "bookml/error.hpp"

namespace bookml::app {

std::string TextTable::render() const {
  std::vector<std::size_t> width(header.size(), 0);
  const auto measure = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
  };
  measure(header);
  for (const auto& r : rows) measure(r);

  std::string out;
  const auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < row.size() ? row[c] : std::string();
      const std::string pad(width[c] - cell.size(), ' ');
      if (c > 0) line += "  ";
      line += c == 0 ? cell + pad : pad + cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string seconds_text(double s) { return fixed(s, 2) + "s"; }

TextTable classification_table() { return TextTable{{"Model", "Accuracy", "Precision", "Recall", "F1", "Time"}, {}}; }

void add_classification_row(TextTable& t, std::string_view model, const MetricsReport& r, double seconds) {
  t.rows.push_back({std::string(model), fixed(r.accuracy), fixed(r.weighted_precision), fixed(r.weighted_recall),
                    fixed(r.weighted_f1), seconds_text(seconds)});
}

TextTable importance_table(const BlockMap& blocks, const Importances& imp) {
  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return imp.per_block[a] > imp.per_block[b]; });
  TextTable t{{"Feature", "Importance"}, {}};
  for (auto b : order) t.rows.push_back({blocks[b].name, fixed(imp.per_block[b], 6)});
  return t;
}

TextTable confusion_table(const MetricsReport& r, const std::vector<std::string>& class_names) {
  TextTable t;
  t.header.push_back("truth \\ predicted");
  for (const auto& n : class_names) t.header.push_back(n);
  for (std::size_t i = 0; i < r.confusion.size(); ++i) {
    std::vector<std::string> row{i < class_names.size() ? class_names[i] : std::to_string(i)};
    for (auto c : r.confusion[i]) row.push_back(std::to_string(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw_data("cannot create output directory " + dir_.string() + ": " + ec.message());
  std::filesystem::remove(dir_ / std::string(kMarker), ec);
}

void OutputDir::write(std::string_view name, std::string_view content) const {
  const auto target = dir_ / std::string(name);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw_data("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw_data("cannot move " + tmp.string() + " into place: " + ec.message());
}

void OutputDir::finish() const { write(kMarker, ""); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bookml::app
