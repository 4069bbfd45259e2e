#include <string>

#include "bookml/error.hpp"
#include "bookml/features.hpp"
#include "bookml/table_ops.hpp"

namespace bookml {

MinMaxState fit_minmax(const Table& t, std::string_view col) {
  const auto s = column_stats(t, col);
  if (s.non_null_count == 0) throw_data("min-max: column '" + std::string(col) + "' has no values");
  return MinMaxState{*s.min, *s.max};
}

double transform_minmax(const MinMaxState& state, double x) {
  if (!(state.max > state.min)) return 0.5;
  return (x - state.min) / (state.max - state.min);
}

int binarize_label(long long score) {
  if (score < 1 || score > 5) throw_data("rating " + std::to_string(score) + " outside 1..5");
  return score <= 3 ? 0 : 1;
}

FeatureVector assemble(std::span<const FeaturePart> parts) {
  std::size_t offset = 0;
  std::vector<std::uint32_t> idx;
  std::vector<double> vals;
  for (const auto& part : parts) {
    if (const auto* s = std::get_if<double>(&part)) {
      if (*s != 0.0) {
        idx.push_back(static_cast<std::uint32_t>(offset));
        vals.push_back(*s);
      }
      offset += 1;
    } else {
      const auto& v = std::get<FeatureVector>(part);
      v.for_each_nonzero([&](std::size_t i, double x) {
        idx.push_back(static_cast<std::uint32_t>(offset + i));
        vals.push_back(x);
      });
      offset += v.dimension();
    }
  }
  return FeatureVector::sparse(offset, std::move(idx), std::move(vals));
}

BlockMap make_block_map(std::span<const std::string> names, std::span<const FeaturePart> parts) {
  if (names.size() != parts.size()) throw_config("block map: one name per part required");
  BlockMap map;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::size_t len = std::holds_alternative<double>(parts[i])
                                ? 1
                                : std::get<FeatureVector>(parts[i]).dimension();
    map.push_back(Block{names[i], offset, len});
    offset += len;
  }
  return map;
}

FeatureVector slice_block(const FeatureVector& assembled, const Block& b) {
  if (b.offset + b.length > assembled.dimension()) throw_data("block outside vector");
  std::vector<std::uint32_t> idx;
  std::vector<double> vals;
  assembled.for_each_nonzero([&](std::size_t i, double x) {
    if (i >= b.offset && i < b.offset + b.length) {
      idx.push_back(static_cast<std::uint32_t>(i - b.offset));
      vals.push_back(x);
    }
  });
  return FeatureVector::sparse(b.length, std::move(idx), std::move(vals));
}

}  // namespace bookml
