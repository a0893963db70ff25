#include "taylormap/observations.hpp"

#include "taylormap/errors.hpp"

#include <algorithm>
#include <string>

namespace taylormap {

std::size_t Observation::observed_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

ObservationSeries::ObservationSeries(std::vector<Observation> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.tap < 1) throw ShapeError("observation taps start at 1");
    if (i > 0 && r.tap <= records_[i - 1].tap)
      throw ShapeError("observation taps must be strictly increasing (tap " + std::to_string(r.tap) + ")");
    if (static_cast<std::size_t>(r.values.size()) != r.mask.size())
      throw ShapeError("observation at tap " + std::to_string(r.tap) + " has mismatched mask");
    if (r.values.size() != records_[0].values.size())
      throw ShapeError("observations must share one state dimension");
  }
}

std::size_t ObservationSeries::observed_count() const {
  std::size_t count = 0;
  for (const auto& r : records_) count += r.observed_count();
  return count;
}

}  // namespace taylormap
