#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace taylormap {

/// Measured state at one network tap. Components with mask == false are
/// latent; their entries in `values` are ignored.
struct Observation {
  std::size_t tap = 0;
  Eigen::VectorXd values;
  std::vector<bool> mask;

  std::size_t observed_count() const;
};

/// Observations ordered by strictly increasing tap.
class ObservationSeries {
 public:
  ObservationSeries() = default;
  explicit ObservationSeries(std::vector<Observation> records);

  const std::vector<Observation>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t observed_count() const;
  std::size_t last_tap() const { return records_.empty() ? 0 : records_.back().tap; }

 private:
  std::vector<Observation> records_;
};

}  // namespace taylormap
