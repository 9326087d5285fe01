#pragma once

#include "mocaprec/types.hpp"

#include <string>
#include <vector>

namespace mocaprec {

// Integer counts, rows = true label, columns = predicted, in ascending label
// order over a fixed class list.
class ConfusionMatrix {
public:
  explicit ConfusionMatrix(std::vector<int> classes);

  void add(int true_label, int predicted_label);

  const std::vector<int>& classes() const { return classes_; }
  long long at(int true_label, int predicted_label) const;
  long long total() const;
  long long trace() const;
  double accuracy() const; // trace / total; 0 for the empty matrix

  std::string to_csv() const;

private:
  int index_of(int label) const;

  std::vector<int> classes_;
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts_;
};

// Equal-length label sequences; classes = configured label domain.
ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted,
                                 std::vector<int> classes);

} // namespace mocaprec
