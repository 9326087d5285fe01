#include "mocaprec/confusion.hpp"

#include "mocaprec/error.hpp"

#include <algorithm>
#include <sstream>

namespace mocaprec {

ConfusionMatrix::ConfusionMatrix(std::vector<int> classes) : classes_(std::move(classes)) {
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
  const auto c = static_cast<Index>(classes_.size());
  counts_.setZero(c, c);
}

int ConfusionMatrix::index_of(int label) const {
  const auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
  if (it == classes_.end() || *it != label)
    raise(Err::BadLabel, "label " + std::to_string(label) + " not in confusion matrix domain");
  return static_cast<int>(it - classes_.begin());
}

void ConfusionMatrix::add(int true_label, int predicted_label) {
  counts_(index_of(true_label), index_of(predicted_label)) += 1;
}

long long ConfusionMatrix::at(int true_label, int predicted_label) const {
  return counts_(index_of(true_label), index_of(predicted_label));
}

long long ConfusionMatrix::total() const { return counts_.sum(); }

long long ConfusionMatrix::trace() const { return counts_.trace(); }

double ConfusionMatrix::accuracy() const {
  const long long n = total();
  return n > 0 ? static_cast<double>(trace()) / static_cast<double>(n) : 0.0;
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  out << "true\\pred";
  for (int c : classes_) out << ',' << c;
  out << '\n';
  for (Index r = 0; r < counts_.rows(); ++r) {
    out << classes_[static_cast<std::size_t>(r)];
    for (Index c = 0; c < counts_.cols(); ++c) out << ',' << counts_(r, c);
    out << '\n';
  }
  return out.str();
}

ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted,
                                 std::vector<int> classes) {
  if (truth.size() != predicted.size())
    raise(Err::LengthMismatch, "truth and prediction lengths differ");
  ConfusionMatrix m(std::move(classes));
  for (std::size_t i = 0; i < truth.size(); ++i) m.add(truth[i], predicted[i]);
  return m;
}

} // namespace mocaprec
