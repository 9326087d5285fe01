#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace mocaprec {

using Scalar = double;
using ArrayX = Eigen::ArrayXd;
using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Index = Eigen::Index;

// Activity labels live in 1..10; 0 marks unlabeled (test) rows.
inline constexpr int kUnlabeled = 0;
inline constexpr int kMinLabel = 1;
inline constexpr int kMaxLabel = 10;

inline bool is_valid_label(int label) { return label >= kMinLabel && label <= kMaxLabel; }

} // namespace mocaprec
