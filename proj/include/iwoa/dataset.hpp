#pragma once

#include <map>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace iwoa {

/// Feature matrix (one row per sample) with a target column and free-form
/// string metadata (units, provenance).
struct Dataset {
    Eigen::MatrixXd features;
    Eigen::VectorXd targets;
    std::map<std::string, std::string> metadata;

    Eigen::Index size() const noexcept { return targets.size(); }
    Eigen::Index width() const noexcept { return features.cols(); }

    /// Throws std::invalid_argument on shape mismatch, emptiness or non-finite values.
    void validate() const;

    /// Rows in the given order; metadata is copied.
    Dataset subset(std::span<const Eigen::Index> rows) const;
};

}  // namespace iwoa
