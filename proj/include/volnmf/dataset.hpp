#pragma once

#include <optional>
#include <string>
#include <vector>

#include "volnmf/matrix.hpp"

namespace volnmf {

/// An observation matrix with optional ground-truth factors and labels.
/// Synthetic data carries both truths (noiseless, X == M H); loaded data
/// usually carries only X and whatever labels the file had.
struct Dataset {
    Matrix x;
    std::optional<Matrix> m_true;
    std::optional<Matrix> h_true;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

} // namespace volnmf
