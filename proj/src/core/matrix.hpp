#pragma once

#include <cassert>
#include <span>
#include <vector>

namespace sift {

// Row-major dense matrix of doubles.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

    double& at(int r, int c) {
        return data[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)];
    }
    double at(int r, int c) const {
        return data[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)];
    }
    std::span<double> row(int r) {
        return {data.data() + static_cast<size_t>(r) * static_cast<size_t>(cols), static_cast<size_t>(cols)};
    }
    std::span<const double> row(int r) const {
        return {data.data() + static_cast<size_t>(r) * static_cast<size_t>(cols), static_cast<size_t>(cols)};
    }
};

} // namespace sift
