#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "splitter/embedding.hpp"

namespace splitter {

// Coordinates of the rows on the top principal components of the centered
// data. Each axis is oriented so its largest-magnitude loading is positive.
Matrix pca_project(const Matrix& vectors, std::size_t components = 2);

// `label<TAB>x<TAB>y` rows with a header line.
void write_coordinates(std::ostream& out, const std::vector<std::string>& labels,
                       const Matrix& coords);

}  // namespace splitter
