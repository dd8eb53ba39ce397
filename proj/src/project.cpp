#include "splitter/project.hpp"

#include <Eigen/Dense>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace splitter {

Matrix pca_project(const Matrix& vectors, std::size_t components) {
  const auto rows = static_cast<Eigen::Index>(vectors.rows());
  const auto cols = static_cast<Eigen::Index>(vectors.cols());
  if (cols < static_cast<Eigen::Index>(components)) {
    throw std::invalid_argument("need at least " + std::to_string(components) +
                                " dimensions to project, got " + std::to_string(cols));
  }
  if (rows == 0) return Matrix(0, components);

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> data(vectors.data().data(), rows, cols);
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(std::max<Eigen::Index>(rows - 1, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw std::runtime_error("PCA eigensolver failed");

  // Eigenvalues come out ascending.
  Eigen::MatrixXd axes(cols, static_cast<Eigen::Index>(components));
  for (std::size_t c = 0; c < components; ++c) {
    Eigen::VectorXd axis = solver.eigenvectors().col(cols - 1 - static_cast<Eigen::Index>(c));
    Eigen::Index pivot = 0;
    axis.cwiseAbs().maxCoeff(&pivot);
    if (axis(pivot) < 0) axis = -axis;
    axes.col(static_cast<Eigen::Index>(c)) = axis;
  }
  const Eigen::MatrixXd projected = centered * axes;

  Matrix out(vectors.rows(), components);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < components; ++c) {
      out.row(static_cast<std::size_t>(r))[c] = projected(r, static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

void write_coordinates(std::ostream& out, const std::vector<std::string>& labels,
                       const Matrix& coords) {
  if (labels.size() != coords.rows()) {
    throw std::invalid_argument("one label per coordinate row required");
  }
  out << "label";
  for (std::size_t c = 0; c < coords.cols(); ++c) out << "\tpc" << (c + 1);
  out << '\n' << std::setprecision(9);
  for (std::size_t r = 0; r < coords.rows(); ++r) {
    out << labels[r];
    for (double v : coords.row(r)) out << '\t' << v;
    out << '\n';
  }
}

}  // namespace splitter
