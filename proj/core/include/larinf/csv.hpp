#ifndef LARINF_CSV_HPP
#define LARINF_CSV_HPP

#include <Eigen/Dense>
#include <string>

namespace larinf {

// Header-free comma-separated numeric files, row-major, IEEE-754 doubles.
Eigen::MatrixXd read_csv_matrix(const std::string& path);

// Single-column variant (one value per row).
Eigen::VectorXd read_csv_vector(const std::string& path);

void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace larinf

#endif
