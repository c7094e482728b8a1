#pragma once

// CSV ingest for the command-line front end.
//
// Control points:  id,x,y,z,X,Y,Z[,var_src,var_dst | ,w]   (3D)
//                  id,x,y,X,Y[,var_src,var_dst | ,w]       (2D)
// New points:      id,x,y,z  or  id,x,y  (further columns ignored)
// Blank lines and lines starting with '#' are skipped.

#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "dqhelmert/errors.hpp"
#include "dqhelmert/problem.hpp"

namespace dqhelmert::cli {

// Carries the 1-based file line, the 1-based data row (0 for the header)
// and, when known, the 1-based column.
class ParseError : public Error {
 public:
  ParseError(int line, int row, int column, const std::string& message);

  int line() const { return line_; }
  int row() const { return row_; }
  int column() const { return column_; }

 private:
  int line_;
  int row_;
  int column_;
};

enum class WeightColumns { kNone, kVariances, kScalar };

struct ControlPointFile {
  Problem problem;  // weights taken from the columns, unit if there are none
  WeightColumns columns = WeightColumns::kNone;
};

ControlPointFile ReadControlPoints(std::istream& in, Dimension dim);

struct NamedPoint {
  std::string id;
  Vec3 coords = Vec3::Zero();
};

std::vector<NamedPoint> ReadPoints(std::istream& in, Dimension dim);

// Whitespace-delimited size×size matrix.
DenseMatrix ReadMatrix(std::istream& in, int size);

}  // namespace dqhelmert::cli
