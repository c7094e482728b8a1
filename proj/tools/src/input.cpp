#include "dqhelmert_cli/input.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace dqhelmert::cli {
namespace {

std::string Locate(int line, int row, int column) {
  std::string where = fmt::format("line {}", line);
  where += row > 0 ? fmt::format(", row {}", row) : std::string(" (header)");
  if (column > 0) where += fmt::format(", column {}", column);
  return where;
}

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> Split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Reads non-empty, non-comment lines with their 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool Next(std::string& text) {
    while (std::getline(in_, text)) {
      ++line_;
      if (!text.empty() && text.back() == '\r') text.pop_back();
      const std::string trimmed = Trim(text);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      return true;
    }
    return false;
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

double ParseNumber(const std::string& text, int line, int row, int column,
                   const std::string& name) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError(line, row, column,
                     fmt::format("cannot read '{}' as a number for {}", text, name));
  }
  return value;
}

struct Layout {
  Dimension dim = Dimension::k3D;
  WeightColumns weights = WeightColumns::kNone;
  size_t fields = 0;
};

std::string Join(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

const std::vector<std::string> kHeader3{"id", "x", "y", "z", "X", "Y", "Z"};
const std::vector<std::string> kHeader2{"id", "x", "y", "X", "Y"};

Layout ControlLayout(const std::vector<std::string>& header, int line, Dimension dim) {
  Layout layout;
  const auto starts_with = [&](const std::vector<std::string>& prefix) {
    return header.size() >= prefix.size() &&
           std::equal(prefix.begin(), prefix.end(), header.begin());
  };
  if (starts_with(kHeader3)) {
    layout.dim = Dimension::k3D;
  } else if (starts_with(kHeader2)) {
    layout.dim = Dimension::k2D;
  } else {
    throw ParseError(line, 0, 0,
                     fmt::format("expected header '{}' or '{}', got '{}'", Join(kHeader3),
                                 Join(kHeader2), Join(header)));
  }
  if (layout.dim != dim) {
    throw ParseError(line, 0, 0,
                     fmt::format("dimension mismatch: the file has {}D columns but the run "
                                 "uses --dim {}",
                                 static_cast<int>(layout.dim), static_cast<int>(dim)));
  }
  const size_t base = layout.dim == Dimension::k3D ? kHeader3.size() : kHeader2.size();
  const std::vector<std::string> extra(header.begin() + base, header.end());
  if (extra.empty()) {
    layout.weights = WeightColumns::kNone;
  } else if (extra == std::vector<std::string>{"var_src", "var_dst"}) {
    layout.weights = WeightColumns::kVariances;
  } else if (extra == std::vector<std::string>{"w"}) {
    layout.weights = WeightColumns::kScalar;
  } else {
    throw ParseError(line, 0, static_cast<int>(base) + 1,
                     fmt::format("unknown weight columns '{}'; expected 'var_src,var_dst' or 'w'",
                                 Join(extra)));
  }
  layout.fields = header.size();
  return layout;
}

}  // namespace

ParseError::ParseError(int line, int row, int column, const std::string& message)
    : Error(ErrorCode::kParseError, Locate(line, row, column) + ": " + message),
      line_(line),
      row_(row),
      column_(column) {}

ControlPointFile ReadControlPoints(std::istream& in, Dimension dim) {
  LineReader reader(in);
  std::string text;
  if (!reader.Next(text)) throw ParseError(reader.line() + 1, 0, 0, "empty input");
  const std::vector<std::string> header = Split(text);
  const Layout layout = ControlLayout(header, reader.line(), dim);

  ControlPointFile file;
  file.columns = layout.weights;
  file.problem.dim = dim;
  weights::PerPointVariances variances;
  weights::PerPointScalar scalar;
  int row = 0;
  while (reader.Next(text)) {
    ++row;
    const std::vector<std::string> f = Split(text);
    if (f.size() != layout.fields) {
      throw ParseError(reader.line(), row, 0,
                       fmt::format("expected {} fields ({}), got {}", layout.fields,
                                   Join(header), f.size()));
    }
    std::vector<double> values;
    for (size_t c = 1; c < f.size(); ++c) {
      values.push_back(ParseNumber(f[c], reader.line(), row, static_cast<int>(c) + 1, header[c]));
    }
    ControlPointPair point;
    point.id = f[0];
    size_t next = 0;
    if (layout.dim == Dimension::k3D) {
      point.source = Vec3(values[0], values[1], values[2]);
      point.target = Vec3(values[3], values[4], values[5]);
      next = 6;
    } else {
      point.source = Vec3(values[0], values[1], 0.0);
      point.target = Vec3(values[2], values[3], 0.0);
      next = 4;
    }
    if (layout.weights == WeightColumns::kVariances) {
      variances.source.push_back(values[next]);
      variances.target.push_back(values[next + 1]);
    } else if (layout.weights == WeightColumns::kScalar) {
      scalar.weights.push_back(values[next]);
    }
    file.problem.points.push_back(std::move(point));
  }
  if (layout.weights == WeightColumns::kVariances) {
    file.problem.weights.kind = variances;
  } else if (layout.weights == WeightColumns::kScalar) {
    file.problem.weights.kind = scalar;
  }
  return file;
}

std::vector<NamedPoint> ReadPoints(std::istream& in, Dimension dim) {
  LineReader reader(in);
  std::string text;
  if (!reader.Next(text)) throw ParseError(reader.line() + 1, 0, 0, "empty input");
  const std::vector<std::string> header = Split(text);
  const bool has_z = header.size() >= 4 && header[3] == "z";
  if (header.size() < 3 || header[0] != "id" || header[1] != "x" || header[2] != "y") {
    throw ParseError(reader.line(), 0, 0,
                     fmt::format("expected header starting with 'id,x,y', got '{}'", Join(header)));
  }
  const Dimension file_dim = has_z ? Dimension::k3D : Dimension::k2D;
  if (file_dim != dim) {
    throw ParseError(reader.line(), 0, 0,
                     fmt::format("dimension mismatch: the file has {}D points but the run "
                                 "uses --dim {}",
                                 static_cast<int>(file_dim), static_cast<int>(dim)));
  }
  const size_t used = has_z ? 4 : 3;
  std::vector<NamedPoint> points;
  int row = 0;
  while (reader.Next(text)) {
    ++row;
    const std::vector<std::string> f = Split(text);
    if (f.size() != header.size()) {
      throw ParseError(reader.line(), row, 0,
                       fmt::format("expected {} fields, got {}", header.size(), f.size()));
    }
    NamedPoint p;
    p.id = f[0];
    for (size_t c = 1; c < used; ++c) {
      p.coords[c - 1] =
          ParseNumber(f[c], reader.line(), row, static_cast<int>(c) + 1, header[c]);
    }
    points.push_back(std::move(p));
  }
  return points;
}

DenseMatrix ReadMatrix(std::istream& in, int size) {
  DenseMatrix m(size, size);
  std::string token;
  int line = 1;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      // Track line numbers through the whitespace we skip.
      while (std::isspace(in.peek())) {
        if (in.get() == '\n') ++line;
      }
      if (!(in >> token)) {
        throw ParseError(line, i + 1, j + 1,
                         fmt::format("weight matrix ended early; expected {}x{} entries", size, size));
      }
      m(i, j) = ParseNumber(token, line, i + 1, j + 1, "weight matrix entry");
    }
  }
  if (in >> token) {
    throw ParseError(line, size, size,
                     fmt::format("weight matrix has more than {}x{} entries", size, size));
  }
  return m;
}

}  // namespace dqhelmert::cli
