#include "synergy/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace synergy {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(path + ": cannot open");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw CsvError(path + ": empty file");
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& cell, const std::string& path, size_t lineno) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw CsvError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
  }
  return v;
}

long long parse_int(const std::string& cell, const std::string& path, size_t lineno) {
  long long v = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw CsvError(path + ":" + std::to_string(lineno) + ": bad integer '" + cell + "'");
  }
  return v;
}

int parse_index(const std::string& cell, const std::string& path, size_t lineno) {
  long long v = parse_int(cell, path, lineno);
  if (v < 0 || v > 1000000) {
    throw CsvError(path + ":" + std::to_string(lineno) + ": index out of range");
  }
  return static_cast<int>(v);
}

void expect_header(const std::string& got, const std::string& want, const std::string& path) {
  if (got != want) {
    throw CsvError(path + ": expected header '" + want + "', got '" + got + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError(path + ": cannot write");
  out << body;
  if (!out) throw CsvError(path + ": write failed");
}

}  // namespace

DiscreteJoint read_joint_csv(const std::string& path) {
  auto lines = read_lines(path);
  expect_header(lines[0], "x1,x2,y,p", path);
  std::map<std::array<int, 3>, double> cells;
  Dims d{0, 0, 0};
  for (size_t ln = 1; ln < lines.size(); ++ln) {
    auto cols = split(lines[ln]);
    if (cols.size() != 4) {
      throw CsvError(path + ":" + std::to_string(ln + 1) + ": expected 4 columns");
    }
    std::array<int, 3> key{parse_index(cols[0], path, ln + 1),
                           parse_index(cols[1], path, ln + 1),
                           parse_index(cols[2], path, ln + 1)};
    if (!cells.emplace(key, parse_double(cols[3], path, ln + 1)).second) {
      throw CsvError(path + ":" + std::to_string(ln + 1) + ": duplicate cell");
    }
    d.n1 = std::max(d.n1, key[0] + 1);
    d.n2 = std::max(d.n2, key[1] + 1);
    d.ny = std::max(d.ny, key[2] + 1);
  }
  if (d.atoms() == 0) throw CsvError(path + ": no data rows");
  std::vector<double> mass(static_cast<size_t>(d.atoms()), 0.0);
  for (const auto& [key, p] : cells) {
    mass[static_cast<size_t>((key[0] * d.n2 + key[1]) * d.ny + key[2])] = p;
  }
  return DiscreteJoint(d, std::move(mass));
}

void write_joint_csv(const std::string& path, const DiscreteJoint& j) {
  std::ostringstream out;
  out << "x1,x2,y,p\n";
  const Dims& d = j.dims();
  for (int i = 0; i < d.n1; ++i) {
    for (int x2 = 0; x2 < d.n2; ++x2) {
      for (int k = 0; k < d.ny; ++k) {
        double p = j(i, x2, k);
        if (p != 0.0) out << i << ',' << x2 << ',' << k << ',' << fmt(p) << '\n';
      }
    }
  }
  write_file(path, out.str());
}

Eigen::MatrixXd read_marginal_csv(const std::string& path, const std::string& a,
                                  const std::string& b) {
  auto lines = read_lines(path);
  expect_header(lines[0], a + "," + b + ",p", path);
  std::map<std::pair<int, int>, double> cells;
  int rows = 0, cols = 0;
  for (size_t ln = 1; ln < lines.size(); ++ln) {
    auto parts = split(lines[ln]);
    if (parts.size() != 3) {
      throw CsvError(path + ":" + std::to_string(ln + 1) + ": expected 3 columns");
    }
    std::pair<int, int> key{parse_index(parts[0], path, ln + 1),
                            parse_index(parts[1], path, ln + 1)};
    if (!cells.emplace(key, parse_double(parts[2], path, ln + 1)).second) {
      throw CsvError(path + ":" + std::to_string(ln + 1) + ": duplicate cell");
    }
    rows = std::max(rows, key.first + 1);
    cols = std::max(cols, key.second + 1);
  }
  if (rows == 0 || cols == 0) throw CsvError(path + ": no data rows");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (const auto& [key, p] : cells) m(key.first, key.second) = p;
  return m;
}

void write_marginal_csv(const std::string& path, const Eigen::MatrixXd& m,
                        const std::string& a, const std::string& b) {
  std::ostringstream out;
  out << a << ',' << b << ",p\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) out << i << ',' << j << ',' << fmt(m(i, j)) << '\n';
    }
  }
  write_file(path, out.str());
}

MarginalDistribution read_distribution_csv(const std::string& path) {
  auto lines = read_lines(path);
  expect_header(lines[0], "i,p", path);
  std::map<int, double> cells;
  int n = 0;
  for (size_t ln = 1; ln < lines.size(); ++ln) {
    auto parts = split(lines[ln]);
    if (parts.size() != 2) {
      throw CsvError(path + ":" + std::to_string(ln + 1) + ": expected 2 columns");
    }
    int i = parse_index(parts[0], path, ln + 1);
    if (!cells.emplace(i, parse_double(parts[1], path, ln + 1)).second) {
      throw CsvError(path + ":" + std::to_string(ln + 1) + ": duplicate index");
    }
    n = std::max(n, i + 1);
  }
  if (n == 0) throw CsvError(path + ": no data rows");
  std::vector<double> p(static_cast<size_t>(n), 0.0);
  for (const auto& [i, v] : cells) p[static_cast<size_t>(i)] = v;
  return MarginalDistribution(std::move(p));
}

void write_distribution_csv(const std::string& path, const MarginalDistribution& p) {
  std::ostringstream out;
  out << "i,p\n";
  for (int i = 0; i < p.size(); ++i) out << i << ',' << fmt(p[i]) << '\n';
  write_file(path, out.str());
}

void write_coupling_csv(const std::string& path, const Eigen::MatrixXd& matrix) {
  std::ostringstream out;
  out << "i,j,p\n";
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (matrix(i, j) != 0.0) out << i << ',' << j << ',' << fmt(matrix(i, j)) << '\n';
    }
  }
  write_file(path, out.str());
}

void write_sweep_csv(const std::string& path, const SweepReport& report) {
  std::ostringstream out;
  out << "idx,S,s_agree,s_disagree,s_upper,alpha,r,u1,u2\n";
  for (const SweepRecord& rec : report.records) {
    if (!rec.ok) continue;
    out << rec.idx << ',' << fmt(rec.s) << ',' << fmt(rec.s_agree) << ','
        << fmt(rec.s_disagree) << ',' << fmt(rec.s_upper) << ',' << fmt(rec.alpha) << ','
        << fmt(rec.r) << ',' << fmt(rec.u1) << ',' << fmt(rec.u2) << '\n';
  }
  write_file(path, out.str());
}

FeatureTable read_features_csv(const std::string& path) {
  auto lines = read_lines(path);
  auto header = split(lines[0]);
  if (header.size() < 2 || header[0] != "id") {
    throw CsvError(path + ": expected header 'id,f0,...'");
  }
  for (size_t c = 1; c < header.size(); ++c) {
    if (header[c] != "f" + std::to_string(c - 1)) {
      throw CsvError(path + ": feature columns must be named f0,f1,...");
    }
  }
  const size_t dim = header.size() - 1;
  FeatureTable t;
  for (size_t ln = 1; ln < lines.size(); ++ln) {
    auto parts = split(lines[ln]);
    if (parts.size() != header.size()) {
      throw CsvError(path + ":" + std::to_string(ln + 1) + ": wrong column count");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
    for (size_t c = 1; c < parts.size(); ++c) {
      v(static_cast<Eigen::Index>(c - 1)) = parse_double(parts[c], path, ln + 1);
    }
    t.ids.push_back(parts[0]);
    t.rows.push_back(std::move(v));
  }
  if (t.ids.empty()) throw CsvError(path + ": no data rows");
  return t;
}

LabelTable read_labels_csv(const std::string& path) {
  auto lines = read_lines(path);
  expect_header(lines[0], "id,y", path);
  LabelTable t;
  for (size_t ln = 1; ln < lines.size(); ++ln) {
    auto parts = split(lines[ln]);
    if (parts.size() != 2) {
      throw CsvError(path + ":" + std::to_string(ln + 1) + ": expected 2 columns");
    }
    t.ids.push_back(parts[0]);
    t.labels.push_back(parse_int(parts[1], path, ln + 1));
  }
  if (t.ids.empty()) throw CsvError(path + ": no data rows");
  return t;
}

std::vector<std::pair<std::string, std::string>> read_pairs_csv(const std::string& path) {
  auto lines = read_lines(path);
  expect_header(lines[0], "id1,id2", path);
  std::vector<std::pair<std::string, std::string>> out;
  for (size_t ln = 1; ln < lines.size(); ++ln) {
    auto parts = split(lines[ln]);
    if (parts.size() != 2) {
      throw CsvError(path + ":" + std::to_string(ln + 1) + ": expected 2 columns");
    }
    out.emplace_back(parts[0], parts[1]);
  }
  if (out.empty()) throw CsvError(path + ": no data rows");
  return out;
}

}  // namespace synergy
