#include "curlme/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace curlme {

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols,
                                         std::vector<Triplet> entries) {
  if (rows < 0 || cols < 0)
    throw std::invalid_argument("SparseMatrix: negative dimension");
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("SparseMatrix: triplet index out of range");
    if (!std::isfinite(t.value))
      throw std::invalid_argument("SparseMatrix: non-finite value");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(static_cast<size_t>(rows) + 1, 0);
  m.col_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    // duplicates accumulate
    if (!m.col_idx_.empty() && i > 0 && entries[i].row == entries[i - 1].row &&
        entries[i].col == entries[i - 1].col) {
      m.values_.back() += entries[i].value;
    } else {
      m.col_idx_.push_back(entries[i].col);
      m.values_.push_back(entries[i].value);
      m.row_ptr_[static_cast<size_t>(entries[i].row) + 1]++;
    }
  }
  for (size_t r = 0; r < static_cast<size_t>(rows); ++r)
    m.row_ptr_[r + 1] += m.row_ptr_[r];
  m.build_column_index();
  return m;
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& m, double drop_tol) {
  std::vector<Triplet> t;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > drop_tol) t.push_back({i, j, m(i, j)});
  return from_triplets(m.rows(), m.cols(), std::move(t));
}

void SparseMatrix::build_column_index() {
  col_ptr_.assign(static_cast<size_t>(cols_) + 1, 0);
  row_idx_.assign(values_.size(), 0);
  val_pos_.assign(values_.size(), 0);
  for (Index c : col_idx_) col_ptr_[static_cast<size_t>(c) + 1]++;
  for (size_t c = 0; c < static_cast<size_t>(cols_); ++c)
    col_ptr_[c + 1] += col_ptr_[c];
  std::vector<Index> next(col_ptr_.begin(), col_ptr_.end() - 1);
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const Index c = col_idx_[static_cast<size_t>(k)];
      const Index slot = next[static_cast<size_t>(c)]++;
      row_idx_[static_cast<size_t>(slot)] = r;
      val_pos_[static_cast<size_t>(slot)] = k;
    }
  }
}

void SparseMatrix::scale(double a) {
  for (double& v : values_) v *= a;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out = DenseMatrix::Zero(rows_, cols_);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out(r, col_idx_[static_cast<size_t>(k)]) += values_[static_cast<size_t>(k)];
  return out;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      t.push_back({col_idx_[static_cast<size_t>(k)], r, values_[static_cast<size_t>(k)]});
  return from_triplets(cols_, rows_, std::move(t));
}

DenseMatrix SparseMatrix::block(IndexSpan p, IndexSpan q) const {
  std::vector<Index> col_slot(static_cast<size_t>(cols_), -1);
  for (size_t j = 0; j < q.size(); ++j) {
    if (q[j] < 0 || q[j] >= cols_)
      throw std::invalid_argument("SparseMatrix::block: column index out of range");
    col_slot[static_cast<size_t>(q[j])] = static_cast<Index>(j);
  }
  DenseMatrix out = DenseMatrix::Zero(static_cast<Index>(p.size()),
                                      static_cast<Index>(q.size()));
  for (size_t i = 0; i < p.size(); ++i) {
    const Index r = p[i];
    if (r < 0 || r >= rows_)
      throw std::invalid_argument("SparseMatrix::block: row index out of range");
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const Index slot = col_slot[static_cast<size_t>(col_idx_[static_cast<size_t>(k)])];
      if (slot >= 0) out(static_cast<Index>(i), slot) += values_[static_cast<size_t>(k)];
    }
  }
  return out;
}

DenseMatrix SparseMatrix::left_mul(const DenseMatrix& x) const {
  if (x.rows() != cols_)
    throw std::invalid_argument("sp_left_mul: shape mismatch");
  DenseMatrix out = DenseMatrix::Zero(rows_, x.cols());
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out.row(r) += values_[static_cast<size_t>(k)] *
                    x.row(col_idx_[static_cast<size_t>(k)]);
  return out;
}

DenseMatrix SparseMatrix::right_mul(const DenseMatrix& x) const {
  if (x.cols() != rows_)
    throw std::invalid_argument("sp_right_mul: shape mismatch");
  DenseMatrix out = DenseMatrix::Zero(x.rows(), cols_);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out.col(col_idx_[static_cast<size_t>(k)]) += values_[static_cast<size_t>(k)] * x.col(r);
  return out;
}

DenseMatrix SparseMatrix::rows_times(IndexSpan p, const DenseMatrix& x) const {
  if (x.rows() != cols_)
    throw std::invalid_argument("rows_times: shape mismatch");
  DenseMatrix out = DenseMatrix::Zero(static_cast<Index>(p.size()), x.cols());
  for (size_t i = 0; i < p.size(); ++i) {
    const Index r = p[i];
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out.row(static_cast<Index>(i)) += values_[static_cast<size_t>(k)] *
                                        x.row(col_idx_[static_cast<size_t>(k)]);
  }
  return out;
}

DenseMatrix SparseMatrix::cols_transpose_times(IndexSpan q, const DenseMatrix& x) const {
  if (x.rows() != rows_)
    throw std::invalid_argument("cols_transpose_times: shape mismatch");
  DenseMatrix out = DenseMatrix::Zero(static_cast<Index>(q.size()), x.cols());
  for (size_t j = 0; j < q.size(); ++j) {
    const Index c = q[j];
    for (Index k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k)
      out.row(static_cast<Index>(j)) +=
          values_[static_cast<size_t>(val_pos_[static_cast<size_t>(k)])] *
          x.row(row_idx_[static_cast<size_t>(k)]);
  }
  return out;
}

IndexVector SparseMatrix::column_support(IndexSpan q) const {
  std::vector<char> seen(static_cast<size_t>(rows_), 0);
  for (Index c : q) {
    if (c < 0 || c >= cols_)
      throw std::invalid_argument("column_support: index out of range");
    for (Index k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k)
      seen[static_cast<size_t>(row_idx_[static_cast<size_t>(k)])] = 1;
  }
  IndexVector out;
  for (Index r = 0; r < rows_; ++r)
    if (seen[static_cast<size_t>(r)]) out.push_back(r);
  return out;
}

IndexVector SparseMatrix::row_support(IndexSpan p) const {
  std::vector<char> seen(static_cast<size_t>(cols_), 0);
  for (Index r : p) {
    if (r < 0 || r >= rows_)
      throw std::invalid_argument("row_support: index out of range");
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      seen[static_cast<size_t>(col_idx_[static_cast<size_t>(k)])] = 1;
  }
  IndexVector out;
  for (Index c = 0; c < cols_; ++c)
    if (seen[static_cast<size_t>(c)]) out.push_back(c);
  return out;
}

DenseMatrix sp_left_mul(const SparseMatrix& a, const DenseMatrix& x) {
  return a.left_mul(x);
}

DenseMatrix sp_right_mul(const DenseMatrix& x, const SparseMatrix& b) {
  return b.right_mul(x);
}

SparseMatrix read_matrix_market_stream(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("matrix market: empty stream");
  if (line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("matrix market: missing header");
  std::istringstream hs(line);
  std::string tag, object, format, field, symmetry;
  hs >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate" || field != "real")
    throw std::runtime_error("matrix market: only real coordinate matrices supported");
  const bool symmetric = symmetry == "symmetric";

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream ss(line);
  Index rows = 0, cols = 0;
  long long count = 0;
  ss >> rows >> cols >> count;
  if (!ss) throw std::runtime_error("matrix market: bad size line");

  std::vector<SparseMatrix::Triplet> t;
  t.reserve(static_cast<size_t>(count));
  for (long long i = 0; i < count; ++i) {
    Index r, c;
    double v;
    in >> r >> c >> v;
    if (!in) throw std::runtime_error("matrix market: truncated entries");
    t.push_back({r - 1, c - 1, v});
    if (symmetric && r != c) t.push_back({c - 1, r - 1, v});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

void write_matrix_market_stream(const SparseMatrix& m, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
  char buf[64];
  const auto& rp = m.row_offsets();
  const auto& ci = m.column_indices();
  const auto& v = m.values();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index k = rp[r]; k < rp[r + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%lld %lld %.17g\n",
                    static_cast<long long>(r + 1),
                    static_cast<long long>(ci[static_cast<size_t>(k)] + 1),
                    v[static_cast<size_t>(k)]);
      out << buf;
    }
  }
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_matrix_market_stream(in);
}

void write_matrix_market(const SparseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_matrix_market_stream(m, out);
}

DenseMatrix read_dense(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Index rows = 0, cols = 0;
  in >> rows >> cols;
  if (!in || rows < 0 || cols < 0)
    throw std::runtime_error("dense read: bad header in " + path);
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      in >> m(i, j);
      if (!in) throw std::runtime_error("dense read: truncated values in " + path);
    }
  return m;
}

void write_dense(const DenseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << m.rows() << " " << m.cols() << "\n";
  char buf[48];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << buf << (j + 1 == m.cols() ? "\n" : " ");
    }
  }
}

}  // namespace curlme
