// Reference implementations used only by the tests. Each one follows the
// textbook definition as literally as possible and shares no code paths with
// the library beyond Eigen itself.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Mixed-radix digits of `index`, most significant first.
inline std::vector<std::size_t> digits(std::size_t index, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> d(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    d[k] = index % dims[k];
    index /= dims[k];
  }
  return d;
}

// <i| op_on (x) I_rest |j>: op indexed by the digits of `on` (in that order),
// delta on the remaining digits.
inline Mat embed(const Mat& op, const std::vector<std::size_t>& dims, const std::vector<std::size_t>& on) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  Mat out = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto di = digits(i, dims);
    for (std::size_t j = 0; j < n; ++j) {
      const auto dj = digits(j, dims);
      bool rest_equal = true;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        bool named = false;
        for (auto o : on) named = named || o == k;
        if (!named && di[k] != dj[k]) rest_equal = false;
      }
      if (!rest_equal) continue;
      std::size_t a = 0, b = 0;
      for (auto o : on) {
        a = a * dims[o] + di[o];
        b = b * dims[o] + dj[o];
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return out;
}

// Generalized Gell-Mann style basis of Hermitian d x d matrices (not normalized).
inline std::vector<Mat> hermitian_basis(std::size_t d) {
  std::vector<Mat> out;
  const auto n = static_cast<Eigen::Index>(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    Mat e = Mat::Zero(n, n);
    e(j, j) = 1.0;
    out.push_back(e);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      Mat s = Mat::Zero(n, n), a = Mat::Zero(n, n);
      s(j, k) = s(k, j) = 1.0;
      a(j, k) = C(0, -1);
      a(k, j) = C(0, 1);
      out.push_back(s);
      out.push_back(a);
    }
  }
  return out;
}

inline Mat vec_columns(const std::vector<Mat>& ms) {
  const Eigen::Index n = ms.front().size();
  Mat a(n, static_cast<Eigen::Index>(ms.size()));
  for (std::size_t c = 0; c < ms.size(); ++c)
    a.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::VectorXcd>(ms[c].data(), n);
  return a;
}

inline std::size_t rank(const Mat& a, double rel = 1e-9) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

inline std::size_t span_dim(const std::vector<Mat>& ms) { return ms.empty() ? 0 : rank(vec_columns(ms)); }

// Distance from m to span(ms), by least squares.
inline double distance_to_span(const std::vector<Mat>& ms, const Mat& m) {
  const Mat a = vec_columns(ms);
  const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
  const Eigen::VectorXcd x = a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(v);
  return (a * x - v).norm();
}

// Algebra generated by gens and I: keep multiplying every pair of elements of
// the current spanning set until the span stops growing.
inline std::size_t generated_dim(std::vector<Mat> gens) {
  const Eigen::Index n = gens.front().rows();
  std::vector<Mat> span = gens;
  for (const auto& g : gens) span.push_back(g.adjoint());
  span.push_back(Mat::Identity(n, n));
  std::size_t dim = span_dim(span);
  for (;;) {
    std::vector<Mat> next = span;
    for (const auto& a : span)
      for (const auto& b : span) next.push_back(a * b);
    // thin back out to a basis to keep the pair count bounded
    const Mat cols = vec_columns(next);
    Eigen::JacobiSVD<Mat> svd(cols, Eigen::ComputeThinU);
    const std::size_t r = rank(cols);
    span.clear();
    for (std::size_t c = 0; c < r; ++c) {
      Mat m(n, n);
      Eigen::Map<Eigen::VectorXcd>(m.data(), m.size()) = svd.matrixU().col(static_cast<Eigen::Index>(c));
      span.push_back(m);
    }
    if (r == dim) return r;
    dim = r;
  }
}

// Nullspace of a matrix by full SVD.
inline Mat null_basis(const Mat& a, double cutoff) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    if (j >= s.size() || s(j) <= cutoff) keep.push_back(j);
  Mat out(a.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(keep[c]);
  return out;
}

// {X : XB = BX for all B}: nullspace of the stacked (I (x) B - B^T (x) I).
inline std::vector<Mat> commutant(const std::vector<Mat>& bs) {
  const Eigen::Index d = bs.front().rows();
  const Mat id = Mat::Identity(d, d);
  Mat stack(d * d * static_cast<Eigen::Index>(bs.size()), d * d);
  for (std::size_t k = 0; k < bs.size(); ++k)
    stack.middleRows(static_cast<Eigen::Index>(k) * d * d, d * d) =
        kron(id, bs[k]) - kron(bs[k].transpose(), id);
  const Mat nb = null_basis(stack, 1e-9 * std::max(1.0, stack.norm()));
  std::vector<Mat> out;
  for (Eigen::Index c = 0; c < nb.cols(); ++c) {
    Mat m(d, d);
    Eigen::Map<Eigen::VectorXcd>(m.data(), m.size()) = nb.col(c);
    out.push_back(m);
  }
  return out;
}

inline double comm_norm(const Mat& a, const Mat& b) { return (a * b - b * a).norm(); }

// Hermitian generators G on the probed factors that influence no probe
// observable: [U^dag (Q on probe) U, G on probed] = 0 for every Q. Real-linear
// in the coefficients of G over a Hermitian basis; returns a real basis.
inline std::vector<Mat> noninfluencing(const Mat& u, const std::vector<std::size_t>& dims,
                                       const std::vector<std::size_t>& probed,
                                       const std::vector<std::size_t>& probe) {
  std::size_t dp = 1, ds = 1;
  for (auto k : probe) dp *= dims[k];
  for (auto k : probed) ds *= dims[k];
  const auto hs = hermitian_basis(ds);
  std::vector<Mat> pulled;
  for (const auto& q : hermitian_basis(dp)) pulled.push_back(u.adjoint() * embed(q, dims, probe) * u);
  std::vector<Mat> gs;
  for (const auto& h : hs) gs.push_back(embed(h, dims, probed));

  const Eigen::Index n = u.rows();
  const Eigen::Index rows = 2 * n * n * static_cast<Eigen::Index>(pulled.size());
  Eigen::MatrixXd sys(rows, static_cast<Eigen::Index>(gs.size()));
  for (std::size_t a = 0; a < gs.size(); ++a) {
    Eigen::Index r = 0;
    for (const auto& p : pulled) {
      const Mat c = p * gs[a] - gs[a] * p;
      for (Eigen::Index i = 0; i < c.size(); ++i) {
        sys(r++, static_cast<Eigen::Index>(a)) = c.data()[i].real();
        sys(r++, static_cast<Eigen::Index>(a)) = c.data()[i].imag();
      }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = 1e-8 * std::max(1.0, s.size() ? s(0) : 0.0);
  std::vector<Mat> out;
  for (Eigen::Index j = 0; j < sys.cols(); ++j) {
    if (j < s.size() && s(j) > cutoff) continue;
    Mat g = Mat::Zero(static_cast<Eigen::Index>(ds), static_cast<Eigen::Index>(ds));
    for (std::size_t a = 0; a < hs.size(); ++a) g += svd.matrixV()(static_cast<Eigen::Index>(a), j) * hs[a];
    out.push_back(g);
  }
  return out;
}

// Observable m (on the probed factors) is accessible iff every Hermitian
// generator that does not commute with it influences the probe; equivalently
// m commutes with every non-influencing generator.
inline bool accessible(const std::vector<Mat>& noninf, const Mat& m) {
  for (const auto& g : noninf)
    if (comm_norm(g, m) > 1e-7 * std::max(1.0, g.norm() * m.norm())) return false;
  return true;
}

// Some Hermitian operator on `from` influences some Hermitian operator on
// `to`, scanning basis pairs.
inline bool influences_subsystem(const Mat& u, const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
  std::size_t df = 1, dt = 1;
  for (auto k : from) df *= dims[k];
  for (auto k : to) dt *= dims[k];
  for (const auto& n : hermitian_basis(dt)) {
    const Mat pn = u.adjoint() * embed(n, dims, to) * u;
    for (const auto& m : hermitian_basis(df)) {
      const Mat em = embed(m, dims, from);
      if (comm_norm(pn, em) > 1e-9 * std::max(1.0, pn.norm() * em.norm())) return true;
    }
  }
  return false;
}

}  // namespace oracle
