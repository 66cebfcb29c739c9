#include "apgarch/params.hpp"

#include "apgarch/error.hpp"

#include <cmath>
#include <sstream>

namespace apgarch {

ModelSpec ModelSpec::zeros(const ModelOrders& orders) {
  const int m = orders.m;
  ModelSpec s;
  s.orders = orders;
  s.omega = Eigen::VectorXd::Ones(m);
  s.a_plus.assign(orders.q, Eigen::MatrixXd::Zero(m, m));
  s.a_minus.assign(orders.q, Eigen::MatrixXd::Zero(m, m));
  s.b.assign(orders.p, Eigen::MatrixXd::Zero(m, m));
  s.r = Eigen::MatrixXd::Identity(m, m);
  s.delta = Eigen::VectorXd::Constant(m, 2.0);
  return s;
}

namespace {

bool same_matrices(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols() || a[i] != b[i]) return false;
  }
  return true;
}

bool same_vector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && a == b;
}

}  // namespace

bool operator==(const ModelSpec& lhs, const ModelSpec& rhs) {
  return lhs.orders == rhs.orders && same_vector(lhs.omega, rhs.omega) &&
         same_matrices(lhs.a_plus, rhs.a_plus) && same_matrices(lhs.a_minus, rhs.a_minus) &&
         same_matrices(lhs.b, rhs.b) && lhs.r.rows() == rhs.r.rows() && lhs.r.cols() == rhs.r.cols() &&
         lhs.r == rhs.r && same_vector(lhs.delta, rhs.delta);
}

ParamLayout::ParamLayout(const ModelOrders& o, EstimationMode::Kind kind)
    : orders(o), delta_estimated(kind == EstimationMode::Kind::DeltaEstimated) {}

int ParamLayout::a_plus(int lag) const { return orders.m + (lag - 1) * orders.m * orders.m; }

int ParamLayout::a_minus(int lag) const {
  return orders.m + (orders.q + lag - 1) * orders.m * orders.m;
}

int ParamLayout::b(int lag) const {
  return orders.m + (2 * orders.q + lag - 1) * orders.m * orders.m;
}

int ParamLayout::delta() const {
  if (!delta_estimated) return -1;
  return orders.m + (2 * orders.q + orders.p) * orders.m * orders.m;
}

int ParamLayout::rho() const {
  return orders.m + (2 * orders.q + orders.p) * orders.m * orders.m + (delta_estimated ? orders.m : 0);
}

int ParamLayout::size() const { return rho() + orders.m * (orders.m - 1) / 2; }

ParamLayout::Block ParamLayout::block_of(int index) const {
  const int mm = orders.m * orders.m;
  if (index < orders.m) return Block::Omega;
  if (index < orders.m + orders.q * mm) return Block::APlus;
  if (index < orders.m + 2 * orders.q * mm) return Block::AMinus;
  if (index < orders.m + (2 * orders.q + orders.p) * mm) return Block::B;
  if (index < rho()) return Block::Delta;
  return Block::Rho;
}

std::vector<std::string> ParamLayout::names() const {
  const int m = orders.m;
  std::vector<std::string> out;
  out.reserve(size());
  for (int i = 0; i < m; ++i) out.push_back("omega_" + std::to_string(i + 1));
  auto matrix_names = [&](const std::string& prefix, int lag) {
    for (int c = 0; c < m; ++c) {
      for (int r = 0; r < m; ++r) {
        std::ostringstream os;
        os << prefix << '_' << lag << '(' << r + 1 << ',' << c + 1 << ')';
        out.push_back(os.str());
      }
    }
  };
  for (int k = 1; k <= orders.q; ++k) matrix_names("a_plus", k);
  for (int k = 1; k <= orders.q; ++k) matrix_names("a_minus", k);
  for (int k = 1; k <= orders.p; ++k) matrix_names("b", k);
  if (delta_estimated) {
    for (int i = 0; i < m; ++i) out.push_back("delta_" + std::to_string(i + 1));
  }
  for (int c = 0; c < m; ++c) {
    for (int r = c + 1; r < m; ++r) {
      out.push_back("rho_" + std::to_string(r + 1) + std::to_string(c + 1));
    }
  }
  return out;
}

int param_count(const ModelOrders& orders, EstimationMode::Kind kind) {
  return ParamLayout(orders, kind).size();
}

int rho_index(int m, int i, int j) {
  int offset = 0;
  for (int c = 0; c < j; ++c) offset += m - 1 - c;
  return offset + (i - j - 1);
}

ParamVector pack(const ModelSpec& spec, const EstimationMode& mode) {
  const ModelOrders& o = spec.orders;
  const int m = o.m;
  EstimationMode packed_mode = mode;
  if (!mode.estimates_delta()) {
    if (packed_mode.fixed_delta.size() == 0) packed_mode.fixed_delta = spec.delta;
    if (packed_mode.fixed_delta.size() != m) {
      throw Error(ErrorCode::LengthMismatch, "fixed delta has length " +
                                                 std::to_string(packed_mode.fixed_delta.size()) +
                                                 ", expected " + std::to_string(m));
    }
  }
  const ParamLayout layout(o, mode.kind);
  Eigen::VectorXd v(layout.size());
  v.segment(layout.omega(), m) = spec.omega;
  for (int k = 1; k <= o.q; ++k) {
    v.segment(layout.a_plus(k), m * m) = spec.a_plus[k - 1].reshaped();
    v.segment(layout.a_minus(k), m * m) = spec.a_minus[k - 1].reshaped();
  }
  for (int k = 1; k <= o.p; ++k) v.segment(layout.b(k), m * m) = spec.b[k - 1].reshaped();
  if (mode.estimates_delta()) v.segment(layout.delta(), m) = spec.delta;
  for (int c = 0; c < m; ++c) {
    for (int r = c + 1; r < m; ++r) v[layout.rho() + rho_index(m, r, c)] = spec.r(r, c);
  }
  return ParamVector{std::move(v), std::move(packed_mode), o};
}

ModelSpec unpack_unchecked(const ParamVector& v) {
  const ModelOrders& o = v.orders;
  const int m = o.m;
  const ParamLayout layout(o, v.mode.kind);
  if (v.values.size() != layout.size()) {
    throw Error(ErrorCode::LengthMismatch, "parameter vector has length " +
                                               std::to_string(v.values.size()) + ", expected " +
                                               std::to_string(layout.size()));
  }
  ModelSpec s;
  s.orders = o;
  s.omega = v.values.segment(layout.omega(), m);
  s.a_plus.reserve(o.q);
  s.a_minus.reserve(o.q);
  for (int k = 1; k <= o.q; ++k) {
    s.a_plus.push_back(v.values.segment(layout.a_plus(k), m * m).reshaped(m, m));
    s.a_minus.push_back(v.values.segment(layout.a_minus(k), m * m).reshaped(m, m));
  }
  s.b.reserve(o.p);
  for (int k = 1; k <= o.p; ++k) s.b.push_back(v.values.segment(layout.b(k), m * m).reshaped(m, m));
  if (v.mode.estimates_delta()) {
    s.delta = v.values.segment(layout.delta(), m);
  } else {
    if (v.mode.fixed_delta.size() != m) {
      throw Error(ErrorCode::LengthMismatch, "fixed delta has length " +
                                                 std::to_string(v.mode.fixed_delta.size()) +
                                                 ", expected " + std::to_string(m));
    }
    s.delta = v.mode.fixed_delta;
  }
  s.r = Eigen::MatrixXd::Identity(m, m);
  for (int c = 0; c < m; ++c) {
    for (int r = c + 1; r < m; ++r) {
      const double rho = v.values[layout.rho() + rho_index(m, r, c)];
      s.r(r, c) = rho;
      s.r(c, r) = rho;
    }
  }
  return s;
}

ModelSpec unpack(const ParamVector& v) {
  ModelSpec s = unpack_unchecked(v);
  if (!is_positive_definite(s.r)) {
    throw Error(ErrorCode::NonPositiveDefiniteCorrelation,
                "correlation matrix reconstructed from rho is not positive definite");
  }
  return s;
}

bool is_positive_definite(const Eigen::MatrixXd& r) {
  if (r.rows() != r.cols() || !r.allFinite()) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  return llt.info() == Eigen::Success;
}

std::vector<std::string> validate(const ModelSpec& spec) {
  std::vector<std::string> out;
  const ModelOrders& o = spec.orders;
  if (o.m < 1) out.push_back("m must be at least 1");
  if (o.p < 0) out.push_back("p must be nonnegative");
  if (o.q < 0) out.push_back("q must be nonnegative");
  if (!out.empty()) return out;
  const int m = o.m;

  if (spec.omega.size() != m) {
    out.push_back("omega has length " + std::to_string(spec.omega.size()));
  } else {
    for (int i = 0; i < m; ++i) {
      if (!(spec.omega[i] > 0.0) || !std::isfinite(spec.omega[i])) {
        out.push_back("omega[" + std::to_string(i) + "] not strictly positive");
      }
    }
  }
  if (spec.delta.size() != m) {
    out.push_back("delta has length " + std::to_string(spec.delta.size()));
  } else {
    for (int i = 0; i < m; ++i) {
      if (!(spec.delta[i] > 0.0) || !std::isfinite(spec.delta[i])) {
        out.push_back("delta[" + std::to_string(i) + "] not strictly positive");
      }
    }
  }

  auto check_blocks = [&](const std::vector<Eigen::MatrixXd>& blocks, int expected, const std::string& name) {
    if (static_cast<int>(blocks.size()) != expected) {
      out.push_back(name + " has " + std::to_string(blocks.size()) + " matrices, expected " +
                    std::to_string(expected));
      return;
    }
    for (int k = 0; k < expected; ++k) {
      const auto& a = blocks[k];
      if (a.rows() != m || a.cols() != m) {
        out.push_back(name + "[" + std::to_string(k) + "] is not " + std::to_string(m) + "x" +
                      std::to_string(m));
        continue;
      }
      for (int c = 0; c < m; ++c) {
        for (int r = 0; r < m; ++r) {
          if (!(a(r, c) >= 0.0) || !std::isfinite(a(r, c))) {
            out.push_back(name + "[" + std::to_string(k) + "](" + std::to_string(r) + "," +
                          std::to_string(c) + ") negative or non-finite");
          }
        }
      }
    }
  };
  check_blocks(spec.a_plus, o.q, "a_plus");
  check_blocks(spec.a_minus, o.q, "a_minus");
  check_blocks(spec.b, o.p, "b");

  const auto& r = spec.r;
  if (r.rows() != m || r.cols() != m) {
    out.push_back("r is not " + std::to_string(m) + "x" + std::to_string(m));
    return out;
  }
  for (int i = 0; i < m; ++i) {
    if (r(i, i) != 1.0) {
      out.push_back("r(" + std::to_string(i) + "," + std::to_string(i) + ") is not 1");
    }
    for (int j = 0; j < i; ++j) {
      if (r(i, j) != r(j, i)) {
        out.push_back("r not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (!(std::abs(r(i, j)) < 1.0) || !(std::abs(r(j, i)) < 1.0)) {
        out.push_back("r(" + std::to_string(i) + "," + std::to_string(j) + ") outside (-1, 1)");
      }
    }
  }
  if (!is_positive_definite(0.5 * (r + r.transpose()))) {
    out.push_back("r not positive definite");
  }
  return out;
}

}  // namespace apgarch
