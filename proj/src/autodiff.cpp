#include "mavenrl/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace mavenrl::ad {

Graph::Id Graph::push(Mat value, bool needs_grad) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = grad_ && needs_grad;
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size()) - 1;
}

Mat& Graph::g(Id id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Graph::Id Graph::param(Tensor& t) {
  Id id = push(t.value, true);
  if (nodes_.back().needs_grad) {
    nodes_.back().leaf = &t;
    nodes_.back().back = [id](Graph& gr) {
      Node& n = gr.nodes_[static_cast<std::size_t>(id)];
      n.leaf->grad += n.grad;
    };
  }
  return id;
}

Graph::Id Graph::constant(Mat v) { return push(std::move(v), false); }

Graph::Id Graph::matmul(Id a, Id b) {
  Mat v = value(a) * value(b);
  Id id = push(std::move(v), ng(a) || ng(b));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, b](Graph& gr) {
      const Mat& go = gr.g(id);
      if (gr.ng(a)) gr.g(a).noalias() += go * gr.value(b).transpose();
      if (gr.ng(b)) gr.g(b).noalias() += gr.value(a).transpose() * go;
    };
  }
  return id;
}

Graph::Id Graph::add(Id a, Id b) {
  Id id = push(value(a) + value(b), ng(a) || ng(b));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, b](Graph& gr) {
      const Mat& go = gr.g(id);
      if (gr.ng(a)) gr.g(a) += go;
      if (gr.ng(b)) gr.g(b) += go;
    };
  }
  return id;
}

Graph::Id Graph::sub(Id a, Id b) {
  Id id = push(value(a) - value(b), ng(a) || ng(b));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, b](Graph& gr) {
      const Mat& go = gr.g(id);
      if (gr.ng(a)) gr.g(a) += go;
      if (gr.ng(b)) gr.g(b) -= go;
    };
  }
  return id;
}

Graph::Id Graph::mul(Id a, Id b) {
  Id id = push(value(a).cwiseProduct(value(b)), ng(a) || ng(b));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, b](Graph& gr) {
      const Mat& go = gr.g(id);
      if (gr.ng(a)) gr.g(a) += go.cwiseProduct(gr.value(b));
      if (gr.ng(b)) gr.g(b) += go.cwiseProduct(gr.value(a));
    };
  }
  return id;
}

Graph::Id Graph::scale(Id a, double s) {
  Id id = push(value(a) * s, ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, s](Graph& gr) { gr.g(a) += gr.g(id) * s; };
  }
  return id;
}

Graph::Id Graph::add_colvec(Id a, Id bias) {
  if (value(bias).cols() != 1)
    throw std::invalid_argument("add_colvec: bias must have one column");
  Mat v = value(a);
  v.colwise() += Eigen::VectorXd(value(bias).col(0));
  Id id = push(std::move(v), ng(a) || ng(bias));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, bias](Graph& gr) {
      const Mat& go = gr.g(id);
      if (gr.ng(a)) gr.g(a) += go;
      if (gr.ng(bias)) gr.g(bias) += go.rowwise().sum();
    };
  }
  return id;
}

Graph::Id Graph::relu(Id a) {
  Id id = push(value(a).cwiseMax(0.0), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a](Graph& gr) {
      gr.g(a).array() +=
          gr.g(id).array() * (gr.value(a).array() > 0.0).cast<double>();
    };
  }
  return id;
}

Graph::Id Graph::elu(Id a) {
  Mat v = value(a).unaryExpr(
      [](double x) { return x > 0.0 ? x : std::expm1(x); });
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a](Graph& gr) {
      // d/dx elu = 1 for x > 0, exp(x) = elu(x) + 1 otherwise.
      const Mat& y = gr.value(id);
      const Mat& x = gr.value(a);
      gr.g(a).array() += gr.g(id).array() *
                         (x.array() > 0.0).select(Mat::Ones(x.rows(), x.cols()),
                                                  y.array() + 1.0);
    };
  }
  return id;
}

Graph::Id Graph::sigmoid(Id a) {
  Mat v = value(a).unaryExpr(
      [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a](Graph& gr) {
      const Mat& y = gr.value(id);
      gr.g(a).array() += gr.g(id).array() * y.array() * (1.0 - y.array());
    };
  }
  return id;
}

Graph::Id Graph::tanh_(Id a) {
  Mat v = value(a).array().tanh();
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a](Graph& gr) {
      const Mat& y = gr.value(id);
      gr.g(a).array() += gr.g(id).array() * (1.0 - y.array().square());
    };
  }
  return id;
}

Graph::Id Graph::abs_(Id a) {
  Id id = push(value(a).cwiseAbs(), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a](Graph& gr) {
      gr.g(a).array() += gr.g(id).array() * gr.value(a).array().sign();
    };
  }
  return id;
}

Graph::Id Graph::square(Id a) {
  Id id = push(value(a).array().square(), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a](Graph& gr) {
      gr.g(a).array() += gr.g(id).array() * 2.0 * gr.value(a).array();
    };
  }
  return id;
}

Graph::Id Graph::softmax_cols(Id a, double temperature) {
  if (temperature <= 0.0)
    throw std::invalid_argument("softmax_cols: temperature must be > 0");
  const Mat& x = value(a);
  Mat v(x.rows(), x.cols());
  for (int c = 0; c < x.cols(); ++c) {
    Eigen::ArrayXd col = x.col(c).array() / temperature;
    col -= col.maxCoeff();
    Eigen::ArrayXd e = col.exp();
    v.col(c) = e / e.sum();
  }
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, temperature](Graph& gr) {
      const Mat& y = gr.value(id);
      const Mat& go = gr.g(id);
      Mat& ga = gr.g(a);
      for (int c = 0; c < y.cols(); ++c) {
        double dot = go.col(c).dot(y.col(c));
        ga.col(c).array() +=
            (go.col(c).array() - dot) * y.col(c).array() / temperature;
      }
    };
  }
  return id;
}

Graph::Id Graph::log_softmax_cols(Id a) {
  const Mat& x = value(a);
  Mat v(x.rows(), x.cols());
  for (int c = 0; c < x.cols(); ++c) {
    Eigen::ArrayXd col = x.col(c).array();
    double m = col.maxCoeff();
    double lse = m + std::log((col - m).exp().sum());
    v.col(c) = col - lse;
  }
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a](Graph& gr) {
      const Mat& y = gr.value(id);
      const Mat& go = gr.g(id);
      Mat& ga = gr.g(a);
      for (int c = 0; c < y.cols(); ++c) {
        double s = go.col(c).sum();
        ga.col(c).array() += go.col(c).array() - s * y.col(c).array().exp();
      }
    };
  }
  return id;
}

Graph::Id Graph::rows(Id a, int first_row, int n_rows) {
  Id id = push(value(a).middleRows(first_row, n_rows), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, first_row, n_rows](Graph& gr) {
      gr.g(a).middleRows(first_row, n_rows) += gr.g(id);
    };
  }
  return id;
}

Graph::Id Graph::vcat(const std::vector<Id>& parts) {
  if (parts.empty()) throw std::invalid_argument("vcat: no parts");
  int total = 0;
  bool need = false;
  const int cols = cols_of(parts[0]);
  for (Id p : parts) {
    if (cols_of(p) != cols) throw std::invalid_argument("vcat: column mismatch");
    total += rows_of(p);
    need = need || ng(p);
  }
  Mat v(total, cols);
  int r = 0;
  for (Id p : parts) {
    v.middleRows(r, rows_of(p)) = value(p);
    r += rows_of(p);
  }
  Id id = push(std::move(v), need);
  if (nodes_.back().needs_grad) {
    std::vector<Id> ps = parts;
    nodes_.back().back = [id, ps](Graph& gr) {
      const Mat& go = gr.g(id);
      int r0 = 0;
      for (Id p : ps) {
        int nr = gr.rows_of(p);
        if (gr.ng(p)) gr.g(p) += go.middleRows(r0, nr);
        r0 += nr;
      }
    };
  }
  return id;
}

Graph::Id Graph::tile_cols(Id a, int times) {
  if (cols_of(a) != 1) throw std::invalid_argument("tile_cols: input must have one column");
  Mat v = value(a).replicate(1, times);
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a](Graph& gr) {
      gr.g(a) += gr.g(id).rowwise().sum();
    };
  }
  return id;
}

Graph::Id Graph::reshape(Id a, int r, int c) {
  if (rows_of(a) * cols_of(a) != r * c)
    throw std::invalid_argument("reshape: element count mismatch");
  Mat v = value(a);
  v.resize(r, c);  // column-major relayout, data order preserved
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a](Graph& gr) {
      Mat go = gr.g(id);
      go.resize(gr.rows_of(a), gr.cols_of(a));
      gr.g(a) += go;
    };
  }
  return id;
}

Graph::Id Graph::bmm(Id w_flat, int out_rows, Id x) {
  const Mat& w = value(w_flat);
  const Mat& xv = value(x);
  const int in_rows = static_cast<int>(xv.rows());
  const int batch = static_cast<int>(xv.cols());
  if (w.cols() != batch) throw std::invalid_argument("bmm: batch mismatch");
  if (w.rows() != static_cast<Eigen::Index>(out_rows) * in_rows)
    throw std::invalid_argument("bmm: flat weight shape mismatch");
  Mat v(out_rows, batch);
  for (int b = 0; b < batch; ++b) {
    Eigen::Map<const Mat> wb(w.col(b).data(), out_rows, in_rows);
    v.col(b).noalias() = wb * xv.col(b);
  }
  Id id = push(std::move(v), ng(w_flat) || ng(x));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, w_flat, x, out_rows, in_rows](Graph& gr) {
      const Mat& go = gr.g(id);
      const Mat& w = gr.value(w_flat);
      const Mat& xv = gr.value(x);
      const int batch = static_cast<int>(xv.cols());
      const bool nw = gr.ng(w_flat);
      const bool nx = gr.ng(x);
      Mat* gw = nw ? &gr.g(w_flat) : nullptr;
      Mat* gx = nx ? &gr.g(x) : nullptr;
      for (int b = 0; b < batch; ++b) {
        Eigen::Map<const Mat> wb(w.col(b).data(), out_rows, in_rows);
        if (nw) {
          Eigen::Map<Mat> gwb(gw->col(b).data(), out_rows, in_rows);
          gwb.noalias() += go.col(b) * xv.col(b).transpose();
        }
        if (nx) gx->col(b).noalias() += wb.transpose() * go.col(b);
      }
    };
  }
  return id;
}

Graph::Id Graph::gather_rows(Id a, std::vector<int> row_per_col) {
  const Mat& x = value(a);
  if (static_cast<int>(row_per_col.size()) != x.cols())
    throw std::invalid_argument("gather_rows: index count mismatch");
  Mat v(1, x.cols());
  for (int c = 0; c < x.cols(); ++c)
    v(0, c) = x(row_per_col[static_cast<std::size_t>(c)], c);
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, rows = std::move(row_per_col)](Graph& gr) {
      const Mat& go = gr.g(id);
      Mat& ga = gr.g(a);
      for (int c = 0; c < go.cols(); ++c)
        ga(rows[static_cast<std::size_t>(c)], c) += go(0, c);
    };
  }
  return id;
}

Graph::Id Graph::gather_cells(Id a, std::vector<int> rws, std::vector<int> cls) {
  if (rws.size() != cls.size())
    throw std::invalid_argument("gather_cells: index length mismatch");
  const Mat& x = value(a);
  Mat v(1, static_cast<Eigen::Index>(rws.size()));
  for (std::size_t t = 0; t < rws.size(); ++t) v(0, static_cast<Eigen::Index>(t)) = x(rws[t], cls[t]);
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, r = std::move(rws), c = std::move(cls)](Graph& gr) {
      const Mat& go = gr.g(id);
      Mat& ga = gr.g(a);
      for (std::size_t t = 0; t < r.size(); ++t)
        ga(r[t], c[t]) += go(0, static_cast<Eigen::Index>(t));
    };
  }
  return id;
}

Graph::Id Graph::mul_const(Id a, Mat w) {
  if (w.rows() != value(a).rows() || w.cols() != value(a).cols())
    throw std::invalid_argument("mul_const: shape mismatch");
  Id id = push(value(a).cwiseProduct(w), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, w = std::move(w)](Graph& gr) {
      gr.g(a) += gr.g(id).cwiseProduct(w);
    };
  }
  return id;
}

Graph::Id Graph::sum(Id a) {
  Mat v(1, 1);
  v(0, 0) = value(a).sum();
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a](Graph& gr) {
      gr.g(a).array() += gr.g(id)(0, 0);
    };
  }
  return id;
}

Graph::Id Graph::mean(Id a) {
  const double n = static_cast<double>(value(a).size());
  return scale(sum(a), 1.0 / n);
}

Graph::Id Graph::dot_const(Id a, Mat w) {
  if (w.rows() != value(a).rows() || w.cols() != value(a).cols())
    throw std::invalid_argument("dot_const: shape mismatch");
  Mat v(1, 1);
  v(0, 0) = value(a).cwiseProduct(w).sum();
  Id id = push(std::move(v), ng(a));
  if (nodes_.back().needs_grad) {
    nodes_.back().back = [id, a, w = std::move(w)](Graph& gr) {
      gr.g(a) += gr.g(id)(0, 0) * w;
    };
  }
  return id;
}

void Graph::backward(Id root) {
  if (!grad_) throw std::logic_error("backward on a grad-disabled graph");
  if (ran_backward_) throw std::logic_error("backward may only run once per graph");
  ran_backward_ = true;
  Node& r = nodes_[static_cast<std::size_t>(root)];
  if (r.value.rows() != 1 || r.value.cols() != 1)
    throw std::invalid_argument("backward: root must be a scalar node");
  if (!r.needs_grad) return;
  g(root)(0, 0) = 1.0;
  for (Id i = static_cast<Id>(nodes_.size()) - 1; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.needs_grad && n.back && n.grad.size() != 0) n.back(*this);
  }
}

}  // namespace mavenrl::ad
