#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mavenrl::ad {

using Mat = Eigen::MatrixXd;

// A named parameter tensor with a persistent gradient accumulator and
// optimizer state. Values are matrices; vectors are (n x 1).
struct Tensor {
  std::string name;
  Mat value;
  Mat grad;     // same shape as value, zeroed between optimizer steps
  Mat rms_acc;  // RMSprop accumulator, sized on first use

  Tensor() = default;
  Tensor(std::string n, Mat v)
      : name(std::move(n)), value(std::move(v)) {
    grad = Mat::Zero(value.rows(), value.cols());
  }
};

// Dynamic reverse-mode tape over Eigen matrices. A Graph is built per
// forward pass; backward(root) runs the recorded closures in reverse
// order and accumulates leaf gradients into the referenced Tensors.
//
// Construct with grad_enabled=false for a value-only forward (acting,
// evaluation, target networks): no closures are recorded and no gradient
// buffers are touched.
class Graph {
 public:
  using Id = int;

  explicit Graph(bool grad_enabled = true) : grad_(grad_enabled) {
    nodes_.reserve(256);
  }

  bool grad_enabled() const { return grad_; }

  // Leaf referencing a parameter tensor; backward accumulates into t.grad.
  Id param(Tensor& t);
  // Leaf with no gradient.
  Id constant(Mat v);

  Id matmul(Id a, Id b);
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id mul(Id a, Id b);                    // elementwise
  Id scale(Id a, double s);
  Id add_colvec(Id a, Id bias);          // bias (r x 1) added to every column
  Id relu(Id a);
  Id elu(Id a);
  Id sigmoid(Id a);
  Id tanh_(Id a);
  Id abs_(Id a);                         // d|x|/dx = sign(x), 0 at x = 0
  Id square(Id a);
  Id softmax_cols(Id a, double temperature = 1.0);
  Id log_softmax_cols(Id a);
  Id rows(Id a, int first_row, int n_rows);
  Id vcat(const std::vector<Id>& parts);
  Id tile_cols(Id a, int times);         // a must have one column
  Id reshape(Id a, int rows, int cols);  // column-major relayout
  // Per-column matrix-vector product: column b of w_flat holds a
  // column-major (out_rows x in_rows) matrix W_b; returns W_b * x.col(b).
  Id bmm(Id w_flat, int out_rows, Id x);
  // y(0, b) = a(row_per_col[b], b).
  Id gather_rows(Id a, std::vector<int> row_per_col);
  // y(0, t) = a(rows[t], cols[t]).
  Id gather_cells(Id a, std::vector<int> rows, std::vector<int> cols);
  Id mul_const(Id a, Mat w);             // elementwise by a constant
  Id sum(Id a);                          // 1x1
  Id mean(Id a);                         // 1x1
  Id dot_const(Id a, Mat w);             // sum(a .* w), 1x1

  const Mat& value(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  int rows_of(Id id) const { return static_cast<int>(value(id).rows()); }
  int cols_of(Id id) const { return static_cast<int>(value(id).cols()); }

  // Root must be 1x1. Seeds the root gradient with 1 and runs the tape in
  // reverse. May be called once per graph.
  void backward(Id root);

  // Gradient of a non-leaf node after backward (testing hook).
  const Mat& grad_of(Id id) const { return nodes_[static_cast<std::size_t>(id)].grad; }

 private:
  struct Node {
    Mat value;
    Mat grad;  // allocated lazily
    bool needs_grad = false;
    Tensor* leaf = nullptr;
    std::function<void(Graph&)> back;
  };

  Id push(Mat value, bool needs_grad);
  Mat& g(Id id);  // gradient buffer, zero-initialised on first touch
  bool ng(Id id) const { return nodes_[static_cast<std::size_t>(id)].needs_grad; }

  std::vector<Node> nodes_;
  bool grad_ = true;
  bool ran_backward_ = false;
};

}  // namespace mavenrl::ad
