#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace scp::ad {

using Mat = Eigen::MatrixXd;

// Reverse-mode tape over dense matrices. Nodes are appended in evaluation
// order, so walking ids backwards is a reverse topological order. Sized for
// desk-scale models: every intermediate value is kept.
class Tape {
public:
    struct Var {
        int id = -1;
        bool valid() const { return id >= 0; }
    };

    Var input(Mat v);     // leaf that accumulates gradient
    Var constant(Mat v);  // leaf without gradient

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var cmul(Var a, Var b);  // elementwise
    Var scale(Var a, double s);
    Var matmul(Var a, Var b);
    Var matmul_nt(Var a, Var b);       // a * b^T
    Var add_rowvec(Var a, Var r);      // broadcast a 1 x n row over all rows
    Var row(Var a, int i);             // 1 x n copy of row i
    Var cols(Var a, int begin, int len);
    Var pick_cols(Var a, std::vector<int> idx);  // gather columns of a 1 x n row
    Var gather_rows(Var table, std::vector<int> idx);
    Var row_softmax(Var a);
    Var layer_norm_rows(Var x, Var gamma, Var beta, double eps = 1e-5);
    Var tanh_(Var a);
    Var dot(Var a, Var b);       // 1 x n . 1 x n -> 1 x 1
    Var l2_normalize_row(Var a);  // 1 x n; rows with norm < 1e-12 pass through
    Var stack_scalars(const std::vector<Var>& xs);  // each 1 x 1 -> 1 x m
    Var logsumexp_row(Var a);    // 1 x m -> 1 x 1, max-shifted
    Var log_softmax_row(Var a);  // 1 x m -> 1 x m, max-shifted
    Var pick(Var a, int j);      // element j of a 1 x m row -> 1 x 1
    Var sum(Var a);              // all elements -> 1 x 1

    // Seeds d(root)/d(root) = 1 and accumulates into every input's grad.
    // root must be 1 x 1. May be called once per tape.
    void backward(Var root);

    const Mat& value(Var v) const { return nodes_[v.id].val; }
    const Mat& grad(Var v) const;
    double scalar(Var v) const { return nodes_[v.id].val(0, 0); }
    size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Mat val;
        Mat grad;
        bool requires_grad = false;
        std::function<void(Tape&)> back;  // empty for leaves
    };

    Var make(Mat val, bool requires_grad, std::function<void(Tape&)> back);
    bool rg(Var v) const { return nodes_[v.id].requires_grad; }
    Mat& g(int id) { return nodes_[id].grad; }
    const Mat& v(int id) const { return nodes_[id].val; }
    void ensure_grad(int id);

    std::vector<Node> nodes_;
};

}  // namespace scp::ad
