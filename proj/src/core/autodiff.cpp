#include "core/autodiff.hpp"

#include <cmath>
#include <utility>

#include "core/error.hpp"

namespace scp::ad {

Tape::Var Tape::make(Mat val, bool requires_grad, std::function<void(Tape&)> back) {
    Node n;
    n.val = std::move(val);
    n.requires_grad = requires_grad;
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::ensure_grad(int id) {
    if (nodes_[id].grad.size() == 0)
        nodes_[id].grad = Mat::Zero(nodes_[id].val.rows(), nodes_[id].val.cols());
}

const Mat& Tape::grad(Var v) const {
    static const Mat empty;
    return nodes_[v.id].grad.size() ? nodes_[v.id].grad : empty;
}

Tape::Var Tape::input(Mat v) { return make(std::move(v), true, nullptr); }
Tape::Var Tape::constant(Mat v) { return make(std::move(v), false, nullptr); }

Tape::Var Tape::add(Var a, Var b) {
    Var out = make(v(a.id) + v(b.id), rg(a) || rg(b), nullptr);
    nodes_[out.id].back = [a, b, out](Tape& t) {
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id) += t.g(out.id); }
        if (t.rg(b)) { t.ensure_grad(b.id); t.g(b.id) += t.g(out.id); }
    };
    return out;
}

Tape::Var Tape::sub(Var a, Var b) {
    Var out = make(v(a.id) - v(b.id), rg(a) || rg(b), nullptr);
    nodes_[out.id].back = [a, b, out](Tape& t) {
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id) += t.g(out.id); }
        if (t.rg(b)) { t.ensure_grad(b.id); t.g(b.id) -= t.g(out.id); }
    };
    return out;
}

Tape::Var Tape::cmul(Var a, Var b) {
    Var out = make(v(a.id).cwiseProduct(v(b.id)), rg(a) || rg(b), nullptr);
    nodes_[out.id].back = [a, b, out](Tape& t) {
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id) += t.g(out.id).cwiseProduct(t.v(b.id)); }
        if (t.rg(b)) { t.ensure_grad(b.id); t.g(b.id) += t.g(out.id).cwiseProduct(t.v(a.id)); }
    };
    return out;
}

Tape::Var Tape::scale(Var a, double s) {
    Var out = make(v(a.id) * s, rg(a), nullptr);
    nodes_[out.id].back = [a, s, out](Tape& t) {
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id) += s * t.g(out.id); }
    };
    return out;
}

Tape::Var Tape::matmul(Var a, Var b) {
    Var out = make(v(a.id) * v(b.id), rg(a) || rg(b), nullptr);
    nodes_[out.id].back = [a, b, out](Tape& t) {
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id) += t.g(out.id) * t.v(b.id).transpose(); }
        if (t.rg(b)) { t.ensure_grad(b.id); t.g(b.id) += t.v(a.id).transpose() * t.g(out.id); }
    };
    return out;
}

Tape::Var Tape::matmul_nt(Var a, Var b) {
    Var out = make(v(a.id) * v(b.id).transpose(), rg(a) || rg(b), nullptr);
    nodes_[out.id].back = [a, b, out](Tape& t) {
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id) += t.g(out.id) * t.v(b.id); }
        if (t.rg(b)) { t.ensure_grad(b.id); t.g(b.id) += t.g(out.id).transpose() * t.v(a.id); }
    };
    return out;
}

Tape::Var Tape::add_rowvec(Var a, Var r) {
    Mat val = v(a.id);
    val.rowwise() += Eigen::RowVectorXd(v(r.id).row(0));
    Var out = make(std::move(val), rg(a) || rg(r), nullptr);
    nodes_[out.id].back = [a, r, out](Tape& t) {
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id) += t.g(out.id); }
        if (t.rg(r)) { t.ensure_grad(r.id); t.g(r.id) += t.g(out.id).colwise().sum(); }
    };
    return out;
}

Tape::Var Tape::row(Var a, int i) {
    Var out = make(v(a.id).row(i), rg(a), nullptr);
    nodes_[out.id].back = [a, i, out](Tape& t) {
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id).row(i) += t.g(out.id).row(0); }
    };
    return out;
}

Tape::Var Tape::cols(Var a, int begin, int len) {
    Var out = make(v(a.id).middleCols(begin, len), rg(a), nullptr);
    nodes_[out.id].back = [a, begin, len, out](Tape& t) {
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id).middleCols(begin, len) += t.g(out.id); }
    };
    return out;
}

Tape::Var Tape::pick_cols(Var a, std::vector<int> idx) {
    Mat val(1, static_cast<Eigen::Index>(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j) val(0, static_cast<Eigen::Index>(j)) = v(a.id)(0, idx[j]);
    Var out = make(std::move(val), rg(a), nullptr);
    nodes_[out.id].back = [a, idx = std::move(idx), out](Tape& t) {
        if (!t.rg(a)) return;
        t.ensure_grad(a.id);
        for (size_t j = 0; j < idx.size(); ++j)
            t.g(a.id)(0, idx[j]) += t.g(out.id)(0, static_cast<Eigen::Index>(j));
    };
    return out;
}

Tape::Var Tape::gather_rows(Var table, std::vector<int> idx) {
    Mat val(static_cast<Eigen::Index>(idx.size()), v(table.id).cols());
    for (size_t i = 0; i < idx.size(); ++i) val.row(static_cast<Eigen::Index>(i)) = v(table.id).row(idx[i]);
    Var out = make(std::move(val), rg(table), nullptr);
    nodes_[out.id].back = [table, idx = std::move(idx), out](Tape& t) {
        if (!t.rg(table)) return;
        t.ensure_grad(table.id);
        for (size_t i = 0; i < idx.size(); ++i)
            t.g(table.id).row(idx[i]) += t.g(out.id).row(static_cast<Eigen::Index>(i));
    };
    return out;
}

Tape::Var Tape::row_softmax(Var a) {
    Mat y = v(a.id);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        const double m = y.row(i).maxCoeff();
        y.row(i) = (y.row(i).array() - m).exp();
        y.row(i) /= y.row(i).sum();
    }
    Var out = make(std::move(y), rg(a), nullptr);
    nodes_[out.id].back = [a, out](Tape& t) {
        if (!t.rg(a)) return;
        t.ensure_grad(a.id);
        const Mat& y = t.v(out.id);
        const Mat& go = t.g(out.id);
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            const double dotp = go.row(i).dot(y.row(i));
            t.g(a.id).row(i) += y.row(i).cwiseProduct((go.row(i).array() - dotp).matrix());
        }
    };
    return out;
}

Tape::Var Tape::layer_norm_rows(Var x, Var gamma, Var beta, double eps) {
    const Mat& xv = v(x.id);
    const Eigen::Index n = xv.cols();
    Mat xhat(xv.rows(), n);
    Eigen::VectorXd inv_sigma(xv.rows());
    for (Eigen::Index i = 0; i < xv.rows(); ++i) {
        const double mu = xv.row(i).mean();
        const double var = (xv.row(i).array() - mu).square().sum() / static_cast<double>(n);
        inv_sigma(i) = 1.0 / std::sqrt(var + eps);
        xhat.row(i) = (xv.row(i).array() - mu) * inv_sigma(i);
    }
    Mat y = xhat;
    y.array().rowwise() *= Eigen::RowVectorXd(v(gamma.id).row(0)).array();
    y.rowwise() += Eigen::RowVectorXd(v(beta.id).row(0));
    Var out = make(std::move(y), rg(x) || rg(gamma) || rg(beta), nullptr);
    nodes_[out.id].back = [x, gamma, beta, out, xhat = std::move(xhat),
                           inv_sigma = std::move(inv_sigma)](Tape& t) {
        const Mat& go = t.g(out.id);
        if (t.rg(gamma)) {
            t.ensure_grad(gamma.id);
            t.g(gamma.id) += go.cwiseProduct(xhat).colwise().sum();
        }
        if (t.rg(beta)) {
            t.ensure_grad(beta.id);
            t.g(beta.id) += go.colwise().sum();
        }
        if (t.rg(x)) {
            t.ensure_grad(x.id);
            const Eigen::RowVectorXd gam = t.v(gamma.id).row(0);
            for (Eigen::Index i = 0; i < xhat.rows(); ++i) {
                Eigen::RowVectorXd dy = go.row(i).cwiseProduct(gam);
                const double m1 = dy.mean();
                const double m2 = dy.cwiseProduct(xhat.row(i)).mean();
                t.g(x.id).row(i) +=
                    inv_sigma(i) * (dy.array() - m1 - xhat.row(i).array() * m2).matrix();
            }
        }
    };
    return out;
}

Tape::Var Tape::tanh_(Var a) {
    Var out = make(v(a.id).array().tanh().matrix(), rg(a), nullptr);
    nodes_[out.id].back = [a, out](Tape& t) {
        if (!t.rg(a)) return;
        t.ensure_grad(a.id);
        t.g(a.id) += t.g(out.id).cwiseProduct(
            (1.0 - t.v(out.id).array().square()).matrix());
    };
    return out;
}

Tape::Var Tape::dot(Var a, Var b) {
    Mat val(1, 1);
    val(0, 0) = v(a.id).row(0).dot(v(b.id).row(0));
    Var out = make(std::move(val), rg(a) || rg(b), nullptr);
    nodes_[out.id].back = [a, b, out](Tape& t) {
        const double go = t.g(out.id)(0, 0);
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id) += go * t.v(b.id); }
        if (t.rg(b)) { t.ensure_grad(b.id); t.g(b.id) += go * t.v(a.id); }
    };
    return out;
}

Tape::Var Tape::l2_normalize_row(Var a) {
    const double norm = v(a.id).row(0).norm();
    if (norm < 1e-12) {
        // Degenerate row: pass through unchanged.
        Var out = make(v(a.id), rg(a), nullptr);
        nodes_[out.id].back = [a, out](Tape& t) {
            if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id) += t.g(out.id); }
        };
        return out;
    }
    Var out = make(v(a.id) / norm, rg(a), nullptr);
    nodes_[out.id].back = [a, out, norm](Tape& t) {
        if (!t.rg(a)) return;
        t.ensure_grad(a.id);
        const Mat& y = t.v(out.id);
        const Mat& go = t.g(out.id);
        const double proj = go.row(0).dot(y.row(0));
        t.g(a.id) += (go - proj * y) / norm;
    };
    return out;
}

Tape::Var Tape::stack_scalars(const std::vector<Var>& xs) {
    Mat val(1, static_cast<Eigen::Index>(xs.size()));
    bool needs = false;
    for (size_t j = 0; j < xs.size(); ++j) {
        val(0, static_cast<Eigen::Index>(j)) = v(xs[j].id)(0, 0);
        needs = needs || rg(xs[j]);
    }
    Var out = make(std::move(val), needs, nullptr);
    nodes_[out.id].back = [xs, out](Tape& t) {
        for (size_t j = 0; j < xs.size(); ++j) {
            if (!t.rg(xs[j])) continue;
            t.ensure_grad(xs[j].id);
            t.g(xs[j].id)(0, 0) += t.g(out.id)(0, static_cast<Eigen::Index>(j));
        }
    };
    return out;
}

Tape::Var Tape::logsumexp_row(Var a) {
    const double m = v(a.id).row(0).maxCoeff();
    const double s = (v(a.id).row(0).array() - m).exp().sum();
    Mat val(1, 1);
    val(0, 0) = m + std::log(s);
    Var out = make(std::move(val), rg(a), nullptr);
    nodes_[out.id].back = [a, out](Tape& t) {
        if (!t.rg(a)) return;
        t.ensure_grad(a.id);
        const double lse = t.v(out.id)(0, 0);
        t.g(a.id) += t.g(out.id)(0, 0) * (t.v(a.id).array() - lse).exp().matrix();
    };
    return out;
}

Tape::Var Tape::log_softmax_row(Var a) {
    const double m = v(a.id).row(0).maxCoeff();
    const double lse = m + std::log((v(a.id).row(0).array() - m).exp().sum());
    Var out = make((v(a.id).array() - lse).matrix(), rg(a), nullptr);
    nodes_[out.id].back = [a, out](Tape& t) {
        if (!t.rg(a)) return;
        t.ensure_grad(a.id);
        const Mat soft = t.v(out.id).array().exp().matrix();
        const double gsum = t.g(out.id).sum();
        t.g(a.id) += t.g(out.id) - gsum * soft;
    };
    return out;
}

Tape::Var Tape::pick(Var a, int j) {
    Mat val(1, 1);
    val(0, 0) = v(a.id)(0, j);
    Var out = make(std::move(val), rg(a), nullptr);
    nodes_[out.id].back = [a, j, out](Tape& t) {
        if (t.rg(a)) { t.ensure_grad(a.id); t.g(a.id)(0, j) += t.g(out.id)(0, 0); }
    };
    return out;
}

Tape::Var Tape::sum(Var a) {
    Mat val(1, 1);
    val(0, 0) = v(a.id).sum();
    Var out = make(std::move(val), rg(a), nullptr);
    nodes_[out.id].back = [a, out](Tape& t) {
        if (!t.rg(a)) return;
        t.ensure_grad(a.id);
        t.g(a.id).array() += t.g(out.id)(0, 0);
    };
    return out;
}

void Tape::backward(Var root) {
    require(root.valid() && root.id < static_cast<int>(nodes_.size()), ErrorCode::Internal,
            "backward on invalid var");
    require(nodes_[root.id].val.rows() == 1 && nodes_[root.id].val.cols() == 1,
            ErrorCode::Internal, "backward root must be scalar");
    ensure_grad(root.id);
    g(root.id)(0, 0) = 1.0;
    for (int id = root.id; id >= 0; --id) {
        if (!nodes_[id].requires_grad || !nodes_[id].back) continue;
        if (nodes_[id].grad.size() == 0) continue;  // not reachable from root
        nodes_[id].back(*this);
    }
}

}  // namespace scp::ad
