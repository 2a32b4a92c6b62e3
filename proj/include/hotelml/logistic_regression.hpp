#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "hotelml/features.hpp"
#include "hotelml/linalg.hpp"

namespace hotelml {

/// Multinomial (softmax) logistic regression trained by full-batch gradient
/// descent on L2-regularized mean cross-entropy. The weight matrix is
/// (d+1) x K with the bias in the last row, which stays unregularized.
struct LogisticRegressionModel {
    std::vector<int> classes;  // sorted distinct labels, one weight column each
    Matrix weights;            // (d+1) x K
    double eta = 0.1;
    int epochs = 0;
    double lambda = 0.0;
    std::vector<double> loss_trace;  // initial loss plus one entry per epoch
};

namespace logreg_detail {

inline Matrix add_bias_column(const Matrix& x) {
    Matrix out(x.rows, x.cols + 1);
    for (std::size_t i = 0; i < x.rows; ++i) {
        std::copy_n(x.row(i), x.cols, out.row(i));
        out.at(i, x.cols) = 1.0;
    }
    return out;
}

/// Row-wise softmax of X*W with max-subtraction for stability.
inline Matrix softmax_probs(const Matrix& xb, const Matrix& w) {
    Matrix p = matmul(xb, w);
    for (std::size_t i = 0; i < p.rows; ++i) {
        double* row = p.row(i);
        double mx = row[0];
        for (std::size_t c = 1; c < p.cols; ++c) mx = std::max(mx, row[c]);
        double total = 0.0;
        for (std::size_t c = 0; c < p.cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            total += row[c];
        }
        for (std::size_t c = 0; c < p.cols; ++c) row[c] /= total;
    }
    return p;
}

}  // namespace logreg_detail

/// Mean cross-entropy plus (lambda/2) * ||W||^2 over the non-bias rows.
/// xb must already carry the bias column; yidx holds class indices.
inline double logreg_loss(const Matrix& xb, const std::vector<std::size_t>& yidx, const Matrix& w,
                          double lambda) {
    const Matrix p = logreg_detail::softmax_probs(xb, w);
    double loss = 0.0;
    for (std::size_t i = 0; i < p.rows; ++i) loss -= std::log(p.at(i, yidx[i]));
    loss /= static_cast<double>(p.rows);
    if (lambda > 0.0) {
        double sq = 0.0;
        for (std::size_t r = 0; r + 1 < w.rows; ++r)
            for (std::size_t c = 0; c < w.cols; ++c) sq += w.at(r, c) * w.at(r, c);
        loss += 0.5 * lambda * sq;
    }
    return loss;
}

/// Analytic gradient X^T (softmax(XW) - onehot(y)) / n + lambda * W, with the
/// bias row excluded from the regularization term.
inline Matrix logreg_gradient(const Matrix& xb, const std::vector<std::size_t>& yidx, const Matrix& w,
                              double lambda) {
    Matrix p = logreg_detail::softmax_probs(xb, w);
    for (std::size_t i = 0; i < p.rows; ++i) p.at(i, yidx[i]) -= 1.0;
    Matrix grad = transpose_matmul(xb, p);
    const double inv_n = 1.0 / static_cast<double>(xb.rows);
    for (double& g : grad.data) g *= inv_n;
    if (lambda > 0.0) {
        for (std::size_t r = 0; r + 1 < w.rows; ++r)
            for (std::size_t c = 0; c < w.cols; ++c) grad.at(r, c) += lambda * w.at(r, c);
    }
    return grad;
}

/// Weights start at zero, so the first trace entry is always ln K. The seed
/// parameter is part of the uniform training interface; this optimizer is
/// deterministic and does not consume it.
inline LogisticRegressionModel logreg_fit(const FeatureMatrix& features, const std::vector<int>& labels,
                                          double eta = 0.1, int epochs = 500, double lambda = 1e-4,
                                          std::uint64_t seed = 0) {
    (void)seed;
    const std::size_t n = features.row_count();
    if (n == 0) throw ArgumentError("logreg_fit: empty training set");
    if (labels.size() != n) throw ArgumentError("logreg_fit: labels/features row mismatch");
    if (eta <= 0.0) throw ArgumentError("logreg_fit: eta must be positive");
    if (epochs < 1) throw ArgumentError("logreg_fit: epochs must be >= 1");
    if (lambda < 0.0) throw ArgumentError("logreg_fit: lambda must be >= 0");

    LogisticRegressionModel m;
    m.eta = eta;
    m.epochs = epochs;
    m.lambda = lambda;
    m.classes = labels;
    std::sort(m.classes.begin(), m.classes.end());
    m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());

    std::map<int, std::size_t> class_index;
    for (std::size_t c = 0; c < m.classes.size(); ++c) class_index[m.classes[c]] = c;
    std::vector<std::size_t> yidx(n);
    for (std::size_t i = 0; i < n; ++i) yidx[i] = class_index[labels[i]];

    const Matrix xb = logreg_detail::add_bias_column(features.values);
    m.weights = Matrix(xb.cols, m.classes.size(), 0.0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        const double loss = logreg_loss(xb, yidx, m.weights, lambda);
        if (!std::isfinite(loss))
            throw DivergenceError("logreg_fit: non-finite loss at epoch " + std::to_string(epoch) +
                                  " (eta=" + std::to_string(eta) + " diverged)");
        m.loss_trace.push_back(loss);
        const Matrix grad = logreg_gradient(xb, yidx, m.weights, lambda);
        for (std::size_t i = 0; i < m.weights.data.size(); ++i) m.weights.data[i] -= eta * grad.data[i];
    }
    const double final_loss = logreg_loss(xb, yidx, m.weights, lambda);
    if (!std::isfinite(final_loss))
        throw DivergenceError("logreg_fit: non-finite final loss (eta=" + std::to_string(eta) +
                              " diverged)");
    m.loss_trace.push_back(final_loss);
    return m;
}

inline Matrix logreg_predict_proba(const LogisticRegressionModel& m, const FeatureMatrix& features) {
    if (features.dim() + 1 != m.weights.rows)
        throw ArgumentError("logreg_predict: feature dimension " + std::to_string(features.dim()) +
                            " does not match model dimension " + std::to_string(m.weights.rows - 1));
    return logreg_detail::softmax_probs(logreg_detail::add_bias_column(features.values), m.weights);
}

/// Argmax of the softmax; ties resolve to the lowest class id.
inline std::vector<int> logreg_predict(const LogisticRegressionModel& m, const FeatureMatrix& features) {
    const Matrix p = logreg_predict_proba(m, features);
    std::vector<int> out(p.rows);
    for (std::size_t i = 0; i < p.rows; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < p.cols; ++c)
            if (p.at(i, c) > p.at(i, best)) best = c;
        out[i] = m.classes[best];
    }
    return out;
}

}  // namespace hotelml
