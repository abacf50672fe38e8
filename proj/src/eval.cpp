#include "reliefe/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "reliefe/error.hpp"
#include "reliefe/rng.hpp"

namespace reliefe {

namespace {

double log1pexp(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct Objective {
    const SparseMatrix& x;
    std::span<const std::size_t> rows;
    std::span<const char> positive;
    double l2;  // 1 / (C·n)

    double value(std::span<const double> w, double b) const {
        double loss = 0.0;
        for (std::size_t p = 0; p < rows.size(); ++p) {
            const double y = positive[p] ? 1.0 : -1.0;
            loss += log1pexp(-y * (dot_dense(x.row(rows[p]), w) + b));
        }
        double reg = 0.0;
        for (double v : w) reg += v * v;
        return loss / static_cast<double>(rows.size()) + 0.5 * l2 * reg;
    }

    void gradient(std::span<const double> w, double b, std::span<double> gw, double& gb) const {
        std::fill(gw.begin(), gw.end(), 0.0);
        gb = 0.0;
        const double inv_n = 1.0 / static_cast<double>(rows.size());
        for (std::size_t p = 0; p < rows.size(); ++p) {
            const RowView r = x.row(rows[p]);
            const double y = positive[p] ? 1.0 : -1.0;
            const double g = -y * sigmoid(-y * (dot_dense(r, w) + b)) * inv_n;
            for (std::size_t q = 0; q < r.nnz(); ++q) gw[r.cols[q]] += g * r.vals[q];
            gb += g;
        }
        for (std::size_t j = 0; j < w.size(); ++j) gw[j] += l2 * w[j];
    }

    static double dot_dense(RowView r, std::span<const double> w) noexcept {
        double s = 0.0;
        for (std::size_t q = 0; q < r.nnz(); ++q) s += r.vals[q] * w[r.cols[q]];
        return s;
    }
};

}  // namespace

LogisticModel LogisticModel::fit(const SparseMatrix& x, std::span<const std::size_t> rows,
                                 std::span<const char> positive, const ProbeOptions& options) {
    if (rows.empty()) throw Error(ErrorKind::InvalidShape, "no training rows");
    const Objective obj{x, rows, positive, 1.0 / (options.c * static_cast<double>(rows.size()))};
    LogisticModel m;
    m.coef.assign(x.n_cols(), 0.0);
    std::vector<double> gw(x.n_cols()), trial(x.n_cols());
    double gb = 0.0;
    double current = obj.value(m.coef, m.intercept);
    double step = 1.0;
    for (m.epochs = 0; m.epochs < options.max_epochs;) {
        obj.gradient(m.coef, m.intercept, gw, gb);
        double gnorm2 = gb * gb;
        for (double g : gw) gnorm2 += g * g;
        ++m.epochs;
        if (gnorm2 == 0.0) break;
        // Armijo backtracking from a step that grows after easy accepts.
        double next = current;
        double b_trial = m.intercept;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t j = 0; j < trial.size(); ++j) trial[j] = m.coef[j] - step * gw[j];
            b_trial = m.intercept - step * gb;
            next = obj.value(trial, b_trial);
            if (next <= current - 0.5 * step * gnorm2) break;
            step *= 0.5;
        }
        if (!(next < current)) break;
        m.coef.swap(trial);
        m.intercept = b_trial;
        const double rel = (current - next) / std::max(std::abs(current), 1e-12);
        current = next;
        step *= 2.0;
        if (rel < options.tolerance) break;
    }
    return m;
}

double LogisticModel::decision(RowView r) const noexcept {
    double s = intercept;
    for (std::size_t q = 0; q < r.nnz(); ++q) s += r.vals[q] * coef[r.cols[q]];
    return s;
}

namespace {

ClassVector strata_of(const Targets& targets) {
    if (const auto* classes = std::get_if<ClassVector>(&targets)) return *classes;
    const SparseMatrix& labels = std::get<SparseMatrix>(targets);
    std::map<std::vector<Index>, std::size_t> id_of;
    ClassVector ids(labels.n_rows());
    for (std::size_t i = 0; i < labels.n_rows(); ++i) {
        const RowView r = labels.row(i);
        ids[i] = id_of.try_emplace(std::vector<Index>(r.cols.begin(), r.cols.end()), id_of.size()).first->second;
    }
    return ids;
}

std::vector<std::size_t> assign_folds(const ClassVector& strata, std::size_t folds, std::uint64_t seed,
                                      std::size_t attempt) {
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);
    Rng rng = make_rng(seed, stream::folds, attempt);
    std::vector<std::size_t> fold(strata.size());
    std::size_t next = 0;
    for (auto& [id, members] : groups) {
        for (std::size_t p = members.size(); p > 1; --p)
            std::swap(members[p - 1], members[uniform_index(rng, p)]);
        for (std::size_t i : members) fold[i] = next++ % folds;
    }
    return fold;
}

// Every training split must see every class.
bool folds_valid(const ClassVector& classes, const std::vector<std::size_t>& fold, std::size_t folds) {
    std::set<std::size_t> all(classes.begin(), classes.end());
    for (std::size_t f = 0; f < folds; ++f) {
        std::set<std::size_t> seen;
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (fold[i] != f) seen.insert(classes[i]);
        if (seen.size() != all.size()) return false;
    }
    return true;
}

}  // namespace

std::vector<std::size_t> stratified_folds(const Targets& targets, std::size_t folds, std::uint64_t seed) {
    const std::size_t n = n_targets(targets);
    if (folds < 2) throw Error(ErrorKind::InvalidConfig, "cross-validation needs at least 2 folds");
    if (folds > n) throw Error(ErrorKind::InvalidConfig, "more folds than instances");
    return assign_folds(strata_of(targets), folds, seed, 0);
}

double probe_f1(const SparseMatrix& x, const Targets& targets, std::span<const std::size_t> feature_subset,
                std::size_t folds, std::uint64_t seed, const ProbeOptions& options) {
    const std::size_t n = x.n_rows();
    if (n_targets(targets) != n) throw Error(ErrorKind::InvalidShape, "target count does not match rows");
    if (feature_subset.empty()) throw Error(ErrorKind::InvalidConfig, "empty feature subset");
    if (folds < 2) throw Error(ErrorKind::InvalidConfig, "cross-validation needs at least 2 folds");
    if (folds > n) throw Error(ErrorKind::InvalidConfig, "more folds than instances");

    std::vector<std::size_t> cols(feature_subset.begin(), feature_subset.end());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    const SparseMatrix xs = x.select_cols(cols);

    const ClassVector strata = strata_of(targets);
    const auto* classes = std::get_if<ClassVector>(&targets);
    std::vector<std::size_t> fold;
    for (std::size_t attempt = 0;; ++attempt) {
        if (attempt == options.max_stratification_attempts)
            throw Error(ErrorKind::StratificationFailed,
                        "no fold assignment keeps every class in every training split");
        fold = assign_folds(strata, folds, seed, attempt);
        if (!classes || folds_valid(*classes, fold, folds)) break;
    }

    double total = 0.0;
    std::vector<std::size_t> train, test;
    std::vector<char> positive;
    for (std::size_t f = 0; f < folds; ++f) {
        train.clear();
        test.clear();
        for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? test : train).push_back(i);
        if (test.empty()) continue;
        positive.resize(train.size());

        if (classes) {
            const std::size_t n_classes = class_count(*classes);
            std::vector<double> best(test.size(), -std::numeric_limits<double>::infinity());
            std::vector<std::size_t> predicted(test.size(), 0);
            for (std::size_t c = 0; c < n_classes; ++c) {
                bool any = false;
                for (std::size_t p = 0; p < train.size(); ++p) any |= (positive[p] = (*classes)[train[p]] == c) != 0;
                if (!any) continue;
                const LogisticModel m = LogisticModel::fit(xs, train, positive, options);
                for (std::size_t p = 0; p < test.size(); ++p) {
                    const double s = m.decision(xs.row(test[p]));
                    if (s > best[p]) {
                        best[p] = s;
                        predicted[p] = c;
                    }
                }
            }
            std::size_t correct = 0;
            for (std::size_t p = 0; p < test.size(); ++p) correct += predicted[p] == (*classes)[test[p]];
            total += static_cast<double>(correct) / static_cast<double>(test.size());
        } else {
            const SparseMatrix& labels = std::get<SparseMatrix>(targets);
            double tp = 0.0, fp = 0.0, fn = 0.0;
            for (std::size_t l = 0; l < labels.n_cols(); ++l) {
                std::size_t pos = 0;
                for (std::size_t p = 0; p < train.size(); ++p) pos += (positive[p] = labels.at(train[p], l) != 0.0);
                // Constant labels in the training split predict that constant.
                const bool constant = pos == 0 || pos == train.size();
                LogisticModel m;
                if (!constant) m = LogisticModel::fit(xs, train, positive, options);
                for (std::size_t p = 0; p < test.size(); ++p) {
                    const bool pred = constant ? pos != 0 : m.decision(xs.row(test[p])) > 0.0;
                    const bool truth = labels.at(test[p], l) != 0.0;
                    tp += pred && truth;
                    fp += pred && !truth;
                    fn += !pred && truth;
                }
            }
            total += tp + fp + fn > 0.0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
        }
    }
    return total / static_cast<double>(folds);
}

PerformanceCurve rf1_curve(const SparseMatrix& x, const Targets& targets, const FeatureWeights& ranking,
                           std::span<const std::size_t> f_grid, std::size_t folds, std::uint64_t seed,
                           const ProbeOptions& options) {
    if (ranking.size() != x.n_cols()) throw Error(ErrorKind::InvalidShape, "ranking length differs from features");
    for (std::size_t p = 0; p < f_grid.size(); ++p) {
        if (f_grid[p] < 1 || f_grid[p] > x.n_cols())
            throw Error(ErrorKind::InvalidConfig, "grid value outside [1, |F|]");
        if (p > 0 && f_grid[p] <= f_grid[p - 1]) throw Error(ErrorKind::InvalidConfig, "grid must increase");
    }
    const std::vector<std::size_t> order = ranking.ranking();
    PerformanceCurve curve;
    curve.baseline_f1 = probe_f1(x, targets, order, folds, seed, options);
    if (!(curve.baseline_f1 > 0.0)) throw Error(ErrorKind::BaselineDegenerate, "all-feature F1 is zero");
    for (std::size_t f : f_grid) {
        const double f1 = probe_f1(x, targets, std::span(order).first(f), folds, seed, options);
        curve.points.push_back({static_cast<double>(f), f1, f1 / curve.baseline_f1});
    }
    return curve;
}

double aurf1(const PerformanceCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 3) throw Error(ErrorKind::InsufficientPoints, "integration needs at least 3 points");
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (!(pts[i].f > pts[i - 1].f)) throw Error(ErrorKind::InvalidValue, "curve f values must increase");
    double area = 0.0;
    std::size_t i = 0;
    for (; i + 2 < pts.size(); i += 2) {
        const double h0 = pts[i + 1].f - pts[i].f;
        const double h1 = pts[i + 2].f - pts[i + 1].f;
        const double bracket = (2.0 - h1 / h0) * pts[i].rf1 + (h0 + h1) * (h0 + h1) / (h0 * h1) * pts[i + 1].rf1 +
                               (2.0 - h0 / h1) * pts[i + 2].rf1;
        area += (h0 + h1) * bracket / 6.0;
    }
    if (i + 1 < pts.size()) area += 0.5 * (pts[i + 1].f - pts[i].f) * (pts[i].rf1 + pts[i + 1].rf1);
    return area / (pts.back().f - pts.front().f);
}

double recall_at_k(const FeatureWeights& ranking, std::span<const std::size_t> informative, std::size_t k) {
    if (k < 1) throw Error(ErrorKind::InvalidConfig, "k must be positive");
    if (informative.empty()) return 0.0;
    const std::vector<std::size_t> order = ranking.ranking();
    const std::set<std::size_t> wanted(informative.begin(), informative.end());
    std::size_t hits = 0;
    for (std::size_t p = 0; p < std::min(k, order.size()); ++p) hits += wanted.count(order[p]);
    return static_cast<double>(hits) / static_cast<double>(wanted.size());
}

}  // namespace reliefe
