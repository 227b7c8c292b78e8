#include "platsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "platsim/tdist.hpp"

namespace platsim {

namespace {

// Column-major dense matrix, sized for small regression designs.
struct Matrix {
    std::size_t n = 0;
    std::vector<std::vector<double>> cols;

    void add_col(std::vector<double> c) {
        n = c.size();
        cols.push_back(std::move(c));
    }
    std::size_t p() const { return cols.size(); }
};

double col_sq_norm(const std::vector<double>& c, std::size_t from) {
    double acc = 0.0;
    for (std::size_t i = from; i < c.size(); ++i) acc += c[i] * c[i];
    return acc;
}

/// In-place Householder QR of `a`, transforming `y` alongside. Returns the
/// diagonal of R; the upper triangle of R is left in `a`.
std::vector<double> householder_qr(Matrix& a, std::vector<double>& y) {
    const std::size_t n = a.n;
    const std::size_t p = a.p();
    std::vector<double> diag(p, 0.0);
    for (std::size_t j = 0; j < p && j < n; ++j) {
        auto& cj = a.cols[j];
        const double sigma = std::sqrt(col_sq_norm(cj, j));
        if (sigma == 0.0) {
            diag[j] = 0.0;
            continue;
        }
        const double alpha = cj[j] >= 0.0 ? -sigma : sigma;
        // Householder vector v lives in cj[j..n) with cj[j] -> cj[j] - alpha.
        cj[j] -= alpha;
        const double vscale = 1.0 / (-alpha * cj[j]);  // 2 / ||v||^2
        for (std::size_t k = j + 1; k < p; ++k) {
            auto& ck = a.cols[k];
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += cj[i] * ck[i];
            dot *= vscale;
            for (std::size_t i = j; i < n; ++i) ck[i] -= dot * cj[i];
        }
        double doty = 0.0;
        for (std::size_t i = j; i < n; ++i) doty += cj[i] * y[i];
        doty *= vscale;
        for (std::size_t i = j; i < n; ++i) y[i] -= doty * cj[i];
        diag[j] = alpha;
    }
    return diag;
}

/// Entry R[row][col] of the factor left in `a` by householder_qr (row <= col).
double r_entry(const Matrix& a, const std::vector<double>& diag, std::size_t row,
               std::size_t col) {
    return row == col ? diag[row] : a.cols[col][row];
}

/// Column indices that survive a column-norm-pivoted rank check at relative
/// tolerance `rel_tol` (Businger-Golub pivoting on a working copy).
std::vector<std::size_t> retained_columns(const Matrix& a, double rel_tol) {
    const std::size_t n = a.n;
    const std::size_t p = a.p();
    Matrix w = a;  // working copy
    std::vector<std::size_t> perm(p);
    for (std::size_t j = 0; j < p; ++j) perm[j] = j;

    double max_initial = 0.0;
    for (const auto& c : w.cols) max_initial = std::max(max_initial, std::sqrt(col_sq_norm(c, 0)));
    const double threshold = rel_tol * max_initial;

    std::size_t rank = 0;
    for (std::size_t j = 0; j < p && j < n; ++j) {
        std::size_t best = j;
        double best_norm = -1.0;
        for (std::size_t k = j; k < p; ++k) {
            const double nk = std::sqrt(col_sq_norm(w.cols[k], j));
            if (nk > best_norm) {
                best_norm = nk;
                best = k;
            }
        }
        if (best_norm <= threshold) break;
        std::swap(w.cols[j], w.cols[best]);
        std::swap(perm[j], perm[best]);

        auto& cj = w.cols[j];
        const double sigma = best_norm;
        const double alpha = cj[j] >= 0.0 ? -sigma : sigma;
        cj[j] -= alpha;
        const double vscale = 1.0 / (-alpha * cj[j]);
        for (std::size_t k = j + 1; k < p; ++k) {
            auto& ck = w.cols[k];
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += cj[i] * ck[i];
            dot *= vscale;
            for (std::size_t i = j; i < n; ++i) ck[i] -= dot * cj[i];
        }
        ++rank;
    }
    std::vector<std::size_t> kept(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(rank));
    std::sort(kept.begin(), kept.end());
    return kept;
}

}  // namespace

AncovaFit fit_ancova(const std::vector<AnalysisRow>& rows, CovariateSet covariates) {
    const std::size_t n = rows.size();
    if (n < 4) throw AnalysisError("fit_ancova: too few rows");

    bool has_control = false, has_treatment = false;
    for (const auto& r : rows) (r.group == 0 ? has_control : has_treatment) = true;
    if (!has_control || !has_treatment)
        throw AnalysisError("fit_ancova: both groups must be present");

    double y_mean = 0.0;
    for (const auto& r : rows) y_mean += r.week6;
    y_mean /= static_cast<double>(n);
    double y_var = 0.0;
    for (const auto& r : rows) y_var += (r.week6 - y_mean) * (r.week6 - y_mean);
    if (y_var == 0.0) throw AnalysisError("fit_ancova: outcome has zero variance");

    Matrix a;
    a.add_col(std::vector<double>(n, 1.0));
    {
        std::vector<double> g(n), x(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = static_cast<double>(rows[i].group);
            x[i] = rows[i].baseline;
        }
        a.add_col(std::move(g));
        a.add_col(std::move(x));
    }
    std::vector<long> levels;  // dummy-encoded period levels, aligned with columns 3..
    if (covariates == CovariateSet::baseline_plus_period) {
        std::vector<long> uniq;
        for (const auto& r : rows) uniq.push_back(r.period_id);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (std::size_t li = 1; li < uniq.size(); ++li) {  // earliest level = reference
            std::vector<double> dummy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                if (rows[i].period_id == uniq[li]) dummy[i] = 1.0;
            a.add_col(std::move(dummy));
            levels.push_back(uniq[li]);
        }
    }

    const auto kept = retained_columns(a, 1e-10);
    AncovaFit fit;
    std::size_t g_pos = std::numeric_limits<std::size_t>::max();
    {
        Matrix reduced;
        std::size_t pos = 0;
        std::size_t next_kept = 0;
        for (std::size_t j = 0; j < a.p(); ++j) {
            const bool keep = next_kept < kept.size() && kept[next_kept] == j;
            if (keep) {
                if (j == 1) g_pos = pos;
                reduced.add_col(std::move(a.cols[j]));
                ++pos;
                ++next_kept;
            } else if (j < 3) {
                throw AnalysisError("fit_ancova: intercept/group/baseline columns are collinear");
            } else {
                fit.dropped_period_levels.push_back(levels[j - 3]);
            }
        }
        a = std::move(reduced);
    }

    const std::size_t rank = a.p();
    if (n <= rank) throw AnalysisError("fit_ancova: no residual degrees of freedom");

    std::vector<double> yt(n);
    for (std::size_t i = 0; i < n; ++i) yt[i] = rows[i].week6;
    const auto diag = householder_qr(a, yt);
    for (double d : diag)
        if (d == 0.0) throw AnalysisError("fit_ancova: rank collapse during factorization");

    // Back-substitute R beta = Q^T y (first `rank` components of yt).
    std::vector<double> beta(rank, 0.0);
    for (std::size_t j = rank; j-- > 0;) {
        double acc = yt[j];
        for (std::size_t k = j + 1; k < rank; ++k) acc -= r_entry(a, diag, j, k) * beta[k];
        beta[j] = acc / diag[j];
    }

    double rss = 0.0;
    for (std::size_t i = rank; i < n; ++i) rss += yt[i] * yt[i];
    const long df = static_cast<long>(n) - static_cast<long>(rank);
    const double sigma2 = rss / static_cast<double>(df);

    // (X^T X)^{-1}_{gg} = ||R^{-T} e_g||^2 via forward substitution on R^T w = e_g.
    std::vector<double> w(rank, 0.0);
    for (std::size_t i = g_pos; i < rank; ++i) {
        double acc = (i == g_pos) ? 1.0 : 0.0;
        for (std::size_t k = g_pos; k < i; ++k) acc -= r_entry(a, diag, k, i) * w[k];
        w[i] = acc / diag[i];
    }
    double wsq = 0.0;
    for (double v : w) wsq += v * v;

    fit.beta = beta[g_pos];
    fit.se = std::sqrt(sigma2 * wsq);
    fit.df = df;
    if (fit.se > 0.0) {
        fit.t = fit.beta / fit.se;
        fit.p_one_sided = student_t_cdf(fit.t, static_cast<double>(df));
    } else {
        // Exact fit: the t statistic degenerates; the sign of beta decides.
        fit.t = fit.beta < 0.0 ? -std::numeric_limits<double>::infinity()
                               : (fit.beta > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        fit.p_one_sided = fit.beta < 0.0 ? 0.0 : (fit.beta > 0.0 ? 1.0 : 0.5);
    }
    return fit;
}

}  // namespace platsim
