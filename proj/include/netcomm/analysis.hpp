// Aggregation of sweep results into condition means with 95% confidence
// intervals, and OLS with HC1 heteroskedasticity-consistent standard errors
// for the degree / global-connectivity effect estimates (always controlling
// for supervision rate). Regressions are fit on per-run rows, not condition
// means.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "netcomm/csv.hpp"

namespace netcomm {

// Metric columns carried through aggregation, in canonical output order.
inline const std::vector<std::string>& summary_metric_names() {
    static const std::vector<std::string> names = {
        "avg_reward",
        "speaking_consistency",
        "listening_consistency",
        "between_agent_divergence",
        "within_agent_divergence",
        "signaling_divergence",
        "action_predictability",
        "message_predictability",
        "realized_avg_degree",
    };
    return names;
}

struct ResultRow {
    std::string experiment_id;
    std::string topology_kind;
    double topology_param = 0.0;
    double realized_avg_degree = 0.0;
    double realized_degree_variance = 0.0;
    double n_global_edges = 0.0;
    double supervision_rate = 0.0;
    int repetition = 0;
    std::map<std::string, double> metrics;
};

inline std::vector<ResultRow> parse_result_rows(const CsvTable& table) {
    std::vector<ResultRow> rows;
    rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        ResultRow row;
        row.experiment_id = table.cell(r, "experiment_id");
        row.topology_kind = table.cell(r, "topology_kind");
        row.topology_param = table.number(r, "topology_param");
        row.realized_avg_degree = table.number(r, "realized_avg_degree");
        row.realized_degree_variance = table.number(r, "realized_degree_variance");
        row.n_global_edges = table.number(r, "n_global_edges");
        row.supervision_rate = table.number(r, "supervision_rate");
        row.repetition = static_cast<int>(table.number(r, "repetition"));
        for (const auto& name : summary_metric_names()) {
            if (name == "realized_avg_degree") {
                row.metrics[name] = row.realized_avg_degree;
            } else {
                row.metrics[name] = table.number(r, name);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline double student_t_quantile_975(int df) {
    boost::math::students_t_distribution<double> dist(static_cast<double>(df));
    return boost::math::quantile(dist, 0.975);
}

struct MetricStat {
    double mean = 0.0;
    double ci_half = 0.0; // t_{0.975, n-1} * sd / sqrt(n)
    bool ci_available = false;
};

struct ConditionSummary {
    std::string experiment_id;
    std::string topology_kind;
    double topology_param = 0.0;
    double supervision_rate = 0.0;
    int n_runs = 0;
    std::map<std::string, MetricStat> stats;
};

// Group rows by (experiment, topology kind, topology param, supervision rate)
// and report mean +- 95% CI per metric. Single-run groups get a mean with the
// CI flagged unavailable.
inline std::vector<ConditionSummary> aggregate_ci(const std::vector<ResultRow>& rows) {
    using Key = std::tuple<std::string, std::string, double, double>;
    std::map<Key, std::vector<const ResultRow*>> groups;
    for (const auto& row : rows) {
        groups[{row.experiment_id, row.topology_kind, row.topology_param,
                row.supervision_rate}]
            .push_back(&row);
    }
    std::vector<ConditionSummary> summaries;
    summaries.reserve(groups.size());
    for (const auto& [key, members] : groups) {
        ConditionSummary cs;
        std::tie(cs.experiment_id, cs.topology_kind, cs.topology_param, cs.supervision_rate) =
            key;
        cs.n_runs = static_cast<int>(members.size());
        const double n = static_cast<double>(members.size());
        for (const auto& name : summary_metric_names()) {
            MetricStat stat;
            double sum = 0.0;
            for (const auto* m : members) sum += m->metrics.at(name);
            stat.mean = sum / n;
            if (members.size() >= 2) {
                double ss = 0.0;
                for (const auto* m : members) {
                    const double d = m->metrics.at(name) - stat.mean;
                    ss += d * d;
                }
                const double sd = std::sqrt(ss / (n - 1.0));
                stat.ci_half = student_t_quantile_975(cs.n_runs - 1) * sd / std::sqrt(n);
                stat.ci_available = true;
            }
            cs.stats[name] = stat;
        }
        summaries.push_back(std::move(cs));
    }
    return summaries;
}

// ---------------------------------------------------------------------------
// OLS with HC1 robust covariance

struct RegressionResult {
    // Coefficient order: intercept, factor, supervision.
    std::array<double, 3> beta{};
    std::array<double, 3> se{};
    std::array<double, 3> t{};
    std::array<double, 3> p{};
    int n = 0;
};

namespace detail {

// Solve A x = b for a symmetric 3x3 system by Gaussian elimination with
// partial pivoting; throws on (near-)singular input.
inline std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a,
                                    std::array<double, 3> b) {
    double scale = 0.0;
    for (const auto& row : a)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw std::runtime_error("singular design matrix: all-zero moments");
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::abs(a[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)])) {
                pivot = r;
            }
        }
        std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(pivot)]);
        std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(pivot)]);
        const double piv = a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        if (std::abs(piv) < 1e-12 * scale) {
            throw std::runtime_error("singular design matrix: rank-deficient predictors");
        }
        for (int r = col + 1; r < 3; ++r) {
            const double f =
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / piv;
            for (int c = col; c < 3; ++c) {
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
            }
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double acc = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < 3; ++c) {
            acc -= a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
                   x[static_cast<std::size_t>(c)];
        }
        x[static_cast<std::size_t>(r)] = acc / a[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
    }
    return x;
}

// Inverse of a symmetric 3x3 matrix via the solve above, column by column.
inline std::array<std::array<double, 3>, 3> invert3(
    const std::array<std::array<double, 3>, 3>& a) {
    std::array<std::array<double, 3>, 3> inv{};
    for (int col = 0; col < 3; ++col) {
        std::array<double, 3> e{};
        e[static_cast<std::size_t>(col)] = 1.0;
        const auto x = solve3(a, e);
        for (int r = 0; r < 3; ++r) inv[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] = x[static_cast<std::size_t>(r)];
    }
    return inv;
}

} // namespace detail

// OLS of y on [1, factor, supervision] with HC1 robust standard errors and
// normal-approximation two-sided p-values.
inline RegressionResult ols_robust(const std::vector<double>& y,
                                   const std::vector<double>& factor,
                                   const std::vector<double>& supervision) {
    const std::size_t n = y.size();
    if (factor.size() != n || supervision.size() != n) {
        throw std::invalid_argument("ols_robust: predictor lengths differ from response");
    }
    if (n < 4) throw std::invalid_argument("ols_robust needs n >= 4");
    constexpr int k = 3;

    auto x_row = [&](std::size_t i) {
        return std::array<double, 3>{1.0, factor[i], supervision[i]};
    };

    std::array<std::array<double, 3>, 3> xtx{};
    std::array<double, 3> xty{};
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x_row(i);
        for (int r = 0; r < k; ++r) {
            xty[static_cast<std::size_t>(r)] += xi[static_cast<std::size_t>(r)] * y[i];
            for (int c = 0; c < k; ++c) {
                xtx[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +=
                    xi[static_cast<std::size_t>(r)] * xi[static_cast<std::size_t>(c)];
            }
        }
    }

    RegressionResult res;
    res.n = static_cast<int>(n);
    res.beta = detail::solve3(xtx, xty);
    const auto xtx_inv = detail::invert3(xtx);

    // Meat of the sandwich: sum of e_i^2 x_i x_i', scaled by n/(n-k) (HC1).
    std::array<std::array<double, 3>, 3> meat{};
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x_row(i);
        double fit = 0.0;
        for (int c = 0; c < k; ++c) fit += xi[static_cast<std::size_t>(c)] * res.beta[static_cast<std::size_t>(c)];
        const double e2 = (y[i] - fit) * (y[i] - fit);
        for (int r = 0; r < k; ++r) {
            for (int c = 0; c < k; ++c) {
                meat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +=
                    e2 * xi[static_cast<std::size_t>(r)] * xi[static_cast<std::size_t>(c)];
            }
        }
    }
    const double hc1 = static_cast<double>(n) / static_cast<double>(n - k);

    for (int j = 0; j < k; ++j) {
        double var = 0.0;
        for (int r = 0; r < k; ++r) {
            for (int c = 0; c < k; ++c) {
                var += xtx_inv[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] *
                       meat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
                       xtx_inv[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
            }
        }
        var *= hc1;
        if (!(var > 0.0)) {
            // Exact fits leave zero residual variance; report zero SE and p=0
            // only when the coefficient itself is nonzero.
            res.se[static_cast<std::size_t>(j)] = 0.0;
            res.t[static_cast<std::size_t>(j)] =
                res.beta[static_cast<std::size_t>(j)] == 0.0 ? 0.0
                : std::numeric_limits<double>::infinity() *
                      (res.beta[static_cast<std::size_t>(j)] > 0 ? 1.0 : -1.0);
            res.p[static_cast<std::size_t>(j)] =
                res.beta[static_cast<std::size_t>(j)] == 0.0 ? 1.0 : 0.0;
            continue;
        }
        res.se[static_cast<std::size_t>(j)] = std::sqrt(var);
        res.t[static_cast<std::size_t>(j)] =
            res.beta[static_cast<std::size_t>(j)] / res.se[static_cast<std::size_t>(j)];
        res.p[static_cast<std::size_t>(j)] =
            std::erfc(std::abs(res.t[static_cast<std::size_t>(j)]) / std::sqrt(2.0));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Standard regressions per experiment preset

struct NamedRegression {
    std::string experiment_id;
    std::string response;
    std::string factor_name;
    RegressionResult result;
};

// Experiment 2 regresses the consistencies on the realized average degree;
// experiment 3 regresses the three divergence metrics on the global-connection
// probability. Both control for supervision rate. Other experiment ids have
// no preset regression.
inline std::vector<NamedRegression> standard_regressions(const std::vector<ResultRow>& rows) {
    std::vector<NamedRegression> out;
    auto fit = [&rows, &out](const std::string& experiment_id, const std::string& response,
                             const std::string& factor_name, auto factor_of) {
        std::vector<double> y, f, s;
        for (const auto& row : rows) {
            if (row.experiment_id != experiment_id) continue;
            y.push_back(row.metrics.at(response));
            f.push_back(factor_of(row));
            s.push_back(row.supervision_rate);
        }
        if (y.size() < 4) return;
        NamedRegression nr;
        nr.experiment_id = experiment_id;
        nr.response = response;
        nr.factor_name = factor_name;
        nr.result = ols_robust(y, f, s);
        out.push_back(std::move(nr));
    };

    const auto by_degree = [](const ResultRow& r) { return r.realized_avg_degree; };
    const auto by_param = [](const ResultRow& r) { return r.topology_param; };
    fit("2", "speaking_consistency", "realized_avg_degree", by_degree);
    fit("2", "listening_consistency", "realized_avg_degree", by_degree);
    fit("3", "signaling_divergence", "global_connection_probability", by_param);
    fit("3", "between_agent_divergence", "global_connection_probability", by_param);
    fit("3", "within_agent_divergence", "global_connection_probability", by_param);
    return out;
}

// ---------------------------------------------------------------------------
// CSV emission

inline void write_summary_csv(const std::vector<ConditionSummary>& summaries,
                              std::ostream& out) {
    out << "experiment_id,topology_kind,topology_param,supervision_rate,n_runs";
    for (const auto& name : summary_metric_names()) {
        out << ',' << name << "_mean," << name << "_ci_half";
    }
    out << '\n';
    for (const auto& cs : summaries) {
        out << cs.experiment_id << ',' << cs.topology_kind << ','
            << fmt_double(cs.topology_param) << ',' << fmt_double(cs.supervision_rate) << ','
            << cs.n_runs;
        for (const auto& name : summary_metric_names()) {
            const auto& stat = cs.stats.at(name);
            out << ',' << fmt_double(stat.mean) << ','
                << (stat.ci_available ? fmt_double(stat.ci_half) : std::string("NA"));
        }
        out << '\n';
    }
}

inline void write_regressions_csv(const std::vector<NamedRegression>& regs,
                                  std::ostream& out) {
    out << "experiment_id,response,factor,n,intercept,factor_coef,factor_se,factor_t,"
           "factor_p,supervision_coef,supervision_se,supervision_t,supervision_p\n";
    for (const auto& nr : regs) {
        const auto& r = nr.result;
        out << nr.experiment_id << ',' << nr.response << ',' << nr.factor_name << ',' << r.n
            << ',' << fmt_double(r.beta[0]) << ',' << fmt_double(r.beta[1]) << ','
            << fmt_double(r.se[1]) << ',' << fmt_double(r.t[1]) << ',' << fmt_double(r.p[1])
            << ',' << fmt_double(r.beta[2]) << ',' << fmt_double(r.se[2]) << ','
            << fmt_double(r.t[2]) << ',' << fmt_double(r.p[2]) << '\n';
    }
}

} // namespace netcomm
