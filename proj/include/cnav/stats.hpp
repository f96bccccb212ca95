#pragma once
// Analysis toolkit for the experiment output: descriptive summaries,
// fixed-effects one-way and balanced factorial ANOVA, Tukey HSD family-wise
// intervals, and trend classification of per-level means. The F and t tail
// probabilities come from the regularized incomplete beta function; the
// studentized range distribution is evaluated by direct numeric quadrature
// (it has no closed form).

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "cnav/scene.hpp"  // ParseError / InfeasibleError live there

namespace cnav {

// ---------------------------------------------------------------- special fn

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a,b).
inline double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                      b * std::log1p(-x);
    const double front = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::betacf(a, b, x) / a;
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

inline double f_cdf(double f, double d1, double d2) {
    if (f <= 0.0) return 0.0;
    return ibeta(d1 / 2.0, d2 / 2.0, d1 * f / (d1 * f + d2));
}

inline double t_cdf(double t, double df) {
    const double x = df / (df + t * t);
    const double p = 0.5 * ibeta(df / 2.0, 0.5, x);
    return t > 0.0 ? 1.0 - p : p;
}

// Generic adaptive Simpson quadrature; also used by the test suite as an
// independent oracle for the closed-form-free CDFs.
namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

template <class F>
double adaptive_simpson(F f, double a, double b, double tol = 1e-10, int depth = 20) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

namespace detail {

// 12-point Gauss-Legendre rule, composited over fixed-width panels. The
// integrands below have a sharp scale peak that naive adaptive schemes can
// step right over, so the panel width is tied to the integrand's scale.
constexpr std::array<double, 6> kGlNodes = {0.1252334085114689, 0.3678314989981802,
                                            0.5873179542866175, 0.7699026741943047,
                                            0.9041172563704749, 0.9815606342467192};
constexpr std::array<double, 6> kGlWeights = {0.2491470458134028, 0.2334925365383548,
                                              0.2031674267230659, 0.1600783285433462,
                                              0.1069393259953184, 0.0471753363865118};

template <class F>
double gl12(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 6; ++i)
        s += kGlWeights[i] * (f(c - h * kGlNodes[i]) + f(c + h * kGlNodes[i]));
    return s * h;
}

template <class F>
double composite_gl(F&& f, double a, double b, double max_panel) {
    if (!(b > a)) return 0.0;
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    const double h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += gl12(f, a + i * h, a + (i + 1) * h);
    return s;
}

// P(range of k iid standard normals <= w). The integrand's z-support is set
// by phi(z), not by w, so fixed limits suffice for any w.
inline double normal_range_cdf(double w, int k) {
    if (w <= 0.0) return 0.0;
    auto f = [w, k](double z) {
        return normal_pdf(z) * std::pow(normal_cdf(z) - normal_cdf(z - w), k - 1);
    };
    const double v = k * composite_gl(f, -9.5, 9.5, 0.75);
    return std::fmin(1.0, std::fmax(0.0, v));
}

}  // namespace detail

// CDF of the studentized range Q = range / S with k groups and df error
// degrees of freedom, integrating the chi-scale density against the
// known-scale range CDF.
inline double studentized_range_cdf(double q, int k, double df) {
    if (q <= 0.0) return 0.0;
    if (k < 2) throw std::invalid_argument("studentized_range_cdf: k must be >= 2");
    if (df > 5000.0) return detail::normal_range_cdf(q, k);  // chi scale is ~1
    const double half = df / 2.0;
    const double log_norm = half * std::log(df) - std::lgamma(half) - (half - 1.0) * std::log(2.0);
    auto outer = [&](double s) {
        const double log_g = log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s;
        return std::exp(log_g) * detail::normal_range_cdf(q * s, k);
    };
    // The scale density peaks at s ~ 1 with sd ~ 1/sqrt(2 df); panel widths
    // follow that scale so the peak cannot be skipped.
    const double sd = 1.0 / std::sqrt(2.0 * df);
    const double lo = std::max(1e-9, 1.0 - 12.0 * sd - 3.0 / df);
    const double hi = 1.0 + 12.0 * sd + 5.0 / std::sqrt(df);
    const double v = detail::composite_gl(outer, lo, hi, std::max(sd / 2.0, (hi - lo) / 400.0));
    return std::fmin(1.0, std::fmax(0.0, v));
}

inline double studentized_range_quantile(double p, int k, double df) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("studentized_range_quantile: p must be in (0,1)");
    double lo = 0.0, hi = 2.0;
    while (studentized_range_cdf(hi, k, df) < p) {
        hi *= 2.0;
        if (hi > 1e4) throw std::runtime_error("studentized_range_quantile: no bracket");
    }
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        if (studentized_range_cdf(mid, k, df) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ------------------------------------------------------------------ samples

struct GroupedSample {
    std::vector<std::pair<std::string, std::vector<double>>> groups;
};

struct GroupSummary {
    std::string label;
    int n = 0;
    double mean = 0.0;
    double sd = std::numeric_limits<double>::quiet_NaN();  // NaN when undefined (n < 2)
    double se = std::numeric_limits<double>::quiet_NaN();
};

inline double vec_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline std::vector<GroupSummary> summarize(const GroupedSample& sample) {
    std::vector<GroupSummary> out;
    for (const auto& [label, xs] : sample.groups) {
        if (xs.empty()) continue;  // excluded; caller warned via size mismatch
        GroupSummary g;
        g.label = label;
        g.n = static_cast<int>(xs.size());
        g.mean = vec_mean(xs);
        if (g.n >= 2) {
            double ss = 0.0;
            for (double x : xs) ss += (x - g.mean) * (x - g.mean);
            g.sd = std::sqrt(ss / (g.n - 1));
            g.se = g.sd / std::sqrt(static_cast<double>(g.n));
        }
        out.push_back(g);
    }
    return out;
}

// -------------------------------------------------------------------- ANOVA

struct AnovaRow {
    std::string name;
    double ss = 0.0;
    int df = 0;
    double ms = 0.0;
    double f = std::numeric_limits<double>::quiet_NaN();
    double p = std::numeric_limits<double>::quiet_NaN();
};

struct AnovaTable {
    std::vector<AnovaRow> effects;  // tested effects, in order
    AnovaRow error;                 // residual
    double ss_total = 0.0;
    int df_total = 0;
};

inline AnovaTable oneway_anova(const GroupedSample& sample) {
    const auto& groups = sample.groups;
    if (groups.size() < 2) throw std::invalid_argument("oneway_anova: need >= 2 groups");
    int n_total = 0;
    double grand = 0.0;
    for (const auto& [label, xs] : groups) {
        if (xs.empty()) throw std::invalid_argument("oneway_anova: empty group '" + label + "'");
        n_total += static_cast<int>(xs.size());
        for (double x : xs) grand += x;
    }
    const int k = static_cast<int>(groups.size());
    if (n_total <= k) throw std::invalid_argument("oneway_anova: no error degrees of freedom");
    grand /= n_total;
    double ssb = 0.0, ssw = 0.0;
    for (const auto& [label, xs] : groups) {
        const double m = vec_mean(xs);
        ssb += xs.size() * (m - grand) * (m - grand);
        for (double x : xs) ssw += (x - m) * (x - m);
    }
    AnovaTable t;
    AnovaRow between;
    between.name = "between";
    between.ss = ssb;
    between.df = k - 1;
    between.ms = ssb / between.df;
    t.error.name = "within";
    t.error.ss = ssw;
    t.error.df = n_total - k;
    t.error.ms = ssw / t.error.df;
    if (t.error.ms > 0.0) {
        between.f = between.ms / t.error.ms;
        between.p = 1.0 - f_cdf(between.f, between.df, t.error.df);
    } else if (ssb > 0.0) {
        between.f = std::numeric_limits<double>::infinity();
        between.p = 0.0;
    } else {
        between.f = 0.0;
        between.p = 1.0;
    }
    t.effects.push_back(between);
    t.ss_total = ssb + ssw;
    t.df_total = n_total - 1;
    return t;
}

// Balanced fixed-effects factorial decomposition for up to three factors:
// main effects, optional two-way interactions, remainder as error. Input is
// one level index per factor per observation; every cell must hold the same
// number of observations (the experiment's layout), otherwise the caller is
// told to subset.
struct FactorialObservation {
    std::vector<int> levels;  // one entry per factor
    double y = 0.0;
};

inline AnovaTable factorial_anova(const std::vector<FactorialObservation>& obs,
                                  const std::vector<std::string>& factor_names,
                                  bool include_interactions) {
    const int nf = static_cast<int>(factor_names.size());
    if (nf < 1 || nf > 3) throw std::invalid_argument("factorial_anova: 1..3 factors");
    if (obs.empty()) throw std::invalid_argument("factorial_anova: no data");
    std::vector<std::map<int, int>> levels(nf);  // level value -> dense index
    for (const auto& o : obs) {
        if (static_cast<int>(o.levels.size()) != nf)
            throw std::invalid_argument("factorial_anova: observation arity mismatch");
        for (int f = 0; f < nf; ++f) levels[f].emplace(o.levels[f], 0);
    }
    std::vector<int> card(nf);
    for (int f = 0; f < nf; ++f) {
        int idx = 0;
        for (auto& [lv, di] : levels[f]) di = idx++;
        card[f] = idx;
        if (card[f] < 2)
            throw std::invalid_argument("factorial_anova: factor " + factor_names[f] +
                                        " has a single level");
    }
    int n_cells = 1;
    for (int f = 0; f < nf; ++f) n_cells *= card[f];
    auto cell_of = [&](const FactorialObservation& o) {
        int c = 0;
        for (int f = 0; f < nf; ++f) c = c * card[f] + levels[f].at(o.levels[f]);
        return c;
    };
    std::vector<int> cell_n(n_cells, 0);
    std::vector<double> cell_sum(n_cells, 0.0);
    double grand = 0.0;
    for (const auto& o : obs) {
        const int c = cell_of(o);
        ++cell_n[c];
        cell_sum[c] += o.y;
        grand += o.y;
    }
    const int per_cell = cell_n[0];
    for (int c = 0; c < n_cells; ++c)
        if (cell_n[c] != per_cell)
            throw std::invalid_argument(
                "factorial_anova: unbalanced design (subset the records to equal cell counts)");
    const int n_total = static_cast<int>(obs.size());
    grand /= n_total;

    // Marginal means over any subset of factors.
    auto marginal = [&](const std::vector<int>& fs) {
        std::map<std::vector<int>, std::pair<double, int>> acc;
        for (int c = 0; c < n_cells; ++c) {
            std::vector<int> key;
            int rem = c;
            std::vector<int> digits(nf);
            for (int f = nf - 1; f >= 0; --f) {
                digits[f] = rem % card[f];
                rem /= card[f];
            }
            for (int f : fs) key.push_back(digits[f]);
            auto& a = acc[key];
            a.first += cell_sum[c];
            a.second += cell_n[c];
        }
        std::map<std::vector<int>, double> means;
        for (auto& [k, v] : acc) means[k] = v.first / v.second;
        return means;
    };

    AnovaTable t;
    double ss_model = 0.0;
    int df_model = 0;
    std::vector<std::map<std::vector<int>, double>> main_means(nf);
    for (int f = 0; f < nf; ++f) {
        main_means[f] = marginal({f});
        AnovaRow row;
        row.name = factor_names[f];
        const int reps = n_total / card[f];
        for (auto& [k, m] : main_means[f]) row.ss += reps * (m - grand) * (m - grand);
        row.df = card[f] - 1;
        row.ms = row.ss / row.df;
        t.effects.push_back(row);
        ss_model += row.ss;
        df_model += row.df;
    }
    if (include_interactions && nf >= 2) {
        for (int f1 = 0; f1 < nf; ++f1) {
            for (int f2 = f1 + 1; f2 < nf; ++f2) {
                AnovaRow row;
                row.name = factor_names[f1] + "x" + factor_names[f2];
                const auto pair_means = marginal({f1, f2});
                const int reps = n_total / (card[f1] * card[f2]);
                for (const auto& [k, m] : pair_means) {
                    const double dev = m - main_means[f1].at({k[0]}) -
                                       main_means[f2].at({k[1]}) + grand;
                    row.ss += reps * dev * dev;
                }
                row.df = (card[f1] - 1) * (card[f2] - 1);
                row.ms = row.ss / row.df;
                t.effects.push_back(row);
                ss_model += row.ss;
                df_model += row.df;
            }
        }
    }
    double ss_total = 0.0;
    for (const auto& o : obs) ss_total += (o.y - grand) * (o.y - grand);
    t.ss_total = ss_total;
    t.df_total = n_total - 1;
    t.error.name = "error";
    t.error.ss = std::fmax(0.0, ss_total - ss_model);
    t.error.df = t.df_total - df_model;
    if (t.error.df <= 0)
        throw std::invalid_argument(
            "factorial_anova: no error degrees of freedom (one replicate per cell with "
            "interactions)");
    t.error.ms = t.error.ss / t.error.df;
    for (AnovaRow& row : t.effects) {
        if (t.error.ms > 0.0) {
            row.f = row.ms / t.error.ms;
            row.p = 1.0 - f_cdf(row.f, row.df, t.error.df);
        } else if (row.ss > 0.0) {
            row.f = std::numeric_limits<double>::infinity();
            row.p = 0.0;
        } else {
            row.f = 0.0;
            row.p = 1.0;
        }
    }
    return t;
}

inline void print_anova(const AnovaTable& t, std::ostream& os) {
    char buf[160];
    os << "source,ss,df,ms,F,p\n";
    for (const auto& r : t.effects) {
        std::snprintf(buf, sizeof(buf), "%s,%.6g,%d,%.6g,%.6g,%.6g", r.name.c_str(), r.ss, r.df,
                      r.ms, r.f, r.p);
        os << buf << '\n';
    }
    std::snprintf(buf, sizeof(buf), "%s,%.6g,%d,%.6g,,", t.error.name.c_str(), t.error.ss,
                  t.error.df, t.error.ms);
    os << buf << '\n';
    std::snprintf(buf, sizeof(buf), "total,%.6g,%d,,,", t.ss_total, t.df_total);
    os << buf << '\n';
}

// ---------------------------------------------------------------- Tukey HSD

struct HsdPair {
    std::string a, b;
    double diff = 0.0;  // mean(a) - mean(b)
    double lo = 0.0, hi = 0.0;
    double p_adj = 1.0;
};

struct HsdResult {
    double alpha = 0.05;
    double q_crit = 0.0;
    int df_error = 0;
    double ms_error = 0.0;
    std::vector<HsdPair> pairs;
};

// Family-wise intervals mean_i - mean_j +- q(alpha;k,df)/sqrt(2) * SE with
// SE = sqrt(MSW (1/n_i + 1/n_j)) (Tukey-Kramer for unequal group sizes).
inline HsdResult tukey_hsd(const GroupedSample& sample, double alpha = 0.05) {
    if (sample.groups.size() < 2) throw std::invalid_argument("tukey_hsd: need >= 2 groups");
    const AnovaTable t = oneway_anova(sample);
    HsdResult res;
    res.alpha = alpha;
    res.df_error = t.error.df;
    res.ms_error = t.error.ms;
    const int k = static_cast<int>(sample.groups.size());
    res.q_crit = studentized_range_quantile(1.0 - alpha, k, t.error.df);
    for (std::size_t i = 0; i < sample.groups.size(); ++i) {
        for (std::size_t j = i + 1; j < sample.groups.size(); ++j) {
            const auto& [la, xa] = sample.groups[i];
            const auto& [lb, xb] = sample.groups[j];
            HsdPair p;
            p.a = la;
            p.b = lb;
            p.diff = vec_mean(xa) - vec_mean(xb);
            const double se = std::sqrt(
                t.error.ms * (1.0 / xa.size() + 1.0 / xb.size()));
            const double half = res.q_crit / std::sqrt(2.0) * se;
            p.lo = p.diff - half;
            p.hi = p.diff + half;
            if (se > 0.0) {
                const double q_obs = std::fabs(p.diff) * std::sqrt(2.0) / se;
                p.p_adj = 1.0 - studentized_range_cdf(q_obs, k, t.error.df);
            } else {
                p.p_adj = p.diff == 0.0 ? 1.0 : 0.0;
            }
            res.pairs.push_back(p);
        }
    }
    return res;
}

// -------------------------------------------------------------------- trend

enum class Trend { increasing, concave_down, flat, other };

inline const char* to_string(Trend t) {
    switch (t) {
        case Trend::increasing: return "increasing";
        case Trend::concave_down: return "concave_down";
        case Trend::flat: return "flat";
        case Trend::other: return "other";
    }
    return "?";
}

struct TrendResult {
    Trend cls = Trend::other;
    int peak_index = 0;  // argmax of the mean sequence
};

// Classifies the empirical mean sequence over ordered levels. `tolerance` is
// one pooled standard error by convention: sequences whose total range sits
// within it are flat; a rise that ends at the last level is increasing; a
// rise to an interior maximum followed by a fall is concave_down.
inline TrendResult trend_check(const std::vector<double>& means, double tolerance) {
    if (means.size() < 3) throw std::invalid_argument("trend_check: need >= 3 levels");
    TrendResult r;
    int peak = 0;
    double lo = means[0], hi = means[0];
    for (std::size_t i = 1; i < means.size(); ++i) {
        if (means[i] > means[peak]) peak = static_cast<int>(i);
        lo = std::fmin(lo, means[i]);
        hi = std::fmax(hi, means[i]);
    }
    r.peak_index = peak;
    const int last = static_cast<int>(means.size()) - 1;
    if (hi - lo <= tolerance) {
        r.cls = Trend::flat;
    } else if (peak == last || means[last] >= means[peak] - tolerance) {
        // Ends at (or within tolerance of) its maximum after a net rise.
        r.cls = means[last] > means[0] ? Trend::increasing : Trend::other;
    } else if (peak > 0 && means[0] < means[peak]) {
        r.cls = Trend::concave_down;
    } else {
        r.cls = Trend::other;
    }
    return r;
}

// ------------------------------------------------------- two-sample helper

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p_greater = 1.0;  // one-sided P for mean1 > mean2
};

inline WelchResult welch_test(double m1, double sd1, int n1, double m2, double sd2, int n2) {
    const double v1 = sd1 * sd1 / n1, v2 = sd2 * sd2 / n2;
    WelchResult r;
    r.t = (m1 - m2) / std::sqrt(v1 + v2);
    r.df = (v1 + v2) * (v1 + v2) /
           (v1 * v1 / (n1 - 1) + v2 * v2 / (n2 - 1));
    r.p_greater = 1.0 - t_cdf(r.t, r.df);
    return r;
}

}  // namespace cnav
