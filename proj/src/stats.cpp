#include "collgram/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "collgram/error.hpp"
#include "collgram/format.hpp"

namespace collgram {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Lentz's method for the continued fraction of I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

struct Differences {
  std::vector<double> values;
  double mean = 0.0;
  double sd = 0.0;
  bool constant = false;  // every difference equal, up to rounding
};

Differences differences(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error("paired samples differ in length: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  Differences d;
  d.values.resize(x.size());
  double max_abs = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d.values[i] = y[i] - x[i];
    max_abs = std::max(max_abs, std::fabs(d.values[i]));
  }
  const auto n = static_cast<double>(d.values.size());
  if (d.values.empty()) return d;
  double sum = 0.0;
  for (double v : d.values) sum += v;
  d.mean = sum / n;
  if (d.values.size() >= 2) {
    double ss = 0.0;
    for (double v : d.values) ss += (v - d.mean) * (v - d.mean);
    d.sd = std::sqrt(ss / (n - 1.0));
  }
  d.constant = d.sd <= 1e-12 * max_abs || max_abs == 0.0;
  if (max_abs == 0.0) d.mean = 0.0;
  return d;
}

void require_pairs(const Differences& d) {
  if (d.values.size() < 2) throw Error("insufficient pairs: " + std::to_string(d.values.size()) + " usable, need 2");
}

void require_nondegenerate(const Differences& d) {
  if (d.constant && d.mean != 0.0) throw Error("degenerate paired sample: every difference equals the mean");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_two_tailed_p(double t, double df) {
  if (std::isnan(t)) return kNaN;
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::min(1.0, regularized_incomplete_beta(0.5 * df, 0.5, x));
}

double t_cdf(double t, double df) {
  if (std::isnan(t)) return kNaN;
  if (t == 0.0) return 0.5;
  const double tail = 0.5 * t_two_tailed_p(t, df);
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(std::span<const double> x, std::span<const double> y) {
  const Differences d = differences(x, y);
  require_pairs(d);
  require_nondegenerate(d);
  TTestResult r;
  r.df = d.values.size() - 1;
  if (d.constant) return r;  // all differences zero
  r.t_stat = d.mean / (d.sd / std::sqrt(static_cast<double>(d.values.size())));
  r.p_two_tailed = t_two_tailed_p(r.t_stat, static_cast<double>(r.df));
  return r;
}

double cohens_d(std::span<const double> x, std::span<const double> y) {
  const Differences d = differences(x, y);
  require_pairs(d);
  require_nondegenerate(d);
  if (d.constant) return 0.0;
  return d.mean / d.sd;
}

double sign_proportion(std::span<const double> x, std::span<const double> y) {
  const Differences d = differences(x, y);
  if (d.values.empty()) throw Error("insufficient pairs: 0 usable, need 1");
  if (d.mean == 0.0) return 0.5;
  double agree = 0.0;
  for (double v : d.values) {
    if (v == 0.0) {
      agree += 0.5;
    } else if ((v > 0.0) == (d.mean > 0.0)) {
      agree += 1.0;
    }
  }
  return agree / static_cast<double>(d.values.size());
}

double bonferroni_threshold(double alpha, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  if (m == 0) throw Error("number of tests must be positive");
  return alpha / static_cast<double>(m);
}

std::string_view to_string(ProfileIndex index) {
  switch (index) {
    case ProfileIndex::pct_high_mi: return "pct_high_mi";
    case ProfileIndex::pct_high_t: return "pct_high_t";
    case ProfileIndex::ratio: return "ratio";
  }
  return "";
}

std::optional<double> index_value(const DocumentProfile& p, ProfileIndex index) {
  switch (index) {
    case ProfileIndex::pct_high_mi: return p.pct_high_mi;
    case ProfileIndex::pct_high_t: return p.pct_high_t;
    case ProfileIndex::ratio: return p.ratio;
  }
  return std::nullopt;
}

PairedComparison compare_pair(std::span<const std::optional<double>> row, std::span<const std::optional<double>> col,
                              double threshold) {
  if (row.size() != col.size()) throw Error("paired samples differ in length");
  std::vector<double> x;
  std::vector<double> y;
  PairedComparison c;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] && col[i]) {
      x.push_back(*row[i]);
      y.push_back(*col[i]);
    } else {
      ++c.dropped_pairs;
    }
  }
  c.n = x.size();
  try {
    const TTestResult tt = paired_t_test(x, y);
    c.mean_diff = differences(x, y).mean;
    c.t_stat = tt.t_stat;
    c.df = tt.df;
    c.p_two_tailed = tt.p_two_tailed;
    c.cohens_d = cohens_d(x, y);
    c.prop_effect = sign_proportion(x, y);
    c.significant = c.p_two_tailed < threshold;
  } catch (const Error& e) {
    c.failure = e.what();
    c.mean_diff = x.empty() ? kNaN : differences(x, y).mean;
    c.t_stat = c.p_two_tailed = c.cohens_d = c.prop_effect = kNaN;
    c.df = c.n > 0 ? c.n - 1 : 0;
    c.significant = false;
  }
  return c;
}

const PairedComparison& ComparisonMatrix::cell(std::size_t row, std::size_t col) const {
  if (row >= col || col >= labels.size()) throw std::out_of_range("comparison cell must satisfy row < col");
  const std::size_t k = labels.size();
  // Offset of row r in the packed upper triangle.
  const std::size_t offset = row * (2 * k - row - 1) / 2;
  return cells.at(offset + (col - row - 1));
}

std::size_t default_bonferroni_m(std::size_t translators) {
  return 3 * (translators * (translators - 1) / 2);
}

std::vector<ComparisonMatrix> compare_sets(std::span<const TranslatorProfiles> sets, double alpha,
                                           std::optional<std::size_t> m) {
  if (sets.size() < 2) throw Error("need at least two translator sets to compare");
  const std::size_t k = sets.size();
  const std::size_t tests = m.value_or(default_bonferroni_m(k));
  const double threshold = bonferroni_threshold(alpha, tests);

  std::vector<std::vector<const DocumentProfile*>> aligned(k);
  for (std::size_t s = 0; s < k; ++s) {
    for (const auto& p : sets[s].profiles) aligned[s].push_back(&p);
    std::stable_sort(aligned[s].begin(), aligned[s].end(),
                     [](const auto* a, const auto* b) { return a->doc_id < b->doc_id; });
  }

  // Every set must carry the multiset of ids in the union.
  std::map<std::string, std::size_t> needed;
  for (std::size_t s = 0; s < k; ++s) {
    std::map<std::string, std::size_t> have;
    for (const auto* p : aligned[s]) ++have[p->doc_id];
    for (const auto& [id, n] : have) needed[id] = std::max(needed[id], n);
  }
  std::ostringstream missing;
  for (std::size_t s = 0; s < k; ++s) {
    std::map<std::string, std::size_t> have;
    for (const auto* p : aligned[s]) ++have[p->doc_id];
    std::vector<std::string> absent;
    for (const auto& [id, n] : needed) {
      if (have[id] < n) absent.push_back(id);
    }
    if (!absent.empty()) {
      missing << "\n  " << sets[s].label << " is missing:";
      for (const auto& id : absent) missing << ' ' << id;
    }
  }
  if (!missing.str().empty()) throw Error("doc_id misalignment between translator sets:" + missing.str());

  std::vector<ComparisonMatrix> out;
  for (ProfileIndex index : kAllIndices) {
    ComparisonMatrix mat;
    mat.index = index;
    for (const auto& s : sets) mat.labels.push_back(s.label);
    mat.alpha = alpha;
    mat.bonferroni_m = tests;
    mat.threshold = threshold;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        std::vector<std::optional<double>> row;
        std::vector<std::optional<double>> col;
        for (std::size_t d = 0; d < aligned[i].size(); ++d) {
          row.push_back(index_value(*aligned[i][d], index));
          col.push_back(index_value(*aligned[j][d], index));
        }
        PairedComparison c = compare_pair(row, col, threshold);
        c.row_translator = sets[i].label;
        c.col_translator = sets[j].label;
        mat.cells.push_back(std::move(c));
      }
    }
    out.push_back(std::move(mat));
  }
  return out;
}

namespace {
std::string num(double v) { return std::isnan(v) ? std::string{} : format_fixed6(v); }
}  // namespace

void write_comparison_csv(std::ostream& out, std::span<const ComparisonMatrix> matrices) {
  out << "index,row_translator,col_translator,n,dropped,mean_diff,t,df,p,d,prop,significant\n";
  for (const auto& m : matrices) {
    for (const auto& c : m.cells) {
      out << to_string(m.index) << ',' << c.row_translator << ',' << c.col_translator << ',' << c.n << ','
          << c.dropped_pairs << ',' << num(c.mean_diff) << ',' << num(c.t_stat) << ',' << c.df << ','
          << format_p_value(c.p_two_tailed) << ',' << num(c.cohens_d) << ',' << num(c.prop_effect) << ','
          << (c.significant ? "true" : "false") << '\n';
    }
  }
}

void render_comparison_table(std::ostream& out, std::span<const ComparisonMatrix> matrices) {
  constexpr int kLabelWidth = 12;
  constexpr int kCellWidth = 14;
  auto cell_text = [](double v, int precision) {
    if (std::isnan(v)) return std::string("n/a");
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
  };
  for (const auto& m : matrices) {
    const std::size_t k = m.labels.size();
    out << to_string(m.index) << "  (column minus row; * = p < " << format_p_value(m.threshold)
        << ", alpha " << m.alpha << " / m " << m.bonferroni_m << ")\n";
    out << std::setw(kLabelWidth + 4) << "";
    for (std::size_t j = 1; j < k; ++j) out << std::setw(kCellWidth) << m.labels[j];
    out << '\n';
    for (std::size_t i = 0; i + 1 < k; ++i) {
      struct Line {
        const char* name;
        int precision;
        double PairedComparison::*field;
      };
      static constexpr Line kLines[] = {{"Di", 2, &PairedComparison::mean_diff},
                                        {"d", 2, &PairedComparison::cohens_d},
                                        {"p", 2, &PairedComparison::prop_effect}};
      for (const auto& line : kLines) {
        out << std::left << std::setw(kLabelWidth) << (line.name == kLines[0].name ? m.labels[i] : std::string())
            << std::setw(4) << line.name << std::right;
        for (std::size_t j = 1; j < k; ++j) {
          if (j <= i) {
            out << std::setw(kCellWidth) << "";
            continue;
          }
          const auto& c = m.cell(i, j);
          std::string text = cell_text(c.*line.field, line.precision);
          if (line.name == kLines[0].name && c.significant) text += '*';
          out << std::setw(kCellWidth) << text;
        }
        out << '\n';
      }
    }
    out << '\n';
  }
}

void write_plot_data(std::ostream& out, std::span<const TranslatorProfiles> sets) {
  out << "translator,index,mean,stderr\n";
  for (const auto& s : sets) {
    for (ProfileIndex index : kAllIndices) {
      std::vector<double> v;
      for (const auto& p : s.profiles) {
        if (auto x = index_value(p, index)) v.push_back(*x);
      }
      std::string mean;
      std::string stderr_text;
      if (!v.empty()) {
        double sum = 0.0;
        for (double x : v) sum += x;
        const double mu = sum / static_cast<double>(v.size());
        mean = format_fixed6(mu);
        if (v.size() >= 2) {
          double ss = 0.0;
          for (double x : v) ss += (x - mu) * (x - mu);
          const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
          stderr_text = format_fixed6(sd / std::sqrt(static_cast<double>(v.size())));
        }
      }
      out << s.label << ',' << to_string(index) << ',' << mean << ',' << stderr_text << '\n';
    }
  }
}

}  // namespace collgram
