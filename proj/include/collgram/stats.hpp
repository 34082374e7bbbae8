#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collgram/assoc.hpp"

namespace collgram {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Student's t cumulative distribution with df degrees of freedom (df > 0).
double t_cdf(double t, double df);

// P(|T| >= |t|) computed from the tail directly, without 1 - cdf.
double t_two_tailed_p(double t, double df);

struct TTestResult {
  double t_stat = 0.0;
  std::size_t df = 0;
  double p_two_tailed = 1.0;
};

// All paired routines take the row sample x and the column sample y and
// work on the differences y - x. Throws Error("insufficient pairs") below
// two pairs and Error("degenerate paired sample") when every difference is
// the same nonzero value. Identical samples give t = 0, p = 1.
TTestResult paired_t_test(std::span<const double> x, std::span<const double> y);

// Paired d_z: mean(y - x) / sd(y - x), sample sd. 0 for identical samples.
double cohens_d(std::span<const double> x, std::span<const double> y);

// Share of pairs whose difference has the sign of the mean difference,
// ties counting one half. 0.5 when the mean difference is zero.
double sign_proportion(std::span<const double> x, std::span<const double> y);

double bonferroni_threshold(double alpha, std::size_t m);

enum class ProfileIndex { pct_high_mi, pct_high_t, ratio };
inline constexpr ProfileIndex kAllIndices[] = {ProfileIndex::pct_high_mi, ProfileIndex::pct_high_t,
                                               ProfileIndex::ratio};
std::string_view to_string(ProfileIndex index);
std::optional<double> index_value(const DocumentProfile& p, ProfileIndex index);

struct PairedComparison {
  std::string row_translator;
  std::string col_translator;
  std::size_t n = 0;  // usable pairs
  std::size_t dropped_pairs = 0;
  double mean_diff = 0.0;  // column minus row
  double t_stat = 0.0;
  std::size_t df = 0;
  double p_two_tailed = 1.0;
  double cohens_d = 0.0;
  double prop_effect = 0.5;
  bool significant = false;
  // Set when the statistics could not be computed (too few pairs or a
  // degenerate sample); numeric fields are NaN then.
  std::optional<std::string> failure;
};

// Drops pairs where either value is absent, then runs every paired
// statistic. Never throws on degenerate data: see failure.
PairedComparison compare_pair(std::span<const std::optional<double>> row, std::span<const std::optional<double>> col,
                              double threshold);

struct ComparisonMatrix {
  ProfileIndex index = ProfileIndex::pct_high_mi;
  std::vector<std::string> labels;
  std::vector<PairedComparison> cells;  // row-major over pairs i < j
  double alpha = 0.05;
  std::size_t bonferroni_m = 1;
  double threshold = 0.05;

  const PairedComparison& cell(std::size_t row, std::size_t col) const;
};

struct TranslatorProfiles {
  std::string label;
  std::vector<DocumentProfile> profiles;
};

std::size_t default_bonferroni_m(std::size_t translators);

// One matrix per profile index. Profiles are aligned by doc_id; sets that
// do not cover the same ids throw Error listing the missing ids per set.
std::vector<ComparisonMatrix> compare_sets(std::span<const TranslatorProfiles> sets, double alpha,
                                           std::optional<std::size_t> m = std::nullopt);

// CSV: index,row_translator,col_translator,n,dropped,mean_diff,t,df,p,d,prop,significant
void write_comparison_csv(std::ostream& out, std::span<const ComparisonMatrix> matrices);
// Differences and effect sizes laid out translator by translator.
void render_comparison_table(std::ostream& out, std::span<const ComparisonMatrix> matrices);
// CSV: translator,index,mean,stderr over the documents with a value.
void write_plot_data(std::ostream& out, std::span<const TranslatorProfiles> sets);

}  // namespace collgram
