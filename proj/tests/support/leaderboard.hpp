#pragma once

// Reference leaderboard tables used as regression targets for the aggregate
// formulas: four benchmark leaderboards (eight models each, four metric
// columns with percent gains and spread footers) plus alternate-baseline
// rows where the compared model scores below the baseline.

#include <vector>

namespace refdata {

struct LeaderboardRow {
  const char* model;
  double em, em_rel;
  double emdm, emdm_rel;
  double ans, ans_rel;
  double ung, ung_rel;
};

struct LeaderboardTable {
  const char* benchmark;
  std::vector<LeaderboardRow> rows;  // baseline first, rel = 0 on that row
  // published spread footers (mean adjacent gap of the rel columns)
  double em_footer, emdm_footer, ans_footer, ung_footer;
};

inline const std::vector<LeaderboardTable>& published_tables() {
  static const std::vector<LeaderboardTable> tables{
      {"ARC-Challenge",
       {
           {"Mistral 7B", 0.79, 0.00, 0.46, 0.00, 0.52, 0.00, 0.49, 0.00},
           {"Llama 3.1 8B", 0.84, 6.01, 0.55, 17.54, 0.61, 13.65, 0.60, 19.17},
           {"GPT3.5", 0.85, 7.88, 0.60, 24.56, 0.68, 22.96, 0.65, 24.94},
           {"Mixtral 8x7B", 0.87, 8.97, 0.63, 27.15, 0.71, 25.58, 0.68, 28.32},
           {"Mixtral 8x22B", 0.92, 14.30, 0.76, 39.66, 0.83, 36.51, 0.80, 39.22},
           {"GPT4-32K", 0.95, 17.44, 0.83, 44.99, 0.92, 42.90, 0.88, 44.72},
           {"GPT4-Turbo", 0.96, 17.59, 0.85, 46.26, 0.93, 43.52, 0.89, 45.62},
           {"GPT4o", 0.95, 17.00, 0.86, 46.81, 0.92, 42.72, 0.89, 45.37},
       },
       2.51, 6.69, 6.22, 6.52},
      {"TruthfulQA",
       {
           {"Mistral 7B", 0.52, 0.00, 0.30, 0.00, 0.30, 0.00, 0.36, 0.00},
           {"GPT3.5", 0.66, 21.75, 0.47, 35.94, 0.47, 36.40, 0.54, 33.68},
           {"Mixtral 8x7B", 0.70, 26.14, 0.48, 37.71, 0.48, 37.91, 0.58, 37.35},
           {"Llama 3.1 8B", 0.69, 25.09, 0.52, 42.51, 0.52, 42.29, 0.59, 39.25},
           {"Mixtral 8x22B", 0.78, 33.70, 0.66, 54.08, 0.65, 54.27, 0.71, 49.36},
           {"GPT4o", 0.82, 36.50, 0.68, 55.64, 0.68, 56.12, 0.75, 51.78},
           {"GPT4-Turbo", 0.85, 39.16, 0.77, 60.95, 0.77, 61.33, 0.80, 54.70},
           {"GPT4-32K", 0.88, 41.20, 0.79, 61.65, 0.78, 62.01, 0.83, 56.35},
       },
       5.89, 8.81, 8.86, 8.05},
      {"GSM8K",
       {
           {"Mistral 7B", 0.49, 0.00, 0.31, 0.00, 0.52, 0.00, 0.33, 0.00},
           {"GPT3.5", 0.58, 15.03, 0.46, 32.69, 0.55, 5.24, 0.49, 32.78},
           {"Mixtral 8x7B", 0.69, 28.34, 0.54, 42.88, 0.64, 18.49, 0.57, 42.59},
           {"Llama 3.1 8B", 0.77, 36.02, 0.64, 51.56, 0.79, 34.64, 0.67, 51.22},
           {"Mixtral 8x22B", 0.87, 43.43, 0.79, 61.09, 0.87, 40.30, 0.82, 59.62},
           {"GPT4-32K", 0.93, 47.20, 0.88, 65.07, 0.95, 45.22, 0.90, 63.37},
           {"GPT4o", 0.94, 47.58, 0.90, 65.57, 0.96, 46.01, 0.91, 63.81},
           {"GPT4-Turbo", 0.94, 47.58, 0.90, 65.64, 0.93, 44.38, 0.91, 63.78},
       },
       6.85, 9.38, 6.57, 9.12},
      {"MMLU",
       {
           {"Mistral 7B", 0.67, 0.00, 0.66, 0.00, 0.68, 0.00, 0.68, 0.00},
           {"Llama 3.1 8B", 0.74, 8.30, 0.71, 7.12, 0.74, 8.09, 0.74, 7.04},
           {"GPT3.5", 0.75, 10.36, 0.73, 9.89, 0.76, 10.82, 0.74, 7.84},
           {"Mixtral 8x7B", 0.77, 12.06, 0.76, 13.45, 0.78, 12.66, 0.77, 11.21},
           {"Mixtral 8x22B", 0.82, 17.62, 0.82, 19.08, 0.83, 18.01, 0.83, 17.61},
           {"GPT4-32K", 0.85, 21.04, 0.86, 23.20, 0.87, 21.53, 0.87, 20.98},
           {"GPT4-Turbo", 0.86, 21.32, 0.86, 23.34, 0.87, 21.56, 0.87, 21.38},
           {"GPT4o", 0.88, 23.28, 0.88, 25.20, 0.89, 23.73, 0.89, 23.39},
       },
       3.33, 3.60, 3.39, 3.34},
  };
  return tables;
}

// Alternate-baseline rows where the compared model loses to the baseline on
// some metrics: (baseline score, model score, published percent gain) per
// metric column.
struct AlternateBaselineRow {
  const char* baseline;
  const char* model;
  double base_em, em, em_rel;
  double base_emdm, emdm, emdm_rel;
  double base_ans, ans, ans_rel;
  double base_ung, ung, ung_rel;
};

inline const std::vector<AlternateBaselineRow>& alternate_baseline_rows() {
  static const std::vector<AlternateBaselineRow> rows{
      {"Mistral 7B", "Qwen2 1.5B", 0.79, 0.71, -11.47, 0.50, 0.51, 2.84, 0.48, 0.50, 4.23, 0.48,
       0.50, 3.32},
      {"GPT3.5", "Qwen2 1.5B", 0.85, 0.71, -21.01, 0.58, 0.46, -25.65, 0.59, 0.48, -22.65, 0.59,
       0.48, -22.61},
  };
  return rows;
}

}  // namespace refdata
