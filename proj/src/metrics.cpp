#include "acp/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "acp/errors.hpp"

namespace acp {

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw DomainError("percentile of an empty sample");
  if (q < 0 || q > 1) throw DomainError("percentile rank must lie in [0,1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

SummaryStat summarize_values(const std::vector<double>& v) {
  SummaryStat s;
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  s.p25 = percentile(v, 0.25);
  s.p50 = percentile(v, 0.50);
  s.p75 = percentile(v, 0.75);
  return s;
}

MetricsSummary summarize(const std::vector<EpisodeMetrics>& episodes) {
  MetricsSummary out;
  out.episodes = static_cast<int>(episodes.size());
  if (episodes.empty()) {
    out.no_data = true;
    return out;
  }
  std::vector<double> col(episodes.size());
  const auto fill = [&](double EpisodeMetrics::* field) {
    for (std::size_t i = 0; i < episodes.size(); ++i) col[i] = episodes[i].*field;
    return summarize_values(col);
  };
  out.gain = fill(&EpisodeMetrics::gain);
  out.switch_cost = fill(&EpisodeMetrics::switch_cost);
  out.reward_exec = fill(&EpisodeMetrics::reward_exec);
  out.reward_train = fill(&EpisodeMetrics::reward_train);
  out.penalty_rate = fill(&EpisodeMetrics::penalty_rate);
  out.alloc_iterations = fill(&EpisodeMetrics::alloc_iterations);
  return out;
}

std::string summary_to_json(const MetricsSummary& s) {
  nlohmann::json j;
  const auto stat = [](const SummaryStat& st) {
    return nlohmann::json{{"mean", st.mean}, {"p25", st.p25}, {"p50", st.p50}, {"p75", st.p75}};
  };
  j["episodes"] = s.episodes;
  j["no_data"] = s.no_data;
  j["gain_J"] = stat(s.gain);
  j["switch_cost"] = stat(s.switch_cost);
  j["reward_exec"] = stat(s.reward_exec);
  j["reward_train"] = stat(s.reward_train);
  j["penalty_rate"] = stat(s.penalty_rate);
  j["alloc_iterations"] = stat(s.alloc_iterations);
  return j.dump(2) + "\n";
}

}  // namespace acp
