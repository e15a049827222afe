#pragma once

#include <string>
#include <vector>

namespace acp {

// Linear-interpolation percentile at rank q*(m-1) over a copy of v.
// q in [0,1]; throws DomainError on empty input or q outside [0,1].
double percentile(std::vector<double> v, double q);

struct SummaryStat {
  double mean = 0, p25 = 0, p50 = 0, p75 = 0;
};

SummaryStat summarize_values(const std::vector<double>& v);

// Slot averages of one evaluation episode.
struct EpisodeMetrics {
  double gain = 0;             // J per slot
  double switch_cost = 0;      // mode flips per slot
  double reward_exec = 0;
  double reward_train = 0;
  double penalty_rate = 0;     // infeasible-slot fraction
  double alloc_iterations = 0; // solver bisection steps per slot
};

// Percentiles taken across episodes of per-episode slot averages.
struct MetricsSummary {
  SummaryStat gain, switch_cost, reward_exec, reward_train, penalty_rate, alloc_iterations;
  int episodes = 0;
  bool no_data = false;  // set when zero episodes were summarized
};

MetricsSummary summarize(const std::vector<EpisodeMetrics>& episodes);

std::string summary_to_json(const MetricsSummary& s);

}  // namespace acp
