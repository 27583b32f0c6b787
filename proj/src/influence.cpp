#include "vitality/influence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace vitality {
namespace influence {

double decay_factor(const DecayContext& ctx) {
  if (ctx.k < 1 || ctx.n_p < 1 || ctx.k > ctx.n_p)
    throw std::invalid_argument("decay_factor: requires 1 <= k <= n_p");
  const double p = static_cast<double>(ctx.k) / static_cast<double>(ctx.n_p);
  return 1.0 / (1.0 + p);
}

double commit_weight(std::uint64_t loc, double decay) {
  if (!(decay > 0.0) || decay > 1.0)
    throw std::invalid_argument("commit_weight: decay must be in (0,1]");
  if (loc == 0) return 0.0;
  return kCommitWeight * std::log10(static_cast<double>(loc)) * decay;
}

std::vector<EdgeWeight> build_edges(const std::vector<RepoTimeline>& timelines, YearMonth as_of,
                                    const EdgeOptions& opts) {
  const Instant cutoff = month_end(as_of);
  std::vector<EdgeWeight> out;
  for (const auto& t : timelines) {
    // Every event consumes an ordinal in the repo's action stream; N_p is the
    // stream length inside the snapshot window.
    std::uint64_t n_p = 0;
    for (const auto& e : t.events) {
      if (e.timestamp > cutoff) break;
      ++n_p;
    }
    if (n_p == 0) continue;

    std::unordered_map<std::string, std::size_t> edge_of_user;
    std::vector<EdgeWeight> edges;
    std::set<std::string> starred;  // repeat stars collapse to the first
    std::uint64_t k = 0;
    for (const auto& e : t.events) {
      if (e.timestamp > cutoff) break;
      ++k;
      double star = 0, commit = 0, fork = 0, issue = 0;
      const double decay = opts.unit_weights ? 1.0 : decay_factor({k, n_p});
      switch (e.kind) {
        case EventKind::Star:
          if (!starred.insert(e.user_id).second) continue;
          star = opts.unit_weights ? 1.0 : kStarWeight * decay;
          break;
        case EventKind::Commit:
          commit = opts.unit_weights ? 1.0 : commit_weight(e.loc_changed, decay);
          break;
        case EventKind::Fork:
          fork = opts.unit_weights ? 1.0 : kForkWeight * decay;
          break;
        case EventKind::IssueOpen:
        case EventKind::PrOpen:  // PR opens share the issue weight class
          issue = opts.unit_weights ? 1.0 : kIssueWeight * decay;
          break;
        default:
          continue;  // comments, merges, tags, meta carry no edge weight
      }
      auto [it, inserted] = edge_of_user.try_emplace(e.user_id, edges.size());
      if (inserted) edges.push_back(EdgeWeight{e.user_id, t.repo_id});
      EdgeWeight& w = edges[it->second];
      w.w_star += star;
      w.w_commit += commit;
      w.w_fork += fork;
      w.w_issue += issue;
    }
    std::sort(edges.begin(), edges.end(),
              [](const EdgeWeight& a, const EdgeWeight& b) { return a.user_id < b.user_id; });
    out.insert(out.end(), edges.begin(), edges.end());
  }
  return out;  // timelines arrive repo-sorted, so edges are (repo, user)-sorted
}

InfluenceState run_hits(const std::vector<EdgeWeight>& edges, YearMonth snapshot_month,
                        const HitsOptions& opts) {
  if (!(opts.tol > 0) || opts.max_iter < 1)
    throw std::invalid_argument("run_hits: tol must be positive, max_iter >= 1");
  InfluenceState state;
  state.snapshot_month = snapshot_month;
  if (edges.empty()) {
    state.converged = true;
    return state;
  }

  std::map<std::string, std::size_t> repo_ix, user_ix;
  for (const auto& e : edges) {
    repo_ix.try_emplace(e.repo_id, repo_ix.size());
    user_ix.try_emplace(e.user_id, user_ix.size());
  }
  struct Link {
    std::size_t repo, user;
    double w;
  };
  std::vector<Link> links;
  links.reserve(edges.size());
  for (const auto& e : edges)
    links.push_back({repo_ix.at(e.repo_id), user_ix.at(e.user_id), e.total()});

  const std::size_t nr = repo_ix.size(), nu = user_ix.size();
  std::vector<double> pqs(nr, 1.0), uis(nu, 1.0);

  auto l1_normalize = [](std::vector<double>& v) {
    double sum = 0;
    for (double x : v) sum += x;
    if (sum <= 0) {
      std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
    } else {
      for (double& x : v) x /= sum;
    }
  };

  bool converged = false;
  int iter = 0;
  while (iter < opts.max_iter) {
    ++iter;
    std::vector<double> pqs_next(nr, 0.0), uis_next(nu, 0.0);
    for (const auto& l : links) pqs_next[l.repo] += l.w * uis[l.user];
    l1_normalize(pqs_next);
    for (const auto& l : links) uis_next[l.user] += l.w * pqs_next[l.repo];
    l1_normalize(uis_next);

    double delta = 0;
    for (std::size_t i = 0; i < nr; ++i) delta = std::max(delta, std::abs(pqs_next[i] - pqs[i]));
    for (std::size_t i = 0; i < nu; ++i) delta = std::max(delta, std::abs(uis_next[i] - uis[i]));
    pqs = std::move(pqs_next);
    uis = std::move(uis_next);
    if (delta < opts.tol) {
      converged = true;
      break;
    }
  }

  state.iterations = iter;
  state.converged = converged;
  for (const auto& [repo, ix] : repo_ix) state.pqs[repo] = pqs[ix];
  for (const auto& [user, ix] : user_ix) state.uis[user] = uis[ix];
  return state;
}

std::map<std::string, double> weight_feature(const std::vector<EdgeWeight>& edges,
                                             const InfluenceState& state) {
  std::map<std::string, double> out;
  for (const auto& e : edges) {
    auto it = state.pqs.find(e.repo_id);
    out[e.repo_id] = it == state.pqs.end() ? 0.0 : it->second;
  }
  return out;
}

std::map<std::string, NormalizedWeight> normalize(const std::map<std::string, double>& raw) {
  if (raw.empty()) throw ValidationError("normalize: empty score map");

  std::vector<std::pair<double, const std::string*>> sorted;
  sorted.reserve(raw.size());
  for (const auto& [repo, v] : raw) sorted.emplace_back(v, &repo);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const double n = static_cast<double>(sorted.size());
  std::map<std::string, NormalizedWeight> out;
  // Average-rank ties: equal raws share the mean of their 1-based rank span.
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].first == sorted[i].first) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      NormalizedWeight w;
      w.repo_id = *sorted[k].second;
      w.raw = sorted[k].first;
      w.pct_rank = rank / n;
      out[w.repo_id] = w;
    }
    i = j;
  }

  // Log z-score over strictly positive raws, population sigma.
  std::vector<double> logs;
  for (const auto& [v, repo] : sorted)
    if (v > 0) logs.push_back(std::log(v));
  double mu = 0, sigma = 0;
  if (!logs.empty()) {
    for (double v : logs) mu += v;
    mu /= static_cast<double>(logs.size());
    for (double v : logs) sigma += (v - mu) * (v - mu);
    sigma = std::sqrt(sigma / static_cast<double>(logs.size()));
    // near-equal raws leave rounding residue in sigma; that is a degenerate window
    if (sigma <= 1e-9 * std::max(1.0, std::abs(mu))) sigma = 0;
  }
  double min_z = 0;
  bool first = true;
  for (auto& [repo, w] : out) {
    if (w.raw > 0) {
      w.zscore = sigma > 0 ? (std::log(w.raw) - mu) / sigma : 0.0;
      if (first || w.zscore < min_z) min_z = w.zscore;
      first = false;
    }
  }
  for (auto& [repo, w] : out)
    if (!(w.raw > 0)) w.zscore = min_z;  // zero raws stay finite
  return out;
}

void write_snapshot_csv(const InfluenceState& state,
                        const std::map<std::string, NormalizedWeight>& normalized,
                        std::ostream& out) {
  out << "month,repo_id,weight,weight_rank_pct,weight_zscore\n";
  const std::string month = state.snapshot_month.str();
  for (const auto& [repo, w] : normalized)
    out << month << ',' << repo << ',' << fmt_num(w.raw) << ',' << fmt_num(w.pct_rank) << ','
        << fmt_num(w.zscore) << '\n';
}

}  // namespace influence
}  // namespace vitality
