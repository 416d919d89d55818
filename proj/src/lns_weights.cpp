#include <algorithm>
#include <numeric>

#include "mineplan/errors.hpp"
#include "mineplan/lns.hpp"

namespace mineplan {

std::string_view ToString(FocalMethod m) {
  switch (m) {
    case FocalMethod::kRand: return "rand";
    case FocalMethod::kObj: return "obj";
    case FocalMethod::kMd: return "md";
    case FocalMethod::kMix: return "mix";
  }
  return "?";
}

std::string_view ToString(Strategy s) {
  switch (s) {
    case Strategy::kNone: return "none";
    case Strategy::kBlending: return "blending";
    case Strategy::kTiming: return "timing";
    case Strategy::kPitLinks: return "pitlinks";
    case Strategy::kTrigger: return "trigger";
  }
  return "?";
}

std::string_view ToString(Fixing f) { return f == Fixing::kSD ? "sd" : "sdf"; }

FocalMethod ParseFocalMethod(std::string_view text) {
  for (auto m : {FocalMethod::kRand, FocalMethod::kObj, FocalMethod::kMd, FocalMethod::kMix})
    if (text == ToString(m)) return m;
  throw ConfigError("unknown focal method '" + std::string(text) + "'");
}

Strategy ParseStrategy(std::string_view text) {
  for (auto s : {Strategy::kNone, Strategy::kBlending, Strategy::kTiming,
                 Strategy::kPitLinks, Strategy::kTrigger})
    if (text == ToString(s)) return s;
  throw ConfigError("unknown strategy '" + std::string(text) + "'");
}

Fixing ParseFixing(std::string_view text) {
  if (text == "sd") return Fixing::kSD;
  if (text == "sdf") return Fixing::kSDF;
  throw ConfigError("unknown fixing level '" + std::string(text) + "'");
}

bool WeightVector::any_positive() const {
  return std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; });
}

WeightVector base_weights(const Instance& inst, FocalMethod method, int value_element) {
  WeightVector w;
  w.weights.assign(inst.num_blocks(), 0.0);
  switch (method) {
    case FocalMethod::kRand:
      std::fill(w.weights.begin(), w.weights.end(), 1.0);
      break;
    case FocalMethod::kObj:
      if (value_element < 0 || value_element >= inst.num_elements())
        throw MissingValueElement("OBJ weighting needs a value element");
      for (int b = 0; b < inst.num_blocks(); ++b)
        for (int q = 0; q < inst.parcel_count(b); ++q) {
          const int p = inst.first_parcel(b) + q;
          w.weights[b] += inst.tonnage(p) * inst.grade(p, value_element);
        }
      break;
    case FocalMethod::kMd:
      for (int b = 0; b < inst.num_blocks(); ++b) {
        const auto n = inst.predecessors(b).size() + inst.successors(b).size();
        w.weights[b] = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
      }
      break;
    case FocalMethod::kMix:
      throw ConfigError("MIX is resolved per worker; pick RAND, OBJ or MD");
  }
  return w;
}

namespace {

std::vector<int> SameBench(const Instance& inst, int b, std::span<const int> closure) {
  std::vector<int> out;
  for (int j : closure)
    if (inst.pit_of_block(j) == inst.pit_of_block(b) && inst.bench(j) == inst.bench(b))
      out.push_back(j);
  return out;
}

}  // namespace

std::vector<int> restricted_cone_above(const Instance& inst, int b) {
  inst.require_block(b);
  return SameBench(inst, b, inst.predecessors(b));
}

std::vector<int> restricted_cone_below(const Instance& inst, int b) {
  inst.require_block(b);
  return SameBench(inst, b, inst.successors(b));
}

int sample_weighted(std::span<const double> weights, std::span<const int> candidates,
                    Rng& rng) {
  double total = 0.0;
  for (int c : candidates) total += std::max(0.0, weights[c]);
  if (total <= 0.0) {
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng)];
  }
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (int c : candidates) {
    const double w = std::max(0.0, weights[c]);
    if (w <= 0.0) continue;
    if (u < w) return c;
    u -= w;
  }
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it)
    if (weights[*it] > 0.0) return *it;
  return candidates.back();
}

int sample_focal(const WeightVector& w, Rng& rng) {
  std::vector<int> positive;
  for (int b = 0; b < static_cast<int>(w.weights.size()); ++b)
    if (w.weights[b] > 0.0) positive.push_back(b);
  if (positive.empty()) throw EmptyWeightVector("no block has a positive weight");
  return sample_weighted(w.weights, positive, rng);
}

std::set<int> form_path(const Instance& inst, const WeightVector& weights, int f,
                        int nbar, Rng& rng) {
  inst.require_block(f);
  std::set<int> path{f};
  auto above = restricted_cone_above(inst, f);
  auto below = restricted_cone_below(inst, f);
  path.insert(above.begin(), above.end());
  path.insert(below.begin(), below.end());
  while (static_cast<int>(path.size()) < nbar && (!above.empty() || !below.empty())) {
    if (!above.empty()) {
      const int b = sample_weighted(weights.weights, above, rng);
      above = restricted_cone_above(inst, b);
      path.insert(b);
      path.insert(above.begin(), above.end());
    }
    if (!below.empty()) {
      const int b = sample_weighted(weights.weights, below, rng);
      below = restricted_cone_below(inst, b);
      path.insert(b);
      path.insert(below.begin(), below.end());
    }
  }
  return path;
}

BlendMap blending_contribution(const Instance& inst, int b) {
  inst.require_block(b);
  BlendMap out;
  const PitNetwork& net = inst.network(inst.pit_of_block(b));
  for (int r = 0; r < inst.num_products(); ++r) {
    const bool reach = net.source_reaches_product[r];
    for (const auto& [ename, window] : inst.product(r).grade_windows) {
      const int e = inst.element_index(ename);
      double lower = 0.0, upper = 0.0;
      if (reach && e >= 0)
        for (int q = 0; q < inst.parcel_count(b); ++q) {
          const int p = inst.first_parcel(b) + q;
          lower += (inst.grade(p, e) - window.first) * inst.tonnage(p);
          upper += (window.second - inst.grade(p, e)) * inst.tonnage(p);
        }
      out[{r, e, 0}] = lower;
      out[{r, e, 1}] = upper;
    }
  }
  return out;
}

void BlendingLedger::add(const Instance& inst, int b) {
  for (const auto& [k, v] : blending_contribution(inst, b)) c_of_N[k] += v;
}

bool BlendingLedger::harmful(const Instance& inst, int b) const {
  for (const auto& [k, v] : blending_contribution(inst, b)) {
    if (v >= 0.0) continue;
    auto it = c_of_N.find(k);
    if (it != c_of_N.end() && it->second < 0.0) return true;
  }
  return false;
}

}  // namespace mineplan
