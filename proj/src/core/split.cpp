#include "egonav/core/split.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "egonav/common/error.hpp"
#include "egonav/common/rng.hpp"

namespace egonav {

bool DatasetSplit::contains(const std::string& scene_id) const {
  auto has = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), scene_id) != v.end();
  };
  return has(train) || has(validation) || has(test);
}

nlohmann::json split_to_json(const DatasetSplit& s) {
  return {{"train", s.train}, {"validation", s.validation}, {"test", s.test}};
}

DatasetSplit split_from_json(const nlohmann::json& j) {
  DatasetSplit s;
  s.train = j.at("train").get<std::vector<std::string>>();
  s.validation = j.at("validation").get<std::vector<std::string>>();
  s.test = j.at("test").get<std::vector<std::string>>();
  return s;
}

DatasetSplit split_dataset(const std::vector<SceneSize>& scenes,
                           std::array<double, 3> ratios, std::uint64_t seed) {
  check(!scenes.empty(), "split_dataset: no scenes");
  double ratio_sum = 0.0;
  int active = 0;
  for (double r : ratios) {
    check(r >= 0.0, "split_dataset: negative ratio ", r);
    ratio_sum += r;
    if (r > 0.0) ++active;
  }
  check(std::abs(ratio_sum - 1.0) <= 1e-9, "split_dataset: ratios sum to ", ratio_sum,
        ", expected 1");
  check(static_cast<int>(scenes.size()) >= active, "split_dataset: ", scenes.size(),
        " scenes cannot fill ", active, " splits");
  {
    std::set<std::string> ids;
    for (const auto& s : scenes) {
      check(ids.insert(s.scene_id).second, "split_dataset: duplicate scene id ",
            s.scene_id);
    }
  }

  // shuffle first so equal-sized scenes land in a seed-dependent order, then a
  // stable sort by descending record count keeps the greedy fill balanced
  std::vector<SceneSize> order = scenes;
  Rng rng(seed);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [](const SceneSize& a, const SceneSize& b) {
    return a.record_count > b.record_count;
  });

  double total = 0.0;
  for (const auto& s : order) total += static_cast<double>(s.record_count);

  std::array<std::vector<std::string>, 3> buckets;
  std::array<double, 3> assigned = {0.0, 0.0, 0.0};
  for (const auto& s : order) {
    int best = -1;
    double best_deficit = -1.0;
    for (int k = 0; k < 3; ++k) {
      if (ratios[k] <= 0.0) continue;
      const double deficit = ratios[k] * total - assigned[k];
      if (deficit > best_deficit) {
        best_deficit = deficit;
        best = k;
      }
    }
    buckets[best].push_back(s.scene_id);
    assigned[best] += static_cast<double>(s.record_count);
  }

  // every active split must end up non-empty
  for (int k = 0; k < 3; ++k) {
    if (ratios[k] <= 0.0 || !buckets[k].empty()) continue;
    int donor = -1;
    for (int d = 0; d < 3; ++d) {
      if (buckets[d].size() > 1 &&
          (donor < 0 || buckets[d].size() > buckets[donor].size())) {
        donor = d;
      }
    }
    check(donor >= 0, "split_dataset: cannot fill split ", k);
    buckets[k].push_back(buckets[donor].back());
    buckets[donor].pop_back();
  }

  return {buckets[0], buckets[1], buckets[2]};
}

}  // namespace egonav
