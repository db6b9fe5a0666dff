#pragma once

#include <map>
#include <optional>

namespace nspcert {

/// Restricted isometry constants delta_K of one matrix, keyed by order K.
class RicProfile {
 public:
  RicProfile() = default;
  RicProfile(std::initializer_list<std::pair<const int, double>> entries)
      : deltas_(entries) {}

  void set(int order, double delta) { deltas_[order] = delta; }

  std::optional<double> at(int order) const {
    auto it = deltas_.find(order);
    if (it == deltas_.end()) return std::nullopt;
    return it->second;
  }

  bool empty() const noexcept { return deltas_.empty(); }
  const std::map<int, double>& entries() const noexcept { return deltas_; }

 private:
  std::map<int, double> deltas_;
};

/// Largest K0 with delta_{2 K0} present and below 1; 0 if there is none.
int k0_from_rics(const RicProfile& profile);

}  // namespace nspcert
