#pragma once

#include <optional>
#include <string_view>

namespace ftir {

/// Which normalization has been applied to a spectrum's values.
enum class Domain { raw, snv, minmax01 };

std::string_view to_string(Domain d);
Domain domain_from_string(std::string_view s);

struct SnvStats {
  double mean = 0.0;
  double std = 1.0;  // sample std (n-1), > 0

  bool operator==(const SnvStats&) const = default;
};

struct MinMax {
  double min = 0.0;
  double max = 1.0;  // > min

  bool operator==(const MinMax&) const = default;
};

/// Everything needed to undo the normalization stack exactly. This is the
/// state carried across the Physics Bridge.
struct NormStats {
  std::optional<SnvStats> snv;
  std::optional<MinMax> range;
  Domain domain = Domain::raw;

  bool operator==(const NormStats&) const = default;
};

}  // namespace ftir
