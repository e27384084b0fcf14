#pragma once
#include <vector>

#include "socmc/core.hpp"

namespace socmc {

// Observations on a dense (field, year, channel) grid; NaN marks missing.
// Years are absolute (calendar) with `year0` the initial-state year; index
// t = year - year0 runs 0..n_years-1.
struct Dataset {
  int n_fields = 0;
  int year0 = 0;
  int n_years = 0;
  std::vector<double> values;

  static Dataset empty(int n_fields, int year0, int n_years);

  std::size_t idx(int field, int t, Channel c) const {
    return (std::size_t(field) * n_years + t) * kNumChannel + int(c);
  }
  double value(int field, int t, Channel c) const { return values[idx(field, t, c)]; }
  bool has(int field, int t, Channel c) const { return !std::isnan(values[idx(field, t, c)]); }
  // all kNumChannel entries of one (field, year), contiguous
  const double* row(int field, int t) const { return values.data() + idx(field, t, Channel(0)); }
  void set(int field, int t, Channel c, double v);

  bool year_has_obs(int t) const;
  // year indices holding at least one observation (any field/channel), ascending
  std::vector<int> observed_years() const;
  long n_obs() const;
  bool channel_used(Channel c) const;

  // keep only observations in the first `k` observed years; horizon trimmed
  // to the last retained observation year
  Dataset truncated_to_observed(int k) const;
};

// Treatment per (field, year). May start after the dataset's initial year;
// the process model queries treatments from year0+1 onward only.
struct ManagementSchedule {
  int n_fields = 0;
  int year0 = 0;  // first year carrying a treatment
  int n_years = 0;
  std::vector<Treatment> treatments;

  static ManagementSchedule uniform(int n_fields, int year0, int n_years, Treatment t);

  Treatment at(int field, int year) const {
    const int t = year - year0;
    if (field < 0 || field >= n_fields || t < 0 || t >= n_years)
      throw DataError("schedule: no treatment for field " + std::to_string(field + 1) +
                      ", year " + std::to_string(year));
    return treatments[std::size_t(field) * n_years + t];
  }
  void set(int field, int year, Treatment tr) {
    treatments[std::size_t(field) * n_years + (year - year0)] = tr;
  }
  bool covers(int year) const { return year >= year0 && year < year0 + n_years; }
};

}  // namespace socmc
