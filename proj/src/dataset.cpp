#include "socmc/dataset.hpp"

#include <limits>

namespace socmc {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

std::string to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::ThreePool: return "three-pool";
    case ModelVariant::ThreePoolBioK: return "three-pool-biok";
    case ModelVariant::FivePool: return "five-pool";
    case ModelVariant::FivePoolBioK: return "five-pool-biok";
  }
  return "three-pool";
}

ModelVariant variant_from_string(const std::string& s) {
  if (s == "three-pool") return ModelVariant::ThreePool;
  if (s == "three-pool-biok") return ModelVariant::ThreePoolBioK;
  if (s == "five-pool") return ModelVariant::FivePool;
  if (s == "five-pool-biok") return ModelVariant::FivePoolBioK;
  throw ConfigError("unknown model variant: " + s);
}

std::string to_string(Treatment t) {
  switch (t) {
    case Treatment::WheatGrain: return "WheatGrain";
    case Treatment::WheatHay: return "WheatHay";
    case Treatment::Pasture: return "Pasture";
    case Treatment::PastureHay: return "PastureHay";
    case Treatment::SorghumGrain: return "SorghumGrain";
    case Treatment::SorghumHay: return "SorghumHay";
    case Treatment::Fallow: return "Fallow";
    case Treatment::Cleared: return "Cleared";
  }
  return "Fallow";
}

Treatment treatment_from_string(const std::string& s) {
  if (s == "WheatGrain") return Treatment::WheatGrain;
  if (s == "WheatHay") return Treatment::WheatHay;
  if (s == "Pasture") return Treatment::Pasture;
  if (s == "PastureHay") return Treatment::PastureHay;
  if (s == "SorghumGrain") return Treatment::SorghumGrain;
  if (s == "SorghumHay") return Treatment::SorghumHay;
  if (s == "Fallow") return Treatment::Fallow;
  if (s == "Cleared") return Treatment::Cleared;
  throw DataError("unknown treatment: " + s);
}

std::string to_string(InputTable t) {
  switch (t) {
    case InputTable::Tarlee: return "tarlee";
    case InputTable::Brigalow: return "brigalow";
    case InputTable::Rothamsted: return "rothamsted";
  }
  return "tarlee";
}

InputTable input_table_from_string(const std::string& s) {
  if (s == "tarlee") return InputTable::Tarlee;
  if (s == "brigalow") return InputTable::Brigalow;
  if (s == "rothamsted") return InputTable::Rothamsted;
  throw ConfigError("unknown input table: " + s);
}

std::string to_string(Channel c) {
  switch (c) {
    case Channel::TOC: return "TOC";
    case Channel::POC: return "POC";
    case Channel::HUM: return "HUM";
    case Channel::IOM: return "IOM";
    case Channel::GW: return "GW";
    case Channel::W: return "W";
    case Channel::GS: return "GS";
    case Channel::S: return "S";
    case Channel::P: return "P";
    case Channel::G: return "G";
    case Channel::Str: return "Str";
  }
  return "TOC";
}

Channel channel_from_string(const std::string& s) {
  for (int i = 0; i < kNumChannel; ++i)
    if (to_string(Channel(i)) == s) return Channel(i);
  throw DataError("unknown channel: " + s);
}

std::string to_string(Plant p) {
  switch (p) {
    case Plant::GW: return "GW";
    case Plant::W: return "W";
    case Plant::GS: return "GS";
    case Plant::S: return "S";
    case Plant::P: return "P";
    case Plant::G: return "G";
    case Plant::Str: return "Str";
  }
  return "GW";
}

Dataset Dataset::empty(int n_fields, int year0, int n_years) {
  Dataset d;
  d.n_fields = n_fields;
  d.year0 = year0;
  d.n_years = n_years;
  d.values.assign(std::size_t(n_fields) * n_years * kNumChannel, kNan);
  return d;
}

void Dataset::set(int field, int t, Channel c, double v) {
  if (field < 0 || field >= n_fields || t < 0 || t >= n_years)
    throw DataError("observation outside the dataset grid");
  values[idx(field, t, c)] = v;
}

bool Dataset::year_has_obs(int t) const {
  for (int f = 0; f < n_fields; ++f)
    for (int c = 0; c < kNumChannel; ++c)
      if (has(f, t, Channel(c))) return true;
  return false;
}

std::vector<int> Dataset::observed_years() const {
  std::vector<int> out;
  for (int t = 0; t < n_years; ++t)
    if (year_has_obs(t)) out.push_back(t);
  return out;
}

long Dataset::n_obs() const {
  long n = 0;
  for (double v : values) n += !std::isnan(v);
  return n;
}

bool Dataset::channel_used(Channel c) const {
  for (int f = 0; f < n_fields; ++f)
    for (int t = 0; t < n_years; ++t)
      if (has(f, t, c)) return true;
  return false;
}

Dataset Dataset::truncated_to_observed(int k) const {
  const auto oy = observed_years();
  if (k <= 0 || k > int(oy.size()))
    throw ContractViolation("truncation index outside the observed-year range");
  Dataset out = Dataset::empty(n_fields, year0, oy[k - 1] + 1);
  for (int f = 0; f < n_fields; ++f)
    for (int t = 0; t < out.n_years; ++t)
      for (int c = 0; c < kNumChannel; ++c)
        out.values[out.idx(f, t, Channel(c))] = values[idx(f, t, Channel(c))];
  return out;
}

ManagementSchedule ManagementSchedule::uniform(int n_fields, int year0, int n_years,
                                               Treatment t) {
  ManagementSchedule s;
  s.n_fields = n_fields;
  s.year0 = year0;
  s.n_years = n_years;
  s.treatments.assign(std::size_t(n_fields) * n_years, t);
  return s;
}

}  // namespace socmc
