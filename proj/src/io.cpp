#include "socmc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace socmc {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(0, 1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  }
  return out;
}

[[noreturn]] void bad_row(const std::string& path, int line_no, const std::string& why) {
  throw DataError(path + ":" + std::to_string(line_no) + ": " + why);
}

int parse_int(const std::string& s, const std::string& path, int line_no, const char* what) {
  try {
    std::size_t pos;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad_row(path, line_no, std::string("bad ") + what + " '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& path, int line_no,
                    const char* what) {
  try {
    std::size_t pos;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad_row(path, line_no, std::string("bad ") + what + " '" + s + "'");
  }
}
}  // namespace

Dataset read_dataset_csv(const std::string& path, const ManagementSchedule& sched) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open dataset " + path);
  // the frame: initial-state year precedes the first treatment year
  Dataset ds = Dataset::empty(sched.n_fields, sched.year0 - 1, sched.n_years + 1);

  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> tok = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (tok.size() == 4 && tok[0] == "field") continue;  // header row
      bad_row(path, line_no, "expected header 'field,year,channel,value'");
    }
    if (tok.size() != 4) bad_row(path, line_no, "expected 4 columns");
    const int field = parse_int(tok[0], path, line_no, "field");
    const int year = parse_int(tok[1], path, line_no, "year");
    Channel ch;
    try {
      ch = channel_from_string(tok[2]);
    } catch (const std::exception&) {
      bad_row(path, line_no, "unknown channel '" + tok[2] + "'");
    }
    const double value = parse_double(tok[3], path, line_no, "value");
    if (!(value > 0)) bad_row(path, line_no, "nonpositive value " + tok[3]);
    if (field < 1 || field > ds.n_fields)
      bad_row(path, line_no, "field " + tok[0] + " outside the schedule's fields");
    const int t = year - ds.year0;
    if (t < 0 || t >= ds.n_years)
      bad_row(path, line_no, "year " + tok[1] + " outside the schedule's horizon");
    if (ds.has(field - 1, t, ch))
      bad_row(path, line_no, "duplicate cell (field " + tok[0] + ", " + tok[1] + ", " +
                                 tok[2] + ")");
    ds.set(field - 1, t, ch, value);
  }
  if (!header_seen) throw DataError(path + ": empty dataset file");
  return ds;
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path);
  os << "field,year,channel,value\n";
  for (int f = 0; f < ds.n_fields; ++f)
    for (int t = 0; t < ds.n_years; ++t)
      for (int c = 0; c < kNumChannel; ++c)
        if (ds.has(f, t, Channel(c)))
          os << (f + 1) << ',' << (ds.year0 + t) << ',' << to_string(Channel(c)) << ','
             << fmt17(ds.value(f, t, Channel(c))) << '\n';
  if (!os) throw DataError("failed writing " + path);
}

ManagementSchedule read_schedule_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open schedule " + path);
  struct Row {
    int field, year;
    Treatment tr;
  };
  std::vector<Row> rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  int min_year = 0, max_year = 0, max_field = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> tok = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (tok.size() == 3 && tok[0] == "field") continue;
      bad_row(path, line_no, "expected header 'field,year,treatment'");
    }
    if (tok.size() != 3) bad_row(path, line_no, "expected 3 columns");
    Row r;
    r.field = parse_int(tok[0], path, line_no, "field");
    r.year = parse_int(tok[1], path, line_no, "year");
    try {
      r.tr = treatment_from_string(tok[2]);
    } catch (const std::exception&) {
      bad_row(path, line_no, "unknown treatment '" + tok[2] + "'");
    }
    if (r.field < 1) bad_row(path, line_no, "field must be >= 1");
    if (rows.empty()) {
      min_year = max_year = r.year;
    } else {
      min_year = std::min(min_year, r.year);
      max_year = std::max(max_year, r.year);
    }
    max_field = std::max(max_field, r.field);
    rows.push_back(r);
  }
  if (rows.empty()) throw DataError(path + ": schedule holds no rows");

  ManagementSchedule sched =
      ManagementSchedule::uniform(max_field, min_year, max_year - min_year + 1,
                                  Treatment::Fallow);
  std::vector<char> seen(std::size_t(max_field) * sched.n_years, 0);
  for (const Row& r : rows) {
    char& mark = seen[std::size_t(r.field - 1) * sched.n_years + (r.year - min_year)];
    if (mark)
      throw DataError(path + ": duplicate treatment for field " + std::to_string(r.field) +
                      ", year " + std::to_string(r.year));
    mark = 1;
    sched.set(r.field - 1, r.year, r.tr);
  }
  for (int f = 0; f < max_field; ++f)
    for (int t = 0; t < sched.n_years; ++t)
      if (!seen[std::size_t(f) * sched.n_years + t])
        throw DataError(path + ": no treatment for field " + std::to_string(f + 1) +
                        ", year " + std::to_string(min_year + t));
  return sched;
}

void write_schedule_csv(const std::string& path, const ManagementSchedule& sched) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path);
  os << "field,year,treatment\n";
  for (int f = 0; f < sched.n_fields; ++f)
    for (int t = 0; t < sched.n_years; ++t)
      os << (f + 1) << ',' << (sched.year0 + t) << ','
         << to_string(sched.at(f, sched.year0 + t)) << '\n';
  if (!os) throw DataError("failed writing " + path);
}

namespace {
const std::map<std::string, Prior::Family>& family_names() {
  static const std::map<std::string, Prior::Family> m = {
      {"normal", Prior::Family::Normal},
      {"truncnormal", Prior::Family::TruncNormalLB0},
      {"lognormal", Prior::Family::LogNormal},
      {"uniform", Prior::Family::Uniform},
      {"beta", Prior::Family::Beta},
      {"invgamma", Prior::Family::InvGamma},
      {"fixed", Prior::Family::Fixed},
  };
  return m;
}

std::string family_to_string(Prior::Family f) {
  for (const auto& [name, fam] : family_names())
    if (fam == f) return name;
  throw ContractViolation("unknown prior family");
}

Prior prior_from_json(const json& j) {
  Prior p;
  const std::string fam = j.at("family").get<std::string>();
  const auto it = family_names().find(fam);
  if (it == family_names().end()) throw ConfigError("unknown prior family '" + fam + "'");
  p.family = it->second;
  p.a = j.at("a").get<double>();
  p.b = j.value("b", 0.0);
  return p;
}

json prior_to_json(const Prior& p) {
  return json{{"family", family_to_string(p.family)}, {"a", p.a}, {"b", p.b}};
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
}  // namespace

SocModelSpec RunConfig::model_spec() const {
  SocModelSpec spec;
  spec.variant = variant_from_string(model);
  spec.table = input_table_from_string(table);
  spec.kappa = kappa;
  spec.mediate_dpm_decay = mediate_dpm_decay;
  spec.bio_init_fraction = bio_init_fraction;
  spec.cleared_input = cleared_input;
  if (!(spec.kappa > 0)) throw ConfigError("kappa must be positive");
  return spec;
}

PriorSet RunConfig::priors() const {
  return prior_set_from_string(prior_set.empty() ? table : prior_set);
}

namespace {
RunConfig config_from_json(const json& j) {
  RunConfig rc;
  maybe(j, "model", rc.model);
  maybe(j, "table", rc.table);
  maybe(j, "prior_set", rc.prior_set);
  maybe(j, "data", rc.data_path);
  maybe(j, "schedule", rc.schedule_path);
  maybe(j, "out_dir", rc.out_dir);
  maybe(j, "select", rc.select);
  maybe(j, "min_obs", rc.min_obs);
  maybe(j, "lfo_j2", rc.lfo_j2);
  maybe(j, "store_trajectories", rc.store_trajectories);
  maybe(j, "all_channels_in_pf", rc.all_channels_in_pf);
  if (j.contains("model_options")) {
    const json& m = j.at("model_options");
    maybe(m, "kappa", rc.kappa);
    maybe(m, "mediate_dpm_decay", rc.mediate_dpm_decay);
    maybe(m, "bio_init_fraction", rc.bio_init_fraction);
    maybe(m, "cleared_input", rc.cleared_input);
  }
  if (j.contains("sampler")) {
    const json& s = j.at("sampler");
    maybe(s, "iterations", rc.sampler.iterations);
    maybe(s, "burn_in", rc.sampler.burn_in);
    maybe(s, "thin", rc.sampler.thin);
    maybe(s, "tau", rc.sampler.tau);
    maybe(s, "n_particles", rc.sampler.n_particles);
    maybe(s, "n_chains", rc.sampler.n_chains);
    maybe(s, "seed", rc.sampler.seed);
    maybe(s, "init_scale", rc.sampler.init_scale);
    maybe(s, "adapt", rc.sampler.adapt);
    maybe(s, "accept_target", rc.sampler.accept_target);
    maybe(s, "max_init_attempts", rc.sampler.max_init_attempts);
    maybe(s, "checkpoint_every", rc.sampler.checkpoint_every);
  }
  if (j.contains("priors"))
    for (const auto& [name, pj] : j.at("priors").items())
      rc.prior_overrides[name] = prior_from_json(pj);
  return rc;
}

json config_to_json(const RunConfig& rc) {
  json j;
  j["model"] = rc.model;
  j["table"] = rc.table;
  if (!rc.prior_set.empty()) j["prior_set"] = rc.prior_set;
  j["data"] = rc.data_path;
  j["schedule"] = rc.schedule_path;
  j["out_dir"] = rc.out_dir;
  j["select"] = rc.select;
  j["min_obs"] = rc.min_obs;
  j["lfo_j2"] = rc.lfo_j2;
  j["store_trajectories"] = rc.store_trajectories;
  j["all_channels_in_pf"] = rc.all_channels_in_pf;
  j["model_options"] = {{"kappa", rc.kappa},
                        {"mediate_dpm_decay", rc.mediate_dpm_decay},
                        {"bio_init_fraction", rc.bio_init_fraction},
                        {"cleared_input", rc.cleared_input}};
  j["sampler"] = {{"iterations", rc.sampler.iterations},
                  {"burn_in", rc.sampler.burn_in},
                  {"thin", rc.sampler.thin},
                  {"tau", rc.sampler.tau},
                  {"n_particles", rc.sampler.n_particles},
                  {"n_chains", rc.sampler.n_chains},
                  {"seed", rc.sampler.seed},
                  {"init_scale", rc.sampler.init_scale},
                  {"adapt", rc.sampler.adapt},
                  {"accept_target", rc.sampler.accept_target},
                  {"max_init_attempts", rc.sampler.max_init_attempts},
                  {"checkpoint_every", rc.sampler.checkpoint_every}};
  if (!rc.prior_overrides.empty()) {
    json pj = json::object();
    for (const auto& [name, p] : rc.prior_overrides) pj[name] = prior_to_json(p);
    j["priors"] = pj;
  }
  return j;
}
}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    if (j.contains("config")) j = j.at("config");  // a manifest is a valid config
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_manifest(const std::string& path, const RunConfig& rc) {
  json j;
  j["manifest_version"] = 1;
  j["tool"] = "socmc";
  j["config"] = config_to_json(rc);
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write manifest " + path);
  os << j.dump(2) << '\n';
}

}  // namespace socmc
