#include "wonham/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace wonham {

namespace {

struct Entry {
  int line = 0;
  std::string key;
  std::string value;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::ConfigError,
              "line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const Entry& en, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail(en.line, "malformed number for '" + en.key + "'");
  if (!std::isfinite(v))
    fail(en.line, "non-finite value for '" + en.key + "'");
  return v;
}

double parse_double(const Entry& en) { return parse_double(en, en.value); }

long long parse_integer(const Entry& en) {
  long long v = 0;
  const char* first = en.value.data();
  const char* last = first + en.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail(en.line, "malformed number for '" + en.key + "'");
  return v;
}

std::uint64_t parse_seed(const Entry& en) {
  std::uint64_t v = 0;
  const char* first = en.value.data();
  const char* last = first + en.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail(en.line, "malformed number for '" + en.key + "'");
  return v;
}

// splits "lambda.2.1" style keys; returns false when the shape differs
bool split_indexed(const std::string& key, const std::string& stem, int parts,
                   std::array<int, 2>* idx) {
  if (key.size() <= stem.size() + 1 || key.compare(0, stem.size(), stem) != 0 ||
      key[stem.size()] != '.')
    return false;
  std::string rest = key.substr(stem.size() + 1);
  std::vector<std::string> field;
  size_t pos = 0;
  while (true) {
    size_t dot = rest.find('.', pos);
    field.push_back(
        rest.substr(pos, dot == std::string::npos ? dot : dot - pos));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  if (static_cast<int>(field.size()) != parts - 1) return false;
  for (int k = 0; k < parts - 1; ++k) {
    const std::string& f = field[static_cast<size_t>(k)];
    if (f.empty()) return false;
    int v = 0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size()) return false;
    (*idx)[static_cast<size_t>(k)] = v;
  }
  return true;
}

// a partially-given vector family (nu, nu_bar, h) tracked entry by entry
struct VectorFamily {
  std::vector<bool> seen;
  std::vector<double> values;
  int last_line = 0;
  bool any = false;
};

void assign(VectorFamily* fam, const std::string& name, int d, int index,
            const Entry& en) {
  if (index < 1 || index > d)
    fail(en.line, "index out of range for '" + en.key + "' (d = " +
                      std::to_string(d) + ")");
  if (fam->seen.empty()) {
    fam->seen.assign(static_cast<size_t>(d), false);
    fam->values.assign(static_cast<size_t>(d), 0.0);
  }
  size_t k = static_cast<size_t>(index - 1);
  if (fam->seen[k]) fail(en.line, "duplicate key '" + en.key + "'");
  fam->seen[k] = true;
  fam->values[k] = parse_double(en);
  fam->last_line = en.line;
  fam->any = true;
  (void)name;
}

// every entry present, or none; returns true when the family was given
bool complete_or_absent(const VectorFamily& fam, const std::string& name,
                        int d, int end_line) {
  if (!fam.any) return false;
  for (int i = 0; i < d; ++i)
    if (!fam.seen[static_cast<size_t>(i)])
      fail(end_line, "missing required key '" + name + "." +
                         std::to_string(i + 1) + "'");
  return true;
}

Eigen::VectorXd to_simplex(const VectorFamily& fam, const std::string& name) {
  Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXd>(fam.values.data(),
                                        static_cast<long>(fam.values.size()));
  for (long i = 0; i < v.size(); ++i)
    if (v[i] < 0.0)
      fail(fam.last_line, "negative weight in '" + name + "'");
  double s = v.sum();
  if (std::abs(s - 1.0) > 1e-9)
    fail(fam.last_line, "'" + name + "' weights must sum to 1");
  return v / s;
}

}  // namespace

bool is_known_experiment(const std::string& tag) {
  static const char* kTags[] = {"simulate", "gamma-mc",  "gamma-quad",
                                "lyapunov", "bounds",    "couple",
                                "ergodic-avg", "snr-sweep"};
  for (const char* t : kTags)
    if (tag == t) return true;
  return false;
}

ExperimentConfig parse_config(const std::string& text) {
  // pass 1: split into key=value entries, dropping comments and blanks
  std::vector<Entry> entries;
  {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      size_t hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      std::string stripped = trim(raw);
      if (stripped.empty()) continue;
      size_t eq = stripped.find('=');
      if (eq == std::string::npos) fail(line, "expected key=value");
      Entry en;
      en.line = line;
      en.key = trim(stripped.substr(0, eq));
      en.value = trim(stripped.substr(eq + 1));
      if (en.key.empty()) fail(line, "expected key=value");
      if (en.value.empty()) fail(line, "empty value for '" + en.key + "'");
      entries.push_back(std::move(en));
    }
  }
  const int end_line = entries.empty() ? 1 : entries.back().line;

  // pass 2: d first, since every indexed key is validated against it
  int d = 0;
  {
    const Entry* d_entry = nullptr;
    for (const Entry& en : entries)
      if (en.key == "d") {
        if (d_entry) fail(en.line, "duplicate key 'd'");
        d_entry = &en;
      }
    if (!d_entry) fail(end_line, "missing required key 'd'");
    long long v = parse_integer(*d_entry);
    if (v < 1) fail(d_entry->line, "d must be positive");
    if (v > 4096) fail(d_entry->line, "d is implausibly large");
    d = static_cast<int>(v);
  }

  ExperimentConfig cfg;
  Eigen::MatrixXd off = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd off_seen = Eigen::MatrixXd::Zero(d, d);
  VectorFamily h_fam, nu_fam, nu_bar_fam;
  std::map<std::string, int> scalar_seen;
  bool have_sigma = false, have_dt = false, have_horizon = false,
       have_reps = false;
  int burn_line = 0, horizon_line = 0;

  auto scalar_guard = [&](const Entry& en) {
    auto [it, fresh] = scalar_seen.emplace(en.key, en.line);
    (void)it;
    if (!fresh) fail(en.line, "duplicate key '" + en.key + "'");
  };

  for (const Entry& en : entries) {
    std::array<int, 2> idx{0, 0};
    if (en.key == "d") {
      continue;  // handled above
    } else if (split_indexed(en.key, "lambda", 3, &idx)) {
      int i = idx[0], j = idx[1];
      if (i < 1 || i > d || j < 1 || j > d)
        fail(en.line, "index out of range for '" + en.key + "' (d = " +
                          std::to_string(d) + ")");
      if (i == j) fail(en.line, "diagonal entries are derived");
      if (off_seen(i - 1, j - 1) != 0.0)
        fail(en.line, "duplicate key '" + en.key + "'");
      double rate = parse_double(en);
      if (rate < 0.0) fail(en.line, "negative rate for '" + en.key + "'");
      off(i - 1, j - 1) = rate;
      off_seen(i - 1, j - 1) = 1.0;
    } else if (split_indexed(en.key, "h", 2, &idx)) {
      assign(&h_fam, "h", d, idx[0], en);
    } else if (split_indexed(en.key, "nu_bar", 2, &idx)) {
      assign(&nu_bar_fam, "nu_bar", d, idx[0], en);
    } else if (split_indexed(en.key, "nu", 2, &idx)) {
      assign(&nu_fam, "nu", d, idx[0], en);
    } else if (en.key == "sigma") {
      scalar_guard(en);
      cfg.spec.sigma = parse_double(en);
      if (cfg.spec.sigma <= 0.0) fail(en.line, "sigma must be positive");
      have_sigma = true;
    } else if (en.key == "dt") {
      scalar_guard(en);
      cfg.dt = parse_double(en);
      if (cfg.dt <= 0.0) fail(en.line, "dt must be positive");
      have_dt = true;
    } else if (en.key == "horizon") {
      scalar_guard(en);
      cfg.horizon = parse_double(en);
      if (cfg.horizon <= 0.0) fail(en.line, "horizon must be positive");
      have_horizon = true;
      horizon_line = en.line;
    } else if (en.key == "burn_in") {
      scalar_guard(en);
      cfg.burn_in = parse_double(en);
      if (cfg.burn_in < 0.0) fail(en.line, "burn_in must be nonnegative");
      cfg.burn_in_defaulted = false;
      burn_line = en.line;
    } else if (en.key == "replications") {
      scalar_guard(en);
      long long v = parse_integer(en);
      if (v < 1) fail(en.line, "replications must be at least 1");
      if (v > 100000000) fail(en.line, "replications is implausibly large");
      cfg.replications = static_cast<int>(v);
      have_reps = true;
    } else if (en.key == "seed") {
      scalar_guard(en);
      cfg.master_seed = parse_seed(en);
    } else if (en.key == "experiment") {
      scalar_guard(en);
      if (!is_known_experiment(en.value))
        fail(en.line, "unknown experiment '" + en.value + "'");
      cfg.experiment = en.value;
    } else if (en.key == "sigma_sweep") {
      scalar_guard(en);
      std::string rest = en.value;
      size_t pos = 0;
      while (true) {
        size_t comma = rest.find(',', pos);
        std::string item = trim(
            rest.substr(pos, comma == std::string::npos ? comma : comma - pos));
        if (item.empty()) fail(en.line, "malformed number for 'sigma_sweep'");
        double s = parse_double(en, item);
        if (s <= 0.0) fail(en.line, "sigma_sweep values must be positive");
        cfg.sigma_sweep.push_back(s);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    } else {
      fail(en.line, "unknown key '" + en.key + "'");
    }
  }

  // presence of required keys
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j)
      if (i != j && off_seen(i - 1, j - 1) == 0.0)
        fail(end_line, "missing required key 'lambda." + std::to_string(i) +
                           "." + std::to_string(j) + "'");
  if (!complete_or_absent(h_fam, "h", d, end_line))
    fail(end_line, "missing required key 'h.1'");
  if (!have_sigma) fail(end_line, "missing required key 'sigma'");
  if (!have_dt) fail(end_line, "missing required key 'dt'");
  if (!have_horizon) fail(end_line, "missing required key 'horizon'");
  if (!have_reps) fail(end_line, "missing required key 'replications'");

  cfg.spec.generator = GeneratorMatrix::from_off_diagonal(off);
  cfg.spec.h = Eigen::Map<const Eigen::VectorXd>(h_fam.values.data(), d);

  if (complete_or_absent(nu_fam, "nu", d, end_line)) {
    cfg.spec.nu = to_simplex(nu_fam, "nu");
    cfg.nu_defaulted = false;
  }
  if (complete_or_absent(nu_bar_fam, "nu_bar", d, end_line)) {
    cfg.nu_bar = to_simplex(nu_bar_fam, "nu_bar");
    cfg.nu_bar_defaulted = false;
  } else {
    cfg.nu_bar = Eigen::VectorXd::Constant(d, 1.0 / d);
  }

  // cross-key invariant: the averaging window must be nonempty
  if (!cfg.burn_in_defaulted && cfg.horizon <= cfg.burn_in)
    fail(std::max(burn_line, horizon_line), "horizon must exceed burn_in");

  return cfg;
}

}  // namespace wonham
