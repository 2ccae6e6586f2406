#include "catlab/error.hpp"
#include "catlab/experiments.hpp"
#include "catlab/trends.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>

namespace catlab::experiments {

namespace {

using Tables = std::map<std::string, ResultTable>;

const char* const kKnownTables[] = {"verify_axioms",        "localization", "semiclassics_roundtrip",
                                    "semiclassics_egorov",  "semiclassics_breaking", "alf",
                                    "cnt",                  "classical"};

const ResultTable* find(const Tables& t, const std::string& name) {
  const auto it = t.find(name);
  return it == t.end() ? nullptr : &it->second;
}

CriterionStatus missing(std::string id, const std::string& table) {
  return {std::move(id), "MISSING", fmt::format("no {}.csv", table)};
}

CriterionStatus verdict(std::string id, bool ok, std::string detail) {
  return {std::move(id), ok ? "PASS" : "FAIL", std::move(detail)};
}

// Values of `column` over rows matching (key == key_value), sorted by `order`.
std::vector<std::pair<double, double>> series(const ResultTable& t, const std::string& order, const std::string& column,
                                              const std::string& key = {}, double key_value = 0.0) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    if (!key.empty() && t.number(r, key) != key_value) continue;
    out.emplace_back(t.number(r, order), t.number(r, column));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> values(const std::vector<std::pair<double, double>>& s) {
  std::vector<double> v;
  for (const auto& [x, y] : s) v.push_back(y);
  return v;
}

std::optional<double> at(const std::vector<std::pair<double, double>>& s, double x) {
  for (const auto& [k, v] : s)
    if (k == x) return v;
  return std::nullopt;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += fmt::format("{}{:.4g}", i ? " " : "", v[i]);
  return out;
}

CriterionStatus ac1(const Tables& t) {
  const auto* c = find(t, "classical");
  if (!c) return missing("AC-1", "classical");
  const auto inc = series(*c, "k", "increment");
  const auto ll = series(*c, "k", "log_lambda");
  const auto v = at(inc, 8);
  if (!v) return {"AC-1", "MISSING", "no k = 8 row"};
  const double target = *at(ll, 8);
  const double rel = std::abs(*v - target) / target;
  return verdict("AC-1", rel <= 0.10, fmt::format("increment {:.4f} vs log lambda {:.4f} (rel {:.3f})", *v, target, rel));
}

CriterionStatus ac2(const Tables& t) {
  const auto* v = find(t, "verify_axioms");
  if (!v) return missing("AC-2", "verify_axioms");
  double worst = 0.0;
  bool ok = true;
  for (std::size_t r = 0; r < v->rows().size(); ++r) {
    const double tol = 1e-10 * v->number(r, "N");
    for (const char* col : {"composition_residual", "trace_residual", "covariance_residual", "expansion_residual",
                            "overcompleteness_residual"}) {
      const double x = v->number(r, col);
      worst = std::max(worst, x / tol);
      if (!(x <= tol)) ok = false;
    }
  }
  return verdict("AC-2", ok, fmt::format("worst residual / (1e-10 N) = {:.3g}", worst));
}

CriterionStatus ac3(const Tables& t) {
  const auto* a = find(t, "alf");
  if (!a) return missing("AC-3", "alf");
  auto s = series(*a, "N", "gap", "k", 3);
  s.erase(std::remove_if(s.begin(), s.end(), [](const auto& p) { return std::isnan(p.second); }), s.end());
  if (s.size() < 2) return {"AC-3", "MISSING", "fewer than two k = 3 gaps"};
  const auto last = at(s, 256);
  const bool ok = trends::strictly_decreasing(values(s)) && last && *last <= 0.15;
  return verdict("AC-3", ok, fmt::format("gap(k=3) over N: {}", join(values(s))));
}

CriterionStatus ac4(const Tables& t) {
  const auto* c = find(t, "cnt");
  if (!c) return missing("AC-4", "cnt");
  const auto s = series(*c, "N", "width_rate", "k", 2);
  if (s.size() < 2) return {"AC-4", "MISSING", "fewer than two k = 2 rows"};
  const auto last = at(s, 256);
  const bool ok = trends::strictly_decreasing(values(s)) && last && *last <= 0.1;
  return verdict("AC-4", ok, fmt::format("width/k at k=2 over N: {}", join(values(s))));
}

CriterionStatus ac5(const Tables& t) {
  const auto* b = find(t, "semiclassics_breaking");
  if (!b) return missing("AC-5", "semiclassics_breaking");
  const auto k = series(*b, "N", "k_star");
  const auto pred = series(*b, "N", "predicted");
  if (k.size() < 3) return {"AC-5", "MISSING", "fewer than three breaking rows"};
  std::vector<double> logN;
  for (const auto& [N, v] : k) logN.push_back(std::log(N));
  const double fitted = trends::slope(logN, values(k));
  const double expected = trends::slope(logN, values(pred));
  const bool ok = trends::nondecreasing(values(k)) && fitted >= expected / 2.0 && fitted <= 2.0 * expected;
  return verdict("AC-5", ok, fmt::format("k* = {}; slope {:.3f} vs {:.3f}", join(values(k)), fitted, expected));
}

CriterionStatus ac6(const Tables& t) {
  const auto* v = find(t, "verify_axioms");
  if (!v) return missing("AC-6", "verify_axioms");
  const auto loc8 = series(*v, "N", "loc8_max_rel_error");
  const auto sep = at(series(*v, "N", "max_separated_kernel"), 64);
  double worst = 0.0;
  for (double x : values(loc8)) worst = std::max(worst, x);
  if (!sep) return {"AC-6", worst <= 1e-12 ? "MISSING" : "FAIL", fmt::format("loc8 error {:.3g}; no N = 64 row", worst)};
  return verdict("AC-6", worst <= 1e-12 && *sep <= 1e-3,
                 fmt::format("loc8 error {:.3g}; separated N|K|^2 at N=64 = {:.4g}", worst, *sep));
}

CriterionStatus ac7(const Tables& t) {
  const auto* a = find(t, "alf");
  if (!a) return missing("AC-7", "alf");
  bool capped = true;
  for (std::size_t r = 0; r < a->rows().size(); ++r)
    if (a->number(r, "H") > a->number(r, "cap")) capped = false;
  const auto rate = series(*a, "k", "H_rate", "N", 32);
  const auto r2 = at(rate, 2), r5 = at(rate, 5);
  if (!r2 || !r5) return {"AC-7", capped ? "MISSING" : "FAIL", "no N = 32 rows at k = 2 and k = 5"};
  const double ratio = *r5 / *r2;
  return verdict("AC-7", capped && ratio < 0.8,
                 fmt::format("H <= 2 log N: {}; H5/5 over H2/2 at N=32 = {:.4f}", capped ? "yes" : "no", ratio));
}

CriterionStatus ac8(const Tables& t) {
  const auto* r = find(t, "semiclassics_roundtrip");
  if (!r) return missing("AC-8", "semiclassics_roundtrip");
  std::map<std::string, std::vector<std::pair<double, double>>> l2, ov;
  for (std::size_t i = 0; i < r->rows().size(); ++i) {
    const std::string f = r->text(i, "function");
    if (f != "cos_x1" && f != "left_half") continue;
    l2[f].emplace_back(r->number(i, "N"), r->number(i, "roundtrip_l2"));
    ov[f].emplace_back(r->number(i, "N"), r->number(i, "overlap_residual"));
  }
  if (l2.size() < 2) return {"AC-8", "MISSING", "roundtrip rows incomplete"};
  bool ok = true;
  std::string detail;
  for (auto* m : {&l2, &ov})
    for (auto& [f, s] : *m) {
      std::sort(s.begin(), s.end());
      if (!trends::decreasing_with_one_inversion(values(s), 0.05)) {
        ok = false;
        detail += fmt::format("{} not decreasing: {}; ", f, join(values(s)));
      }
    }
  return verdict("AC-8", ok, ok ? "roundtrip and overlap residuals decrease in N" : detail);
}

}  // namespace

bool Report::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.status == "PASS"; });
}

Report run_report(const std::filesystem::path& dir) {
  Tables tables;
  for (const char* name : kKnownTables) {
    const auto file = dir / (std::string(name) + ".csv");
    if (std::filesystem::exists(file)) tables.emplace(name, ResultTable::read_csv(file));
  }
  if (tables.empty()) throw Error(ErrorCode::MissingArtifacts, fmt::format("no result tables in {}", dir.string()));

  Report report;
  report.criteria = {ac1(tables), ac2(tables), ac3(tables), ac4(tables),
                     ac5(tables), ac6(tables), ac7(tables), ac8(tables)};

  ResultTable summary("summary", {"criterion", "status", "detail"});
  std::string text;
  for (const auto& c : report.criteria) {
    summary.add_row({c.id, c.status, c.detail});
    text += fmt::format("{} {} {}\n", c.id, c.status, c.detail);
  }
  summary.write_csv(dir / "summary.csv");
  std::ofstream out(dir / "summary.txt", std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, fmt::format("cannot write summary in {}", dir.string()));
  out << text;
  return report;
}

}  // namespace catlab::experiments
