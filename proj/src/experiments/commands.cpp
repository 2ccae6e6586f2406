#include "catlab/coherent.hpp"
#include "catlab/entropy_alf.hpp"
#include "catlab/entropy_cnt.hpp"
#include "catlab/error.hpp"
#include "catlab/experiments.hpp"
#include "catlab/parallel.hpp"
#include "catlab/quantize.hpp"
#include "catlab/trends.hpp"
#include "catlab/version.hpp"

#include <boost/version.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>

namespace catlab::experiments {

namespace {

using coherent::CoherentFamily;
using linalg::CMatrix;
using quantize::TorusFunction;
using weyl::WeylIndex;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

torus::CatMap map_of(const ExperimentConfig& cfg) {
  return torus::CatMap::make(cfg.map[0], cfg.map[1], cfg.map[2], cfg.map[3]);
}

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Per-N sweep with a worker pool; results land in input order.
template <class Row, class Fn>
std::vector<Row> sweep(const std::vector<std::int64_t>& sizes, Fn&& fn) {
  std::vector<Row> out(sizes.size());
  parallel_for(sizes.size(), [&](std::size_t i) { out[i] = fn(sizes[i]); });
  return out;
}

struct AlgebraResiduals {
  double composition = 0.0;
  double trace = 0.0;
  double covariance = 0.0;
  double expansion = 0.0;
};

AlgebraResiduals algebra_residuals(const weyl::WeylContext& ctx, int trials, std::uint64_t seed) {
  const std::int64_t N = ctx.N();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> label(-3 * N, 3 * N);
  std::normal_distribution<double> gauss;
  AlgebraResiduals r;
  const auto& A = *ctx.map();
  for (int t = 0; t < trials; ++t) {
    const WeylIndex n{label(rng), label(rng)}, m{label(rng), label(rng)};
    const CMatrix Wn = weyl::weyl_operator(ctx, n), Wm = weyl::weyl_operator(ctx, m);
    const double sigma = static_cast<double>(weyl::symplectic(n, m) % (2 * N));
    const linalg::Complex factor = std::polar(1.0, std::numbers::pi * sigma / static_cast<double>(N));
    r.composition = std::max(r.composition, (Wn * Wm - factor * weyl::weyl_operator(ctx, n + m)).cwiseAbs().maxCoeff());
    r.trace = std::max(r.trace, std::abs(Wn.trace() / static_cast<double>(N) - weyl::weyl_trace(ctx, n)));
    const auto An = A.apply(n.n1, n.n2, 1);
    r.covariance = std::max(r.covariance,
                            (weyl::theta(ctx, Wn, 1) - weyl::weyl_operator(ctx, {An[0], An[1]})).cwiseAbs().maxCoeff());
    CMatrix X(N, N);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = {gauss(rng), gauss(rng)};
    r.expansion = std::max(r.expansion, (weyl::reconstruct(ctx, weyl::expand(ctx, X)) - X).cwiseAbs().maxCoeff());
  }
  return r;
}

TorusFunction observable(const std::string& name) {
  return name == "left_half" ? TorusFunction::left_half() : TorusFunction::cos_x1();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

CommandResult run_verify_axioms(const ExperimentConfig& cfg) {
  const auto A = map_of(cfg);
  const std::string hash = config_hash(cfg);
  const auto sizes = sorted_unique(cfg.verify.N_list);

  struct Row {
    double normalization = 0.0, overcomplete = 0.0, loc8 = 0.0, separated = 0.0;
    std::int64_t bound_violations = 0;
    bool cell_constant = true;
    AlgebraResiduals algebra;
    std::vector<coherent::LocalizationRow> localization;
  };

  const auto rows = sweep<Row>(sizes, [&](std::int64_t N) {
    const auto ctx = weyl::WeylContext::for_map(N, A);
    auto fam = CoherentFamily::binomial(ctx);
    if (cfg.verify.fault == "scale_fundamental") fam = CoherentFamily::from_vector(ctx, 1.01 * fam.fundamental());
    Row r;
    r.normalization = coherent::normalization_defect(fam);
    r.overcomplete = coherent::overcompleteness_residual(fam);
    const double n = static_cast<double>(N);
    for (std::int64_t p = 0; p < N; ++p) {
      const torus::TorusPoint corner{static_cast<double>(p) / n, static_cast<double>((3 * p) % N) / n};
      const torus::TorusPoint inner{corner.x1 + 0.5 / n, corner.x2 + 0.999 / n};
      if ((fam.state(corner) - fam.state(inner)).norm() != 0.0) r.cell_constant = false;
    }
    for (std::int64_t n2 = 1; n2 < N; ++n2) {
      const double expected = coherent::scaled_overlap_vertical(N, n2);
      const double got = n * std::norm(coherent::overlap(fam, {0, n2}));
      // Below the normal range doubles cannot hold 12 relative digits.
      const double err = std::abs(got - expected) / std::max(expected, std::numeric_limits<double>::min());
      r.loc8 = std::max(r.loc8, err);
    }
    for (std::int64_t n1 = 1; n1 < N; ++n1)
      for (std::int64_t n2 = 0; n2 < N; ++n2) {
        const auto bound = coherent::overlap_bound(N, n1);
        if (bound && std::abs(coherent::overlap(fam, {n1, n2})) > *bound * (1.0 + 1e-12)) ++r.bound_violations;
      }
    r.separated = coherent::max_separated_kernel(fam, 0.25);
    r.algebra = algebra_residuals(ctx, cfg.verify.trials, cfg.seed ^ static_cast<std::uint64_t>(N));
    const std::vector<std::pair<torus::TorusPoint, torus::TorusPoint>> pairs{
        {{0.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {0.0, 0.5}}, {{0.0, 0.0}, {0.5, 0.0}},
        {{0.0, 0.0}, {0.25, 0.25}}, {{0.0, 0.0}, {0.0, 0.25}}, {{0.0, 0.0}, {0.25, 0.0}}};
    r.localization = coherent::localization_table(fam, pairs);
    return r;
  });

  CommandResult out;
  out.command = "verify-axioms";
  ResultTable axioms("verify_axioms", {"config_hash", "N", "normalization_defect", "cell_constant",
                                       "overcompleteness_residual", "loc8_max_rel_error", "bound_violations",
                                       "max_separated_kernel", "composition_residual", "trace_residual",
                                       "covariance_residual", "expansion_residual"});
  ResultTable loc("localization", {"config_hash", "N", "x1", "x2", "y1", "y2", "distance", "scaled_kernel", "overlap_bound"});
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::int64_t N = sizes[i];
    const Row& r = rows[i];
    const double algebra_tol = 1e-10 * static_cast<double>(N);
    axioms.add_row({hash, N, r.normalization, std::int64_t{r.cell_constant ? 1 : 0}, r.overcomplete, r.loc8,
                    r.bound_violations, r.separated, r.algebra.composition, r.algebra.trace, r.algebra.covariance,
                    r.algebra.expansion});
    for (const auto& l : r.localization)
      loc.add_row({hash, N, l.x.x1, l.x.x2, l.y.x1, l.y.x2, l.distance, l.scaled_kernel, l.bound ? *l.bound : kNaN});

    if (r.normalization > 1e-12) out.breaches.push_back(fmt::format("N={}: normalization defect {:.3e}", N, r.normalization));
    if (!r.cell_constant) out.breaches.push_back(fmt::format("N={}: states vary inside a cell", N));
    if (r.overcomplete > algebra_tol) out.breaches.push_back(fmt::format("N={}: overcompleteness residual {:.3e}", N, r.overcomplete));
    if (r.loc8 > 1e-12) out.breaches.push_back(fmt::format("N={}: vertical overlap relative error {:.3e}", N, r.loc8));
    if (r.bound_violations > 0) out.breaches.push_back(fmt::format("N={}: {} overlaps above the exponential bound", N, r.bound_violations));
    const std::pair<const char*, double> algebra[] = {{"composition", r.algebra.composition}, {"trace", r.algebra.trace},
                                                      {"covariance", r.algebra.covariance}, {"expansion", r.algebra.expansion}};
    for (const auto& [what, value] : algebra)
      if (value > algebra_tol) out.breaches.push_back(fmt::format("N={}: {} residual {:.3e}", N, what, value));
  }
  out.tables = {std::move(axioms), std::move(loc)};
  return out;
}

CommandResult run_semiclassics(const ExperimentConfig& cfg) {
  const auto A = map_of(cfg);
  const std::string hash = config_hash(cfg);
  const auto& sc = cfg.semiclassics;
  CommandResult out;
  out.command = "semiclassics";

  // Quantization limits.
  const auto rt_sizes = sorted_unique(sc.roundtrip_N_list);
  struct RoundTrip {
    double cos_l2, cos_sup, left_l2, left_sup, cos_overlap, left_overlap, disjoint_overlap;
  };
  const auto rt = sweep<RoundTrip>(rt_sizes, [&](std::int64_t N) {
    const auto fam = CoherentFamily::binomial(weyl::WeylContext::for_map(N, A));
    const auto c = TorusFunction::cos_x1(), l = TorusFunction::left_half();
    const auto r = TorusFunction::rectangle(0.5, 1.0, 0.0, 1.0);
    const int s = cfg.subsample;
    return RoundTrip{quantize::roundtrip_error(fam, c, quantize::GridNorm::L2, s),
                     quantize::roundtrip_error(fam, c, quantize::GridNorm::Sup, s),
                     quantize::roundtrip_error(fam, l, quantize::GridNorm::L2, s),
                     quantize::roundtrip_error(fam, l, quantize::GridNorm::Sup, s),
                     quantize::state_overlap_residual(fam, c, c, s),
                     quantize::state_overlap_residual(fam, l, l, s),
                     quantize::state_overlap_residual(fam, l, r, s)};
  });
  ResultTable roundtrip("semiclassics_roundtrip",
                        {"config_hash", "N", "function", "roundtrip_l2", "roundtrip_sup", "overlap_residual"});
  std::map<std::string, std::vector<double>> l2_series, overlap_series;
  for (std::size_t i = 0; i < rt_sizes.size(); ++i) {
    const auto& r = rt[i];
    roundtrip.add_row({hash, rt_sizes[i], std::string("cos_x1"), r.cos_l2, r.cos_sup, r.cos_overlap});
    roundtrip.add_row({hash, rt_sizes[i], std::string("left_half"), r.left_l2, r.left_sup, r.left_overlap});
    roundtrip.add_row({hash, rt_sizes[i], std::string("left_vs_right"), kNaN, kNaN, r.disjoint_overlap});
    l2_series["cos_x1"].push_back(r.cos_l2);
    l2_series["left_half"].push_back(r.left_l2);
    overlap_series["cos_x1"].push_back(r.cos_overlap);
    overlap_series["left_half"].push_back(r.left_overlap);
  }
  for (const auto& [name, series] : l2_series)
    if (!trends::decreasing_with_one_inversion(series, 0.05)) out.breaches.push_back(fmt::format("roundtrip error of {} not decreasing in N", name));
  for (const auto& [name, series] : overlap_series)
    if (!trends::decreasing_with_one_inversion(series, 0.05)) out.breaches.push_back(fmt::format("state overlap residual of {} not decreasing in N", name));

  // Breaking time.
  const auto sizes = sorted_unique(sc.N_list);
  const TorusFunction f = observable(sc.observable);
  const auto curves = sweep<std::vector<double>>(sizes, [&](std::int64_t N) {
    const auto fam = CoherentFamily::binomial(weyl::WeylContext::for_map(N, A));
    std::vector<double> res;
    for (int k = 0; k <= sc.k_max; ++k) res.push_back(quantize::egorov_residual(fam, f, k, cfg.subsample));
    return res;
  });
  ResultTable egorov("semiclassics_egorov", {"config_hash", "N", "observable", "k", "residual"});
  ResultTable breaking("semiclassics_breaking",
                       {"config_hash", "N", "observable", "threshold", "k_star", "censored", "predicted", "alpha_log_N"});
  std::vector<double> k_star, log_n;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::int64_t N = sizes[i];
    int first = sc.k_max + 1;
    for (int k = 0; k <= sc.k_max; ++k) {
      const double r = curves[i][static_cast<std::size_t>(k)];
      egorov.add_row({hash, N, sc.observable, std::int64_t{k}, r});
      if (first > sc.k_max && r > sc.threshold) first = k;
    }
    if (curves[i][0] > 1e-11) out.breaches.push_back(fmt::format("N={}: k=0 residual {:.3e}", N, curves[i][0]));
    const double logN = std::log(static_cast<double>(N));
    breaking.add_row({hash, N, sc.observable, sc.threshold, std::int64_t{first}, std::int64_t{first > sc.k_max ? 1 : 0},
                      logN / (2.0 * A.log_lambda()), cfg.alpha_value() * logN});
    k_star.push_back(first);
    log_n.push_back(logN);
  }
  if (!trends::nondecreasing(k_star)) out.breaches.push_back("breaking step decreases with N");
  if (sizes.size() >= 3) {
    const double fitted = trends::slope(log_n, k_star);
    const double predicted = 1.0 / (2.0 * A.log_lambda());
    if (!(fitted >= predicted / 2.0 && fitted <= 2.0 * predicted)) {
      out.breaches.push_back(fmt::format("breaking-step slope {:.3f} outside [{:.3f}, {:.3f}]", fitted, predicted / 2, 2 * predicted));
    }
  }
  out.tables = {std::move(roundtrip), std::move(egorov), std::move(breaking)};
  return out;
}

CommandResult run_alf(const ExperimentConfig& cfg) {
  const auto A = map_of(cfg);
  const std::string hash = config_hash(cfg);
  const torus::PartitionSpec P(cfg.q_side);
  const alf::Budget budget{cfg.alf.max_chains, cfg.alf.max_entries};

  std::map<std::int64_t, int> depth;
  for (auto N : cfg.alf.N_list) depth[N] = std::max(depth[N], cfg.alf.k_max);
  if (cfg.alf.saturation_k_max > 0) depth[cfg.alf.saturation_N] = std::max(depth[cfg.alf.saturation_N], cfg.alf.saturation_k_max);
  int deepest = 1;
  for (const auto& [N, k] : depth) deepest = std::max(deepest, k);
  const torus::RefinedMeasure classical = torus::refined_measures(A, P, deepest, cfg.lattice);
  const double alpha = cfg.alpha_value();

  CommandResult out;
  out.command = "alf";
  ResultTable table("alf", {"config_hash", "N", "k", "H", "H_rate", "S_classical", "S_classical_rate", "cap",
                            "in_window", "gap", "gap_full", "leakage", "trace_distance", "fannes"});
  std::map<int, std::vector<std::pair<std::int64_t, double>>> gaps;
  for (const auto& [N, k_max] : depth) {
    const auto fam = CoherentFamily::binomial(weyl::WeylContext::for_map(N, A));
    const auto Y = alf::pou_from_partition(fam, P);
    const auto H = alf::alf_curve(fam.context(), Y, k_max, budget);
    const double cap = 2.0 * std::log(static_cast<double>(N));
    for (int k = 1; k <= k_max; ++k) {
      const auto measure = torus::marginal(classical, k);
      const double S = torus::shannon_entropy(measure);
      const double h = H[static_cast<std::size_t>(k - 1)];
      alf::GapReport g;
      bool have_gap = k <= cfg.alf.gap_k_max;
      if (have_gap) g = alf::theorem72_gap(fam, P, k, measure, budget);
      table.add_row({hash, N, std::int64_t{k}, h, h / k, S, S / k, cap,
                     std::int64_t{k <= alpha * std::log(static_cast<double>(N)) ? 1 : 0},
                     have_gap ? g.gap : kNaN, have_gap ? g.gap_full : kNaN, have_gap ? g.leakage : kNaN,
                     have_gap ? g.trace_distance : kNaN, have_gap ? g.fannes : kNaN});
      if (h > cap) out.breaches.push_back(fmt::format("N={}, k={}: H = {:.4f} above 2 log N", N, k, h));
      if (have_gap && std::count(cfg.alf.N_list.begin(), cfg.alf.N_list.end(), N)) gaps[k].emplace_back(N, g.gap);
    }
  }
  const int k_trend = std::min(cfg.alf.gap_k_max, cfg.alf.k_max);
  if (gaps.count(k_trend) && gaps[k_trend].size() >= 2) {
    std::vector<double> series;
    for (const auto& [N, g] : gaps[k_trend]) series.push_back(g);
    if (!trends::strictly_decreasing(series)) out.breaches.push_back(fmt::format("gap at k={} not decreasing in N", k_trend));
  }
  out.tables = {std::move(table)};
  return out;
}

CommandResult run_cnt(const ExperimentConfig& cfg) {
  const auto A = map_of(cfg);
  const std::string hash = config_hash(cfg);
  const torus::PartitionSpec P(cfg.q_side);
  const double alpha = cfg.alpha_value();

  CommandResult out;
  out.command = "cnt";
  const auto rows = cnt::cnt_bracket_curve(A, P, cfg.cnt.k_max, sorted_unique(cfg.cnt.N_list), cfg.lattice, cfg.subsample);
  ResultTable table("cnt", {"config_hash", "N", "k", "lower_rate", "upper_rate", "correction_rate", "width_rate", "in_window"});
  for (const auto& r : rows) {
    table.add_row({hash, r.N, std::int64_t{r.k}, r.lower_rate, r.upper_rate, r.correction_rate, r.upper_rate - r.lower_rate,
                   std::int64_t{r.k <= alpha * std::log(static_cast<double>(r.N)) ? 1 : 0}});
    if (r.lower_rate > r.upper_rate + 1e-9) out.breaches.push_back(fmt::format("N={}, k={}: lower above upper", r.N, r.k));
  }
  if (!cnt::narrows_in_N(rows, 0.02)) out.breaches.push_back("bracket width grows with N");

  const auto full = torus::refined_measures(A, P, cfg.cnt.classical_k, cfg.lattice);
  ResultTable classical("classical", {"config_hash", "k", "lattice", "S", "S_rate", "increment", "log_lambda", "err"});
  double prev = 0.0;
  for (int k = 1; k <= cfg.cnt.classical_k; ++k) {
    const auto m = torus::marginal(full, k);
    const double S = torus::shannon_entropy(m);
    const double err = torus::perimeter_constant(P) * k * std::pow(A.lambda(), k) / static_cast<double>(cfg.lattice);
    classical.add_row({hash, std::int64_t{k}, cfg.lattice, S, S / k, S - prev, A.log_lambda(), err});
    prev = S;
  }
  out.tables = {std::move(table), std::move(classical)};
  return out;
}

void write_outputs(const ExperimentConfig& cfg, const CommandResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::ConfigError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  Json tables = Json::array();
  for (const auto& t : result.tables) {
    t.write_csv(dir / (t.name() + ".csv"));
    tables.push_back({{"name", t.name()}, {"file", t.name() + ".csv"}, {"columns", t.columns()}, {"rows", t.rows().size()}});
  }
  Json manifest;
  manifest["command"] = result.command;
  manifest["config"] = to_json(cfg);
  manifest["config_hash"] = config_hash(cfg);
  manifest["seed"] = cfg.seed;
  manifest["versions"] = {{"catlab", CATLAB_VERSION},
                          {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
                          {"boost", BOOST_LIB_VERSION},
                          {"fmt", FMT_VERSION}};
  manifest["created_utc"] = utc_now();
  manifest["workers"] = worker_count();
  manifest["tables"] = tables;
  manifest["passed"] = result.passed();
  manifest["breaches"] = result.breaches;
  std::ofstream out(dir / (result.command + ".manifest.json"));
  if (!out) throw Error(ErrorCode::ConfigError, fmt::format("cannot write manifest in {}", dir.string()));
  out << manifest.dump(2) << "\n";
}

}  // namespace catlab::experiments
