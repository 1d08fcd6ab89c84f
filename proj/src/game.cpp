#include "pngsfp/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pngsfp {

bool is_on_simplex(const std::vector<double>& x, double tol) {
  if (x.empty()) return false;
  double sum = 0.0;
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

void check_simplex(const std::vector<double>& x, const std::string& what) {
  if (!is_on_simplex(x, kSimplexTol))
    throw ConfigError(what + ": not a probability vector (entries >= 0, sum = 1 within 1e-12)");
}

int PopulationNetworkGame::index_of(const std::string& id) const {
  for (int i = 0; i < num_populations(); ++i)
    if (populations[i].id == id) return i;
  throw ConfigError("unknown population id '" + id + "'");
}

PopulationNetworkGame make_game(std::vector<Population> populations, std::vector<Edge> edges,
                                std::vector<double> weights) {
  PopulationNetworkGame g;
  g.populations = std::move(populations);
  g.edges = std::move(edges);
  g.weights = std::move(weights);

  const int n = g.num_populations();
  if (n == 0) throw ConfigError("game has no populations");
  std::set<std::string> ids;
  for (const auto& p : g.populations) {
    if (p.strategies < 1) throw ConfigError("population '" + p.id + "' needs >= 1 strategy");
    if (!ids.insert(p.id).second) throw ConfigError("duplicate population id '" + p.id + "'");
    if (p.fixed) {
      if (static_cast<int>(p.fixed->size()) != p.strategies)
        throw ConfigError("fixed strategy length mismatch for population '" + p.id + "'");
      check_simplex(*p.fixed, "fixed strategy of population '" + p.id + "'");
    }
  }
  if (static_cast<int>(g.weights.size()) != n) throw ConfigError("need one weight per population");
  for (double w : g.weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("weights must be positive and finite");

  std::set<std::pair<int, int>> seen;
  for (const auto& e : g.edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
      throw ConfigError("edge references unknown population");
    if (e.from == e.to) throw ConfigError("self-edges are not allowed");
    auto key = std::minmax(e.from, e.to);
    if (!seen.insert(key).second) throw ConfigError("duplicate edge between populations");
    if (e.payoff_from_to.rows != g.strategies(e.from) || e.payoff_from_to.cols != g.strategies(e.to))
      throw ConfigError("payoff_from_to shape mismatch");
    if (e.payoff_to_from.rows != g.strategies(e.to) || e.payoff_to_from.cols != g.strategies(e.from))
      throw ConfigError("payoff_to_from shape mismatch");
    for (double v : e.payoff_from_to.a)
      if (!std::isfinite(v)) throw ConfigError("non-finite payoff entry");
    for (double v : e.payoff_to_from.a)
      if (!std::isfinite(v)) throw ConfigError("non-finite payoff entry");
  }

  g.adjacency.assign(n, {});
  for (const auto& e : g.edges) {
    g.adjacency[e.from].push_back({e.to, &e.payoff_from_to});
    g.adjacency[e.to].push_back({e.from, &e.payoff_to_from});
  }
  return g;
}

double expected_payoff(const PopulationNetworkGame& game, int i,
                       const std::vector<MixedStrategy>& profile) {
  if (i < 0 || i >= game.num_populations()) throw ConfigError("unknown population index");
  if (static_cast<int>(profile.size()) != game.num_populations())
    throw ConfigError("profile must cover all populations");
  for (int p = 0; p < game.num_populations(); ++p)
    if (static_cast<int>(profile[p].size()) != game.strategies(p))
      throw ConfigError("profile strategy count mismatch");

  double total = 0.0;
  for (const auto& nb : game.neighbors(i)) {
    const Matrix& a = *nb.payoff;
    double s = 0.0;
    for (int r = 0; r < a.rows; ++r) {
      double row = 0.0;
      for (int c = 0; c < a.cols; ++c) row += a(r, c) * profile[nb.pop][c];
      s += profile[i][r] * row;
    }
    total += s;
  }
  return total;
}

ZeroSumReport is_weighted_zero_sum(const PopulationNetworkGame& game,
                                   const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != game.num_populations())
    throw ConfigError("need one weight per population");
  for (double w : weights)
    if (!(w > 0.0)) throw ConfigError("weights must be positive");

  const int n = game.num_populations();
  double count = 1.0;
  for (int i = 0; i < n; ++i) {
    count *= game.strategies(i);
    if (count > double(1 << 20)) throw ConfigError("pure-profile enumeration exceeds 2^20");
  }

  std::vector<int> s(n, 0);
  double worst = 0.0;
  while (true) {
    double value = 0.0;
    for (const auto& e : game.edges) {
      value += weights[e.from] * e.payoff_from_to(s[e.from], s[e.to]);
      value += weights[e.to] * e.payoff_to_from(s[e.to], s[e.from]);
    }
    worst = std::max(worst, std::abs(value));
    int k = 0;
    for (; k < n; ++k) {
      if (++s[k] < game.strategies(k)) break;
      s[k] = 0;
    }
    if (k == n) break;
  }
  return {worst <= 1e-9, worst};
}

bool is_coordination(const PopulationNetworkGame& game) {
  for (const auto& e : game.edges) {
    const Matrix at = e.payoff_to_from.transposed();
    const Matrix& a = e.payoff_from_to;
    const int r = a.rows, c = a.cols;
    // Separability test: double-center A_ij - A_ji^T and compare with zero.
    std::vector<double> rowmean(r, 0.0), colmean(c, 0.0);
    double grand = 0.0;
    for (int p = 0; p < r; ++p)
      for (int q = 0; q < c; ++q) {
        const double d = a(p, q) - at(p, q);
        rowmean[p] += d / c;
        colmean[q] += d / r;
        grand += d / (r * c);
      }
    for (int p = 0; p < r; ++p)
      for (int q = 0; q < c; ++q) {
        const double d = a(p, q) - at(p, q);
        if (std::abs(d - rowmean[p] - colmean[q] + grand) > 1e-12) return false;
      }
  }
  return true;
}

namespace {

std::vector<std::vector<int>> components(const PopulationNetworkGame& game) {
  const int n = game.num_populations();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<int> stack{i}, members;
    comp[i] = static_cast<int>(out.size());
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (const auto& nb : game.neighbors(v))
        if (comp[nb.pop] < 0) {
          comp[nb.pop] = comp[i];
          stack.push_back(nb.pop);
        }
    }
    out.push_back(std::move(members));
  }
  return out;
}

}  // namespace

bool is_star_forest(const PopulationNetworkGame& game) {
  for (const auto& comp : components(game)) {
    const int n = static_cast<int>(comp.size());
    int edges_in = 0, max_deg = 0;
    for (int v : comp) {
      int d = static_cast<int>(game.neighbors(v).size());
      edges_in += d;
      max_deg = std::max(max_deg, d);
    }
    edges_in /= 2;
    if (n == 1) continue;  // isolated vertex
    if (edges_in != n - 1 || max_deg != n - 1) return false;
  }
  return true;
}

std::vector<int> star_roots(const PopulationNetworkGame& game) {
  std::vector<int> roots;
  for (const auto& comp : components(game)) {
    int best = comp.front();
    for (int v : comp) {
      const auto dv = game.neighbors(v).size();
      const auto db = game.neighbors(best).size();
      if (dv > db || (dv == db && v < best)) best = v;
    }
    roots.push_back(best);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

PopulationNetworkGame stag_hunt() {
  // Table 1, rows/cols ordered (H, S). Symmetric bimatrix: both populations
  // see the same own x opponent payoff table.
  Matrix a{{1, 2}, {0, 4}};
  std::vector<Population> pops{{"1", 2, std::nullopt}, {"2", 2, std::nullopt}};
  std::vector<Edge> edges{{0, 1, a, a}};
  return make_game(std::move(pops), std::move(edges), {1.0, 1.0});
}

PopulationNetworkGame asymmetric_matching_pennies() {
  // Strategies ordered (H, T); line graph 1-2-3-4-5.
  Matrix match{{1, -1}, {-1, 1}};
  Matrix mismatch{{-1, 1}, {1, -1}};
  std::vector<Population> pops;
  for (int i = 1; i <= 5; ++i) pops.push_back({std::to_string(i), 2, std::nullopt});
  pops[0].fixed = MixedStrategy{1.0, 0.0};  // always H
  pops[4].fixed = MixedStrategy{0.0, 1.0};  // always T
  std::vector<Edge> edges;
  for (int i = 0; i < 4; ++i) edges.push_back({i, i + 1, match, mismatch});
  return make_game(std::move(pops), std::move(edges), {1, 1, 1, 1, 1});
}

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
  Matrix m(static_cast<int>(j.size()), static_cast<int>(j.at(0).size()));
  for (int r = 0; r < m.rows; ++r) {
    const auto& row = j.at(r);
    if (static_cast<int>(row.size()) != m.cols) throw ConfigError("ragged payoff matrix");
    for (int c = 0; c < m.cols; ++c) {
      if (!row.at(c).is_number()) throw ConfigError("payoff entries must be finite numbers");
      m(r, c) = row.at(c).get<double>();
      if (!std::isfinite(m(r, c))) throw ConfigError("payoff entries must be finite");
    }
  }
  return m;
}

}  // namespace

std::string serialize_game(const PopulationNetworkGame& game) {
  json j;
  j["populations"] = json::array();
  for (const auto& p : game.populations) {
    json jp{{"id", p.id}, {"strategies", p.strategies}};
    if (p.fixed) jp["fixed"] = *p.fixed;
    j["populations"].push_back(std::move(jp));
  }
  j["edges"] = json::array();
  for (const auto& e : game.edges) {
    j["edges"].push_back({{"from", game.populations[e.from].id},
                          {"to", game.populations[e.to].id},
                          {"payoff_from_to", matrix_to_json(e.payoff_from_to)},
                          {"payoff_to_from", matrix_to_json(e.payoff_to_from)}});
  }
  j["weights"] = game.weights;
  return j.dump(2);
}

PopulationNetworkGame parse_game(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("game spec is not valid JSON: ") + e.what());
  }
  try {
    std::vector<Population> pops;
    for (const auto& jp : j.at("populations")) {
      Population p;
      p.id = jp.at("id").is_string() ? jp.at("id").get<std::string>()
                                     : std::to_string(jp.at("id").get<long long>());
      p.strategies = jp.at("strategies").get<int>();
      if (jp.contains("fixed")) p.fixed = jp.at("fixed").get<std::vector<double>>();
      pops.push_back(std::move(p));
    }
    auto find = [&](const json& id) -> int {
      std::string s = id.is_string() ? id.get<std::string>() : std::to_string(id.get<long long>());
      for (int i = 0; i < static_cast<int>(pops.size()); ++i)
        if (pops[i].id == s) return i;
      throw ConfigError("edge references unknown population id '" + s + "'");
    };
    std::vector<Edge> edges;
    if (j.contains("edges"))
      for (const auto& je : j.at("edges")) {
        Edge e;
        e.from = find(je.at("from"));
        e.to = find(je.at("to"));
        e.payoff_from_to = matrix_from_json(je.at("payoff_from_to"));
        e.payoff_to_from = matrix_from_json(je.at("payoff_to_from"));
        edges.push_back(std::move(e));
      }
    std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    return make_game(std::move(pops), std::move(edges), std::move(weights));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad game spec: ") + e.what());
  }
}

PopulationNetworkGame load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open game file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_game(ss.str());
}

}  // namespace pngsfp
