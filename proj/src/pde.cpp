#include "pngsfp/pde.hpp"

#include <algorithm>
#include <cmath>

#include "pngsfp/csv.hpp"

namespace pngsfp {

namespace {

double trapezoid(const std::vector<double>& f, double h) {
  double s = 0.5 * (f.front() + f.back());
  for (size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
  return s * h;
}

void require_binary_learning(const PopulationNetworkGame& game) {
  for (const auto& pop : game.populations)
    if (pop.learning() && pop.strategies != 2)
      throw ConfigError("the density solver supports binary-strategy populations only");
}

}  // namespace

double DensityGrid::mass() const { return trapezoid(p, h()); }

DensityGrid density_from_beta(double a, double b, int m) {
  if (!(a > 1.0) || !(b > 1.0))
    throw ConfigError("Beta density needs a, b > 1 so the boundary carries no mass");
  if (m < 50) throw ConfigError("grid resolution must be at least 50");

  DensityGrid grid;
  grid.m = m;
  grid.p.assign(m + 1, 0.0);
  const double lognorm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  for (int k = 1; k < m; ++k) {
    const double x = grid.node(k);
    grid.p[k] = std::exp(lognorm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
  }
  const double mass = grid.mass();
  for (double& v : grid.p) v /= mass;
  return grid;
}

std::pair<double, double> grid_moments(const DensityGrid& grid) {
  const double h = grid.h();
  std::vector<double> xf(grid.p.size());
  for (size_t k = 0; k < grid.p.size(); ++k) xf[k] = grid.node(static_cast<int>(k)) * grid.p[k];
  const double mass = grid.mass();
  const double mean = trapezoid(xf, h) / mass;
  for (size_t k = 0; k < grid.p.size(); ++k) {
    const double d = grid.node(static_cast<int>(k)) - mean;
    xf[k] = d * d * grid.p[k];
  }
  return {mean, std::max(0.0, trapezoid(xf, h) / mass)};
}

MixedStrategy mean_choice_from_density(const PopulationNetworkGame& game, int i,
                                       const PdeState& state, double beta) {
  require_binary_learning(game);
  const auto& pop = game.populations[i];
  if (!pop.learning()) return *pop.fixed;

  // Split neighbors into pinned (fixed utility contribution) and learning
  // (dimensions of the quadrature).
  std::vector<double> u_base(pop.strategies, 0.0);
  struct Dim {
    const Matrix* a;
    const DensityGrid* grid;
  };
  std::vector<Dim> dims;
  for (const auto& nb : game.neighbors(i)) {
    const auto& other = game.populations[nb.pop];
    if (!other.learning()) {
      matvec_acc(*nb.payoff, other.fixed->data(), u_base.data());
    } else {
      if (!state.grids[nb.pop]) throw ConfigError("missing density grid for a learning neighbor");
      dims.push_back({nb.payoff, &*state.grids[nb.pop]});
    }
  }

  MixedStrategy xbar(pop.strategies, 0.0);
  if (dims.empty()) return logit(u_base, beta);

  std::vector<int> idx(dims.size(), 0);
  std::vector<double> u(pop.strategies);
  double wsum = 0.0;
  while (true) {
    u = u_base;
    double w = 1.0;
    for (size_t d = 0; d < dims.size(); ++d) {
      const DensityGrid& g = *dims[d].grid;
      const int k = idx[d];
      const double mu[2] = {g.node(k), 1.0 - g.node(k)};
      matvec_acc(*dims[d].a, mu, u.data());
      double wd = g.p[k] * g.h();
      if (k == 0 || k == g.m) wd *= 0.5;  // trapezoid end weights
      w *= wd;
    }
    if (w != 0.0) {
      const MixedStrategy f = logit(u, beta);
      for (int s = 0; s < pop.strategies; ++s) xbar[s] += w * f[s];
      wsum += w;
    }
    size_t d = 0;
    for (; d < dims.size(); ++d) {
      if (++idx[d] <= dims[d].grid->m) break;
      idx[d] = 0;
    }
    if (d == dims.size()) break;
  }
  // Normalize by the discrete total mass so xbar is exactly on the simplex.
  for (double& v : xbar) v /= wsum;
  return xbar;
}

namespace {

// Upwind flux update for one grid given its mean choice coordinate.
void advect(DensityGrid& grid, double xbar_first, double t, double dt, const SfpParams& params,
            bool check_cfl) {
  const int m = grid.m;
  const double h = grid.h();
  const double scale = 1.0 / (params.lambda + t + 1.0);

  if (check_cfl) {
    double vmax = 0.0;
    for (int k = 0; k <= m; ++k)
      vmax = std::max(vmax, std::abs((xbar_first - grid.node(k)) * scale));
    if (dt * vmax / h > 0.9 * (1.0 + 1e-9))
      throw NumericError("CFL violation: dt |v| / h = " + std::to_string(dt * vmax / h));
  }

  // Face fluxes F[k] between nodes k and k+1; boundary fluxes forced to 0.
  std::vector<double> flux(m, 0.0);
  for (int k = 0; k < m; ++k) {
    const double face_mu = (grid.node(k) + grid.node(k + 1)) * 0.5;
    const double v = (xbar_first - face_mu) * scale;
    flux[k] = v * (v >= 0.0 ? grid.p[k] : grid.p[k + 1]);
  }
  std::vector<double>& p = grid.p;
  for (int k = 0; k <= m; ++k) {
    const double fin = k > 0 ? flux[k - 1] : 0.0;
    const double fout = k < m ? flux[k] : 0.0;
    p[k] -= dt / h * (fout - fin);
  }
}

}  // namespace

PdeState pde_step(const PdeState& state, const PopulationNetworkGame& game, double t, double dt,
                  const SfpParams& params) {
  require_binary_learning(game);
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");

  // The velocity field is nonlocal: all mean choices come from the pre-step
  // grids.
  std::vector<double> xbar_first(game.num_populations(), 0.0);
  for (int i = 0; i < game.num_populations(); ++i)
    if (game.populations[i].learning())
      xbar_first[i] = mean_choice_from_density(game, i, state, params.beta)[0];

  PdeState next = state;
  for (int i = 0; i < game.num_populations(); ++i)
    if (next.grids[i]) advect(*next.grids[i], xbar_first[i], t, dt, params, /*check_cfl=*/true);
  return next;
}

PdeState pde_state_from_beta(const PopulationNetworkGame& game, double a, double b, int m) {
  require_binary_learning(game);
  PdeState st;
  st.grids.resize(game.num_populations());
  for (int i = 0; i < game.num_populations(); ++i)
    if (game.populations[i].learning()) st.grids[i] = density_from_beta(a, b, m);
  return st;
}

PdeRun run_pde(const PopulationNetworkGame& game, PdeState initial, double t_end,
               const SfpParams& params, const std::vector<double>& snapshot_times) {
  require_binary_learning(game);
  params.validate();

  std::vector<double> marks = snapshot_times;
  std::sort(marks.begin(), marks.end());
  if (marks.empty() || marks.back() < t_end) marks.push_back(t_end);

  PdeRun run;
  PdeState state = std::move(initial);
  double t = 0.0;
  size_t next_mark = 0;

  auto record = [&](double when) {
    run.times.push_back(when);
    run.snapshots.push_back(state);
    std::vector<std::optional<PdeMoments>> mom(game.num_populations());
    for (int i = 0; i < game.num_populations(); ++i)
      if (state.grids[i]) {
        auto [mean, var] = grid_moments(*state.grids[i]);
        mom[i] = PdeMoments{mean, var};
        run.max_mass_drift = std::max(run.max_mass_drift, std::abs(state.grids[i]->mass() - 1.0));
      }
    run.moments.push_back(std::move(mom));
  };

  if (!marks.empty() && marks.front() == 0.0) {
    record(0.0);
    ++next_mark;
  }

  while (t < t_end - 1e-12) {
    // dt from the CFL bound across every grid, based on pre-step velocities.
    std::vector<double> xbar_first(game.num_populations(), 0.0);
    double vmax = 0.0;
    for (int i = 0; i < game.num_populations(); ++i)
      if (state.grids[i]) {
        xbar_first[i] = mean_choice_from_density(game, i, state, params.beta)[0];
        const double scale = 1.0 / (params.lambda + t + 1.0);
        const DensityGrid& g = *state.grids[i];
        for (int k = 0; k <= g.m; ++k)
          vmax = std::max(vmax, std::abs((xbar_first[i] - g.node(k)) * scale) / g.h());
      }
    double dt = vmax > 0.0 ? 0.9 / vmax : (t_end - t);
    while (next_mark < marks.size() && marks[next_mark] <= t + 1e-12) ++next_mark;
    const double stop = next_mark < marks.size() ? marks[next_mark] : t_end;
    dt = std::min(dt, stop - t);

    for (int i = 0; i < game.num_populations(); ++i)
      if (state.grids[i]) {
        advect(*state.grids[i], xbar_first[i], t, dt, params, /*check_cfl=*/false);
        run.max_mass_drift =
            std::max(run.max_mass_drift, std::abs(state.grids[i]->mass() - 1.0));
      }
    t += dt;
    if (next_mark < marks.size() && t >= marks[next_mark] - 1e-12) {
      record(marks[next_mark]);
      ++next_mark;
    }
  }
  return run;
}

std::string density_csv(const PopulationNetworkGame& game, const PdeRun& run) {
  CsvWriter csv;
  csv.field("t");
  csv.field("mu");
  std::vector<int> learning;
  for (int i = 0; i < game.num_populations(); ++i)
    if (game.populations[i].learning()) {
      learning.push_back(i);
      csv.field("pop" + game.populations[i].id + "_density");
    }
  csv.endrow();
  for (size_t snap = 0; snap < run.times.size(); ++snap) {
    if (learning.empty()) break;
    const DensityGrid& first = *run.snapshots[snap].grids[learning.front()];
    for (int k = 0; k <= first.m; ++k) {
      csv.number(run.times[snap]);
      csv.number(first.node(k));
      for (int i : learning) csv.number(run.snapshots[snap].grids[i]->p[k]);
      csv.endrow();
    }
  }
  return csv.str();
}

}  // namespace pngsfp
