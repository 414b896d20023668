#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "radstar/diagnostics.hpp"
#include "radstar/errors.hpp"
#include "radstar/evolver.hpp"

namespace radstar {

struct RunResult {
  Trajectory trajectory;
  std::vector<DiagnosticsReport> reports;
  StepStats stats;
};

/// Advance the state to t_end with adaptive CFL steps, emitting snapshots and
/// per-snapshot diagnostics. Snapshots land exactly on the requested times
/// (dt is clamped, never enlarged). Solver failures halt the run and leave a
/// partial trajectory with the error recorded.
inline RunResult run(const EvolveConfig& cfg, const LagrangianGrid& grid,
                     LagrangianState state) {
  cfg.validate();
  RunResult res;
  const CutoffChi chi(grid.R0);

  const auto emit = [&](const LagrangianState& s) {
    res.trajectory.times.push_back(s.t);
    res.trajectory.snapshots.push_back(s);
    DiagnosticsReport rep = make_report(s, grid, cfg.params, chi);
    if (!res.reports.empty()) {
      const DiagnosticsReport& prev = res.reports.back();
      rep.e1_time_integral = prev.e1_time_integral +
                             0.5 * (rep.t - prev.t) * (prev.e1.total() + rep.e1.total());
    }
    res.reports.push_back(std::move(rep));
  };

  try {
    emit(state);
    if (cfg.t_end > 0.0) {
      double next_snap = cfg.snapshot_every > 0.0
                             ? std::min(cfg.snapshot_every, cfg.t_end)
                             : cfg.t_end;
      while (state.t < cfg.t_end * (1.0 - 1e-14)) {
        double dt = stable_dt(state, grid, cfg);
        bool at_snap = false;
        if (state.t + dt >= next_snap * (1.0 - 1e-14)) {
          dt = next_snap - state.t;
          at_snap = true;
        }
        step(state, grid, cfg, dt, &res.stats);
        if (at_snap) {
          state.t = next_snap;  // pin against roundoff drift
          emit(state);
          next_snap = cfg.snapshot_every > 0.0
                          ? std::min(next_snap + cfg.snapshot_every, cfg.t_end)
                          : cfg.t_end;
        }
      }
    }
  } catch (const SolverError& e) {
    res.trajectory.completed = false;
    res.trajectory.error_message = e.what();
  }

  // Ledger residuals over whatever portion of the run completed.
  const LedgerSeries ledger = energy_ledger(res.trajectory, grid, cfg.params);
  for (std::size_t k = 0; k < res.reports.size() && k < ledger.residual.size(); ++k)
    res.reports[k].energy_ledger_residual = ledger.residual[k];
  return res;
}

}  // namespace radstar
