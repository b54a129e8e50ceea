#pragma once

// Stochastic processes on a window: the STIT cell-division process Y_W(t),
// the Poisson hyperplane tessellation PHT(t), iteration, and rescaling.

#include "stit/geometry.hpp"
#include "stit/measure.hpp"
#include "stit/rng.hpp"

#include <cstdint>
#include <vector>

namespace stit {

struct SplitEvent {
  std::int64_t id = -1;
  std::int64_t parent_cell = -1;
  Hyperplane plane;  // plane.id == id
  double birth_time = 0.0;
  Face face;  // c ∩ H at birth
};

enum class TessellationKind { stit, pht, iterated };

const char* to_string(TessellationKind kind);

struct RunSeed {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
};

struct Tessellation {
  TessellationKind kind = TessellationKind::stit;
  ConvexPolytope window;
  double horizon = 0.0;
  DirectionalDistribution q;
  RunSeed seed;
  std::vector<ConvexPolytope> cells;
  std::vector<StreamKey> cell_keys;  // lineage stream of each final cell
  std::vector<SplitEvent> events;    // ascending birth time

  int dim() const { return window.dim(); }
  const SplitEvent& event(std::int64_t id) const;
};

// Event-driven construction: each live cell c born at b dies at
// b + Exp(Λ(<c>)); the earliest death before t splits c by a hyperplane from
// Λ(· | <c>). Cells below 1e-12 of the window volume are frozen (never
// scheduled). Deterministic in (seed, window, Q, t).
Tessellation simulate_stit(const ConvexPolytope& window, const DirectionalDistribution& q, double t, RunSeed seed);

// Lower-level entry: runs in `window` (facet tags preserved) from time
// `start` to `start + duration`, numbering events from `first_event_id`.
Tessellation simulate_stit_from(const ConvexPolytope& window, const DirectionalDistribution& q, double start,
                                double duration, StreamKey key, std::int64_t first_event_id);

// N ~ Poisson(t Λ(<W>)) i.i.d. hyperplanes from Λ(· | <W>), each cutting every
// cell it meets. All birth times are set to t.
Tessellation simulate_pht(const ConvexPolytope& window, const DirectionalDistribution& q, double t, RunSeed seed);

// Y_W(s) with an independent Y_c(t) nested in each of its cells; inner birth
// times are shifted into (s, s + t).
Tessellation iterate(const ConvexPolytope& window, const DirectionalDistribution& q, double s, double t,
                     RunSeed seed);

// Continues every final cell of `state` independently for `duration` more
// time units with fresh lifetimes (the Markov restart of the construction).
Tessellation continue_stit(const Tessellation& state, double duration, StreamKey key);

// All coordinates multiplied by r; birth times and horizon unchanged.
Tessellation rescale(const Tessellation& tess, double r);

}  // namespace stit
