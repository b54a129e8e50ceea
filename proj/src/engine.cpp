#include "stit/engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

namespace stit {

const char* to_string(TessellationKind kind) {
  switch (kind) {
    case TessellationKind::stit: return "stit";
    case TessellationKind::pht: return "pht";
    case TessellationKind::iterated: return "iterated";
  }
  return "unknown";
}

const SplitEvent& Tessellation::event(std::int64_t id) const {
  // ids are dense within a tessellation but iteration may interleave them
  if (id >= 0 && static_cast<std::size_t>(id) < events.size() && events[id].id == id) return events[id];
  for (const auto& e : events)
    if (e.id == id) return e;
  throw std::out_of_range("unknown event id " + std::to_string(id));
}

namespace {

constexpr double kFrozenFraction = 1e-12;

struct LiveCell {
  ConvexPolytope body;
  double birth;
  StreamKey key;
  Stream stream;
  bool split = false;
};

void check_time(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument(std::string(what) + " must be a finite nonnegative time");
}

}  // namespace

Tessellation simulate_stit_from(const ConvexPolytope& window, const DirectionalDistribution& q, double start,
                                double duration, StreamKey key, std::int64_t first_event_id) {
  check_time(duration, "horizon");
  if (window.empty()) throw GeometryError("empty body");
  if (window.dim() != q.dim()) throw std::invalid_argument("window and direction distribution dimensions differ");

  const double end = start + duration;
  const double frozen_volume = kFrozenFraction * window.volume();

  Tessellation out;
  out.window = window;
  out.horizon = end;
  out.q = q;

  std::vector<LiveCell> cells;
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

  auto spawn = [&](ConvexPolytope body, double birth, StreamKey k) {
    cells.push_back({std::move(body), birth, k, Stream(k)});
    LiveCell& c = cells.back();
    if (c.body.volume() < frozen_volume) return;
    const double death = birth + c.stream.exponential(lambda_of_body(q, c.body));
    if (death < end) queue.push({death, cells.size() - 1});
  };

  spawn(window, start, key);
  std::int64_t next_id = first_event_id;
  while (!queue.empty()) {
    const auto [death, index] = queue.top();
    queue.pop();
    Hyperplane h = sample_hitting_hyperplane(q, cells[index].body, cells[index].stream);
    h.id = next_id++;
    h.birth_time = death;
    ClipResult parts = clip(cells[index].body, h);
    cells[index].split = true;
    out.events.push_back({h.id, static_cast<std::int64_t>(index), h, death, std::move(parts.face)});
    const StreamKey parent = cells[index].key;
    spawn(std::move(parts.positive), death, parent.child(0));
    spawn(std::move(parts.negative), death, parent.child(1));
  }

  for (auto& c : cells) {
    if (c.split) continue;
    out.cells.push_back(std::move(c.body));
    out.cell_keys.push_back(c.key);
  }
  return out;
}

Tessellation simulate_stit(const ConvexPolytope& window, const DirectionalDistribution& q, double t, RunSeed seed) {
  Tessellation out = simulate_stit_from(window, q, 0.0, t, StreamKey::root(seed.seed, seed.replicate), 0);
  out.seed = seed;
  return out;
}

Tessellation simulate_pht(const ConvexPolytope& window, const DirectionalDistribution& q, double t, RunSeed seed) {
  check_time(t, "horizon");
  if (window.dim() != q.dim()) throw std::invalid_argument("window and direction distribution dimensions differ");
  const StreamKey key = StreamKey::root(seed.seed, seed.replicate);
  Stream rng(key);

  Tessellation out;
  out.kind = TessellationKind::pht;
  out.window = window;
  out.horizon = t;
  out.q = q;
  out.seed = seed;
  out.cells.push_back(window);

  const std::uint64_t count = t > 0.0 ? rng.poisson(t * lambda_of_body(q, window)) : 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    Hyperplane h = sample_hitting_hyperplane(q, window, rng);
    h.id = static_cast<std::int64_t>(i);
    h.birth_time = t;
    Face face = clip(window, h).face;
    std::vector<ConvexPolytope> next;
    next.reserve(out.cells.size() + 8);
    std::int64_t parent = -1;
    for (std::size_t c = 0; c < out.cells.size(); ++c) {
      if (!splits(out.cells[c], h)) {
        next.push_back(std::move(out.cells[c]));
        continue;
      }
      if (parent < 0) parent = static_cast<std::int64_t>(c);
      ClipResult parts = clip(out.cells[c], h);
      next.push_back(std::move(parts.positive));
      next.push_back(std::move(parts.negative));
    }
    out.cells = std::move(next);
    out.events.push_back({h.id, parent, h, t, std::move(face)});
  }
  for (std::size_t c = 0; c < out.cells.size(); ++c) out.cell_keys.push_back(key.child(c));
  return out;
}

Tessellation continue_stit(const Tessellation& state, double duration, StreamKey key) {
  check_time(duration, "duration");
  Tessellation out;
  out.kind = TessellationKind::iterated;
  out.window = state.window;
  out.horizon = state.horizon + duration;
  out.q = state.q;
  out.seed = state.seed;
  out.events = state.events;

  std::int64_t next_id = 0;
  for (const auto& e : state.events) next_id = std::max(next_id, e.id + 1);

  for (std::size_t c = 0; c < state.cells.size(); ++c) {
    const StreamKey inner_key = StreamKey::from_value(state.cell_keys[c].value() ^ key.value()).child(c);
    Tessellation inner = simulate_stit_from(state.cells[c], state.q, state.horizon, duration, inner_key, next_id);
    next_id += static_cast<std::int64_t>(inner.events.size());
    for (auto& e : inner.events) {
      e.parent_cell = -1;
      out.events.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < inner.cells.size(); ++i) {
      out.cells.push_back(std::move(inner.cells[i]));
      out.cell_keys.push_back(inner.cell_keys[i]);
    }
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const SplitEvent& a, const SplitEvent& b) { return a.birth_time < b.birth_time; });
  return out;
}

Tessellation iterate(const ConvexPolytope& window, const DirectionalDistribution& q, double s, double t,
                     RunSeed seed) {
  const StreamKey root = StreamKey::root(seed.seed, seed.replicate);
  Tessellation outer = simulate_stit_from(window, q, 0.0, s, root.child(0x0ddba11), 0);
  outer.seed = seed;
  return continue_stit(outer, t, root.child(0x1ce));
}

Tessellation rescale(const Tessellation& tess, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("scale factor must be positive");
  Tessellation out;
  out.kind = tess.kind;
  out.window = tess.window.scaled(r);
  out.horizon = tess.horizon;
  out.q = tess.q;
  out.seed = tess.seed;
  out.cell_keys = tess.cell_keys;
  out.cells.reserve(tess.cells.size());
  for (const auto& c : tess.cells) out.cells.push_back(c.scaled(r));
  out.events.reserve(tess.events.size());
  for (const auto& e : tess.events) {
    SplitEvent scaled = e;
    scaled.plane.offset *= r;
    scaled.face = e.face.scaled(r);
    out.events.push_back(std::move(scaled));
  }
  return out;
}

}  // namespace stit
