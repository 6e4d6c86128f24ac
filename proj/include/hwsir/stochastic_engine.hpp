#ifndef HWSIR_STOCHASTIC_ENGINE_HPP
#define HWSIR_STOCHASTIC_ENGINE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hwsir/fenwick.hpp"
#include "hwsir/infectious_period.hpp"
#include "hwsir/population_graph.hpp"
#include "hwsir/rng.hpp"

namespace hwsir {

struct EpidemicParams {
  double beta_G = 0.0;    // one-to-all global contact rate
  double lambda_H = 0.0;  // one-to-one household rate
  double lambda_W = 0.0;  // one-to-one workplace rate
  InfectiousPeriodLaw nu = InfectiousPeriodLaw::exponential(1.0);
};

enum class Status : std::uint8_t { Susceptible, Infected, Recovered };
enum class EventKind : std::uint8_t { Infection, Recovery };
enum class Channel : std::uint8_t { Global, Household, Workplace, None };

struct Event {
  double t;
  EventKind kind;
  Channel layer;  // None for recoveries
  int individual;
  int household;
  int workplace;
};

// Recovery as a pooled rate-gamma*I channel is exact only for exponential nu;
// the event-queue path is exact for any nu.
enum class EnginePath { EventQueue, MarkovExponential };

struct InfectionRates {
  double global, household, workplace;
  double total() const { return global + household + workplace; }
};

struct ConsistencyReport {
  bool pass = true;
  std::string details;
};

// Structure-type counts of a state snapshot, used for ensemble-based initial
// condition inference. Counts are doubles so replicate averages fit the
// same type.
struct StructureTypeCounts {
  double K = 0, K_H = 0, K_W = 0;
  double S_total = 0, I_total = 0;
  std::map<std::pair<int, int>, double> households;  // (S,I) -> count
  std::map<std::pair<int, int>, double> workplaces;
};

struct TrajectoryPoint {
  double t;
  std::int64_t S, I, R;
  std::int64_t cum_global, cum_household, cum_workplace;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::int64_t K = 0;

  double infected_fraction(std::size_t idx) const {
    return static_cast<double>(points[idx].I) / static_cast<double>(K);
  }
  double susceptible_fraction(std::size_t idx) const {
    return static_cast<double>(points[idx].S) / static_cast<double>(K);
  }
};

class SimulationState {
 public:
  struct ScheduledRecoveryView {
    double time;
    int individual;
  };

  SimulationState(const PopulationGraph& graph, const EpidemicParams& params)
      : graph_(&graph),
        status_(static_cast<std::size_t>(graph.K()), Status::Susceptible),
        recovery_time_(static_cast<std::size_t>(graph.K()),
                       std::numeric_limits<double>::quiet_NaN()),
        s_h_(static_cast<std::size_t>(graph.num_households())),
        i_h_(static_cast<std::size_t>(graph.num_households()), 0),
        s_w_(static_cast<std::size_t>(graph.num_workplaces())),
        i_w_(static_cast<std::size_t>(graph.num_workplaces()), 0),
        fen_h_(static_cast<std::size_t>(graph.num_households())),
        fen_w_(static_cast<std::size_t>(graph.num_workplaces())),
        pos_in_susceptibles_(static_cast<std::size_t>(graph.K())),
        pos_in_infected_(static_cast<std::size_t>(graph.K()), -1) {
    (void)params;
    for (int k = 0; k < graph.num_households(); ++k)
      s_h_[static_cast<std::size_t>(k)] =
          static_cast<int>(graph.household_members(k).size());
    for (int l = 0; l < graph.num_workplaces(); ++l)
      s_w_[static_cast<std::size_t>(l)] =
          static_cast<int>(graph.workplace_members(l).size());
    susceptibles_.resize(static_cast<std::size_t>(graph.K()));
    for (int i = 0; i < graph.K(); ++i) {
      susceptibles_[static_cast<std::size_t>(i)] = i;
      pos_in_susceptibles_[static_cast<std::size_t>(i)] = i;
    }
    S_total_ = graph.K();
  }

  const PopulationGraph& graph() const { return *graph_; }
  double time() const { return t_; }
  void set_time(double t) { t_ = t; }
  std::int64_t S_total() const { return S_total_; }
  std::int64_t I_total() const { return I_total_; }
  std::int64_t R_total() const { return R_total_; }
  std::int64_t cum_global() const { return cum_global_; }
  std::int64_t cum_household() const { return cum_household_; }
  std::int64_t cum_workplace() const { return cum_workplace_; }
  Status status(int ind) const { return status_[static_cast<std::size_t>(ind)]; }
  double recovery_time(int ind) const {
    return recovery_time_[static_cast<std::size_t>(ind)];
  }
  const std::vector<int>& infected() const { return infected_; }
  std::int64_t pair_aggregate_households() const { return fen_h_.total(); }
  std::int64_t pair_aggregate_workplaces() const { return fen_w_.total(); }

  // Infects `ind` at the current clock and schedules its recovery.
  void infect(int ind, Channel channel, RandomStream& rng,
              const EpidemicParams& params) {
    remove_susceptible(ind);
    status_[static_cast<std::size_t>(ind)] = Status::Infected;
    int h = graph_->household_of(ind);
    int w = graph_->workplace_of(ind);
    --s_h_[static_cast<std::size_t>(h)];
    ++i_h_[static_cast<std::size_t>(h)];
    --s_w_[static_cast<std::size_t>(w)];
    ++i_w_[static_cast<std::size_t>(w)];
    refresh_weight(Layer::Household, h);
    refresh_weight(Layer::Workplace, w);
    --S_total_;
    ++I_total_;
    double sigma = params.nu.sample(rng);
    double rec = t_ + sigma;
    recovery_time_[static_cast<std::size_t>(ind)] = rec;
    recovery_queue_.push(ScheduledRecovery{rec, event_seq_++, ind});
    pos_in_infected_[static_cast<std::size_t>(ind)] = static_cast<int>(infected_.size());
    infected_.push_back(ind);
    switch (channel) {
      case Channel::Global: ++cum_global_; break;
      case Channel::Household: ++cum_household_; break;
      case Channel::Workplace: ++cum_workplace_; break;
      case Channel::None: break;  // initial seed
    }
  }

  void recover(int ind) {
    status_[static_cast<std::size_t>(ind)] = Status::Recovered;
    int h = graph_->household_of(ind);
    int w = graph_->workplace_of(ind);
    --i_h_[static_cast<std::size_t>(h)];
    --i_w_[static_cast<std::size_t>(w)];
    refresh_weight(Layer::Household, h);
    refresh_weight(Layer::Workplace, w);
    --I_total_;
    ++R_total_;
    int pos = pos_in_infected_[static_cast<std::size_t>(ind)];
    int last = infected_.back();
    infected_[static_cast<std::size_t>(pos)] = last;
    pos_in_infected_[static_cast<std::size_t>(last)] = pos;
    infected_.pop_back();
    pos_in_infected_[static_cast<std::size_t>(ind)] = -1;
  }

  InfectionRates infection_rates(const EpidemicParams& params) const {
    InfectionRates r;
    r.global = params.beta_G * static_cast<double>(S_total_) *
               static_cast<double>(I_total_) / static_cast<double>(graph_->K());
    r.household = params.lambda_H * static_cast<double>(fen_h_.total());
    r.workplace = params.lambda_W * static_cast<double>(fen_w_.total());
    return r;
  }

  int sample_uniform_susceptible(RandomStream& rng) const {
    std::size_t pick = std::uniform_int_distribution<std::size_t>(
        0, susceptibles_.size() - 1)(rng);
    return susceptibles_[pick];
  }

  int sample_uniform_infected(RandomStream& rng) const {
    std::size_t pick =
        std::uniform_int_distribution<std::size_t>(0, infected_.size() - 1)(rng);
    return infected_[pick];
  }

  // Structure receiving a within-layer infection, chosen with probability
  // s_k * i_k / A_X; then a uniformly chosen susceptible member within it.
  int sample_clique_infection_target(Layer layer, RandomStream& rng) const {
    const FenwickSampler& fen = layer == Layer::Household ? fen_h_ : fen_w_;
    std::int64_t target =
        std::uniform_int_distribution<std::int64_t>(0, fen.total() - 1)(rng);
    int id = static_cast<int>(fen.find(target));
    const std::vector<int>& members = layer == Layer::Household
                                          ? graph_->household_members(id)
                                          : graph_->workplace_members(id);
    int s = layer == Layer::Household ? s_h_[static_cast<std::size_t>(id)]
                                      : s_w_[static_cast<std::size_t>(id)];
    int pick = std::uniform_int_distribution<int>(0, s - 1)(rng);
    for (int m : members) {
      if (status_[static_cast<std::size_t>(m)] == Status::Susceptible) {
        if (pick == 0) return m;
        --pick;
      }
    }
    throw std::logic_error("clique sampler: susceptible count out of sync");
  }

  std::optional<ScheduledRecoveryView> next_scheduled_recovery() {
    purge_queue();
    if (recovery_queue_.empty()) return std::nullopt;
    const auto& top = recovery_queue_.top();
    return ScheduledRecoveryView{top.time, top.individual};
  }

  void pop_scheduled_recovery() { recovery_queue_.pop(); }

  // From-scratch recomputation of every cached aggregate. Integer-exact.
  ConsistencyReport check_consistency() const {
    std::ostringstream diff;
    bool ok = true;
    auto expect = [&](std::int64_t got, std::int64_t want, const char* what) {
      if (got != want) {
        ok = false;
        diff << what << ": cached " << got << " recomputed " << want << "; ";
      }
    };
    std::int64_t s_cnt = 0, i_cnt = 0, r_cnt = 0;
    for (auto st : status_) {
      if (st == Status::Susceptible) ++s_cnt;
      else if (st == Status::Infected) ++i_cnt;
      else ++r_cnt;
    }
    expect(S_total_, s_cnt, "S_total");
    expect(I_total_, i_cnt, "I_total");
    expect(R_total_, r_cnt, "R_total");
    expect(S_total_ + I_total_ + R_total_, graph_->K(), "S+I+R vs K");

    std::int64_t sh_sum = 0, ih_sum = 0, pair_h = 0;
    for (int k = 0; k < graph_->num_households(); ++k) {
      int s = 0, i = 0;
      for (int m : graph_->household_members(k)) {
        if (status_[static_cast<std::size_t>(m)] == Status::Susceptible) ++s;
        else if (status_[static_cast<std::size_t>(m)] == Status::Infected) ++i;
      }
      expect(s_h_[static_cast<std::size_t>(k)], s, "household s cache");
      expect(i_h_[static_cast<std::size_t>(k)], i, "household i cache");
      expect(fen_h_.weight(static_cast<std::size_t>(k)),
             static_cast<std::int64_t>(s) * i, "household pair weight");
      sh_sum += s;
      ih_sum += i;
      pair_h += static_cast<std::int64_t>(s) * i;
    }
    std::int64_t sw_sum = 0, iw_sum = 0, pair_w = 0;
    for (int l = 0; l < graph_->num_workplaces(); ++l) {
      int s = 0, i = 0;
      for (int m : graph_->workplace_members(l)) {
        if (status_[static_cast<std::size_t>(m)] == Status::Susceptible) ++s;
        else if (status_[static_cast<std::size_t>(m)] == Status::Infected) ++i;
      }
      expect(s_w_[static_cast<std::size_t>(l)], s, "workplace s cache");
      expect(i_w_[static_cast<std::size_t>(l)], i, "workplace i cache");
      expect(fen_w_.weight(static_cast<std::size_t>(l)),
             static_cast<std::int64_t>(s) * i, "workplace pair weight");
      sw_sum += s;
      iw_sum += i;
      pair_w += static_cast<std::int64_t>(s) * i;
    }
    expect(sh_sum, S_total_, "household-sum S");
    expect(sw_sum, S_total_, "workplace-sum S");
    expect(ih_sum, I_total_, "household-sum I");
    expect(iw_sum, I_total_, "workplace-sum I");
    expect(fen_h_.total(), pair_h, "A_H");
    expect(fen_w_.total(), pair_w, "A_W");
    return ConsistencyReport{ok, diff.str()};
  }

  StructureTypeCounts structure_type_counts() const {
    StructureTypeCounts c;
    c.K = graph_->K();
    c.K_H = graph_->num_households();
    c.K_W = graph_->num_workplaces();
    c.S_total = static_cast<double>(S_total_);
    c.I_total = static_cast<double>(I_total_);
    for (std::size_t k = 0; k < s_h_.size(); ++k)
      c.households[{s_h_[k], i_h_[k]}] += 1.0;
    for (std::size_t l = 0; l < s_w_.size(); ++l)
      c.workplaces[{s_w_[l], i_w_[l]}] += 1.0;
    return c;
  }

  // Test hook: deliberately corrupts a cached aggregate (negative control for
  // check_consistency).
  void corrupt_aggregate_for_test() { ++S_total_; }

 private:
  struct ScheduledRecovery {
    double time;
    std::uint64_t seq;
    int individual;
    bool operator>(const ScheduledRecovery& o) const {
      if (time != o.time) return time > o.time;
      return seq > o.seq;  // tie-break in insertion order
    }
  };

  void refresh_weight(Layer layer, int id) {
    if (layer == Layer::Household)
      fen_h_.set(static_cast<std::size_t>(id),
                 static_cast<std::int64_t>(s_h_[static_cast<std::size_t>(id)]) *
                     i_h_[static_cast<std::size_t>(id)]);
    else
      fen_w_.set(static_cast<std::size_t>(id),
                 static_cast<std::int64_t>(s_w_[static_cast<std::size_t>(id)]) *
                     i_w_[static_cast<std::size_t>(id)]);
  }

  void remove_susceptible(int ind) {
    int pos = pos_in_susceptibles_[static_cast<std::size_t>(ind)];
    int last = susceptibles_.back();
    susceptibles_[static_cast<std::size_t>(pos)] = last;
    pos_in_susceptibles_[static_cast<std::size_t>(last)] = pos;
    susceptibles_.pop_back();
    pos_in_susceptibles_[static_cast<std::size_t>(ind)] = -1;
  }

  // Entries for individuals already recovered via the Markov path may linger.
  void purge_queue() {
    while (!recovery_queue_.empty() &&
           status_[static_cast<std::size_t>(recovery_queue_.top().individual)] !=
               Status::Infected)
      recovery_queue_.pop();
  }

  const PopulationGraph* graph_;
  double t_ = 0.0;
  std::vector<Status> status_;
  std::vector<double> recovery_time_;
  std::vector<int> s_h_, i_h_, s_w_, i_w_;
  FenwickSampler fen_h_, fen_w_;
  std::vector<int> susceptibles_, pos_in_susceptibles_;
  std::vector<int> infected_, pos_in_infected_;
  std::priority_queue<ScheduledRecovery, std::vector<ScheduledRecovery>,
                      std::greater<ScheduledRecovery>>
      recovery_queue_;
  std::int64_t S_total_ = 0, I_total_ = 0, R_total_ = 0;
  std::int64_t cum_global_ = 0, cum_household_ = 0, cum_workplace_ = 0;
  std::uint64_t event_seq_ = 0;
};

// round(eps*K), ties to even.
inline std::int64_t seed_count(double eps, int K) {
  double x = eps * static_cast<double>(K);
  double r = std::nearbyint(x);  // default rounding mode: to nearest, ties even
  return static_cast<std::int64_t>(r);
}

inline SimulationState init_uniform_seed(const PopulationGraph& graph,
                                         const EpidemicParams& params, double eps,
                                         RandomStream& rng) {
  if (eps < 0.0 || eps > 1.0)
    throw std::invalid_argument("init_uniform_seed: eps must be in [0,1]");
  SimulationState state(graph, params);
  std::int64_t n_seed = seed_count(eps, graph.K());
  for (std::int64_t j = 0; j < n_seed; ++j) {
    int ind = state.sample_uniform_susceptible(rng);
    state.infect(ind, Channel::None, rng, params);
  }
  return state;
}

inline SimulationState init_single_seed(const PopulationGraph& graph,
                                        const EpidemicParams& params,
                                        RandomStream& rng) {
  SimulationState state(graph, params);
  state.infect(state.sample_uniform_susceptible(rng), Channel::None, rng, params);
  return state;
}

enum class StepOutcome { Progressed, ReachedHorizon, Extinct };

// One event of the exact next-event scheme: a pooled-exponential infection
// clock raced against the earliest scheduled recovery. A candidate event
// beyond t_max is discarded and the clock advanced to t_max, which is exact
// since infection rates are piecewise constant between events and recoveries
// are pre-scheduled.
inline StepOutcome step_until(SimulationState& state, const EpidemicParams& params,
                              RandomStream& rng, double t_max, Event* out,
                              EnginePath path = EnginePath::EventQueue) {
  if (state.I_total() == 0) return StepOutcome::Extinct;
  InfectionRates rates = state.infection_rates(params);

  auto pick_infection_target = [&](double u, Channel& channel) -> int {
    if (u < rates.global) {
      channel = Channel::Global;
      return state.sample_uniform_susceptible(rng);
    }
    if (u < rates.global + rates.household) {
      channel = Channel::Household;
      return state.sample_clique_infection_target(Layer::Household, rng);
    }
    channel = Channel::Workplace;
    return state.sample_clique_infection_target(Layer::Workplace, rng);
  };

  if (path == EnginePath::MarkovExponential) {
    if (!params.nu.is_exponential())
      throw std::invalid_argument("Markov fast path requires exponential nu");
    double recovery_rate = params.nu.rate() * static_cast<double>(state.I_total());
    double total = rates.total() + recovery_rate;
    double t_next =
        state.time() + std::exponential_distribution<double>(total)(rng);
    if (t_next > t_max) {
      state.set_time(t_max);
      return StepOutcome::ReachedHorizon;
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    state.set_time(t_next);
    if (u < recovery_rate) {
      int ind = state.sample_uniform_infected(rng);
      state.recover(ind);
      if (out)
        *out = Event{t_next, EventKind::Recovery, Channel::None, ind,
                     state.graph().household_of(ind),
                     state.graph().workplace_of(ind)};
      return StepOutcome::Progressed;
    }
    Channel channel;
    int ind = pick_infection_target(u - recovery_rate, channel);
    state.infect(ind, channel, rng, params);
    if (out)
      *out = Event{t_next, EventKind::Infection, channel, ind,
                   state.graph().household_of(ind), state.graph().workplace_of(ind)};
    return StepOutcome::Progressed;
  }

  double total = rates.total();
  double t_inf = total > 0.0
                     ? state.time() + std::exponential_distribution<double>(total)(rng)
                     : std::numeric_limits<double>::infinity();
  auto next_rec = state.next_scheduled_recovery();
  double t_rec = next_rec ? next_rec->time : std::numeric_limits<double>::infinity();
  if (std::min(t_inf, t_rec) > t_max) {
    state.set_time(t_max);
    return StepOutcome::ReachedHorizon;
  }
  if (t_rec <= t_inf) {
    int ind = next_rec->individual;
    state.pop_scheduled_recovery();
    state.set_time(t_rec);
    state.recover(ind);
    if (out)
      *out = Event{t_rec, EventKind::Recovery, Channel::None, ind,
                   state.graph().household_of(ind), state.graph().workplace_of(ind)};
    return StepOutcome::Progressed;
  }
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  Channel channel;
  int ind = pick_infection_target(u, channel);
  state.set_time(t_inf);
  state.infect(ind, channel, rng, params);
  if (out)
    *out = Event{t_inf, EventKind::Infection, channel, ind,
                 state.graph().household_of(ind), state.graph().workplace_of(ind)};
  return StepOutcome::Progressed;
}

// Unbounded step; nullopt signals extinction.
inline std::optional<Event> step(SimulationState& state, const EpidemicParams& params,
                                 RandomStream& rng,
                                 EnginePath path = EnginePath::EventQueue) {
  Event ev;
  StepOutcome oc = step_until(state, params, rng,
                              std::numeric_limits<double>::infinity(), &ev, path);
  if (oc == StepOutcome::Progressed) return ev;
  return std::nullopt;
}

struct SimulateOptions {
  double sample_dt = 0.5;
  EnginePath path = EnginePath::EventQueue;
  std::vector<Event>* event_log = nullptr;
  // Stop once I/K >= this fraction (snapshot-style runs).
  std::optional<double> stop_infected_fraction;
  // Run check_consistency after every event and throw on failure.
  bool audit_every_event = false;
};

inline TrajectoryPoint sample_point(const SimulationState& s, double t) {
  return TrajectoryPoint{t,           s.S_total(),    s.I_total(),
                         s.R_total(), s.cum_global(), s.cum_household(),
                         s.cum_workplace()};
}

// Advances `state` until clock reaches T, extinction, or the stop fraction,
// recording counts on the grid {t0, t0+dt, ...}. Grid points between events
// carry the pre-event counts (the process is piecewise constant).
inline Trajectory simulate(SimulationState& state, const EpidemicParams& params,
                           double T, RandomStream& rng,
                           const SimulateOptions& opts = {}) {
  if (T < state.time()) throw std::invalid_argument("simulate: T before current clock");
  Trajectory traj;
  traj.K = state.graph().K();
  double next_sample = state.time();
  auto hit_stop = [&]() {
    return opts.stop_infected_fraction &&
           static_cast<double>(state.I_total()) >=
               *opts.stop_infected_fraction * static_cast<double>(state.graph().K());
  };
  if (hit_stop()) {
    traj.points.push_back(sample_point(state, state.time()));
    return traj;
  }
  while (true) {
    TrajectoryPoint before = sample_point(state, state.time());
    Event ev;
    StepOutcome oc = step_until(state, params, rng, T, &ev, opts.path);
    double fill_until = oc == StepOutcome::Progressed
                            ? ev.t
                            : (std::isfinite(T) ? T : state.time());
    while (next_sample < fill_until && next_sample <= T) {
      before.t = next_sample;
      traj.points.push_back(before);
      next_sample += opts.sample_dt;
    }
    if (oc != StepOutcome::Progressed) {
      // Extinct or horizon: counts are frozen from here on.
      if (std::isfinite(T)) {
        while (next_sample <= T) {
          before.t = next_sample;
          traj.points.push_back(before);
          next_sample += opts.sample_dt;
        }
        state.set_time(T);
      } else {
        traj.points.push_back(sample_point(state, state.time()));
      }
      break;
    }
    if (opts.event_log) opts.event_log->push_back(ev);
    if (opts.audit_every_event) {
      auto rep = state.check_consistency();
      if (!rep.pass)
        throw std::logic_error("consistency audit failed: " + rep.details);
    }
    if (next_sample <= T && next_sample == ev.t) {
      traj.points.push_back(sample_point(state, next_sample));
      next_sample += opts.sample_dt;
    }
    if (hit_stop()) {
      traj.points.push_back(sample_point(state, state.time()));
      break;
    }
  }
  return traj;
}

}  // namespace hwsir

#endif
