#pragma once

// Runs a trace against one structure, tracking working-set numbers and the
// unified bound alongside, checking cost bounds per operation and structural
// invariants at a fixed interval.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lws/constants.hpp"
#include "lws/lws_tree.hpp"
#include "lws/rb_baseline.hpp"
#include "lws/skip_splay.hpp"
#include "lws/validate.hpp"
#include "lws/workload.hpp"
#include "lws/ws_reference.hpp"

namespace lws {

enum class Structure : std::uint8_t { lws, ws_reference, skip_splay, skip_splay_doubled, redblack_baseline };

inline const char* structure_name(Structure s) noexcept {
  switch (s) {
    case Structure::lws: return "lws";
    case Structure::ws_reference: return "ws_reference";
    case Structure::skip_splay: return "skip_splay";
    case Structure::skip_splay_doubled: return "skip_splay_doubled";
    case Structure::redblack_baseline: return "redblack_baseline";
  }
  return "?";
}

inline Structure parse_structure(std::string_view s) {
  for (Structure x : {Structure::lws, Structure::ws_reference, Structure::skip_splay, Structure::skip_splay_doubled,
                      Structure::redblack_baseline}) {
    if (s == structure_name(x)) return x;
  }
  throw std::invalid_argument("unknown structure '" + std::string(s) + "'");
}

/// The layered tree and the reference structure disagree.
struct DivergenceError : std::runtime_error {
  DivergenceError(std::size_t op, int layer, const std::string& what)
      : std::runtime_error("op " + std::to_string(op) + ", layer " + std::to_string(layer) + ": " + what),
        op(op),
        layer(layer) {}
  std::size_t op;
  int layer;
};

/// The trace cannot run on the chosen structure.
struct IncompatibleTrace : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  Structure structure = Structure::lws;
  std::uint64_t verify_every = 1;
  int skip_k = 0;  // skip-splay size parameter, required for skip_splay*
  bool keep_rows = true;
};

struct CostRow {
  std::size_t i = 0;
  OpKind op = OpKind::search;
  Key key = 0;
  std::uint64_t cost = 0;
  int layer = 0;  // layer found; for skip-splay the number of auxiliary trees searched
  std::optional<std::uint64_t> w;
  std::optional<double> ub;
  std::optional<double> bound;
};

struct RunSummary {
  std::size_t ops = 0;
  std::uint64_t max_cost = 0;
  double mean_cost = 0;
  double max_cost_over_lgw = 0;
  double max_update_over_lgn = 0;
  double amortized_ratio = 0;
  std::size_t violations = 0;
  std::size_t bound_violations = 0;
  std::size_t checks = 0;
  std::vector<std::string> messages;
  std::vector<std::vector<Key>> final_layers;
  std::vector<CostRow> rows;

  [[nodiscard]] bool ok() const noexcept { return violations == 0; }
};

inline double lglg(double n) { return std::log2(std::log2(n + 2.0)); }

inline void write_csv(std::ostream& os, const std::vector<CostRow>& rows) {
  os << "i,op,key,cost,layer,w,ub,bound\n";
  for (const auto& r : rows) {
    os << r.i << ',' << op_letter(r.op) << ',' << r.key << ',' << r.cost << ',' << r.layer << ',';
    if (r.w) os << *r.w;
    os << ',';
    if (r.ub) os << *r.ub;
    os << ',';
    if (r.bound) os << *r.bound;
    os << '\n';
  }
}

inline nlohmann::json summary_json(const RunSummary& s) {
  nlohmann::json j;
  j["ops"] = s.ops;
  j["max_cost"] = s.max_cost;
  j["mean_cost"] = s.mean_cost;
  j["max_cost_over_lgw"] = s.max_cost_over_lgw;
  j["amortized_ratio"] = s.amortized_ratio;
  j["violations"] = s.violations;
  j["max_update_over_lgn"] = s.max_update_over_lgn;
  j["bound_violations"] = s.bound_violations;
  j["invariant_checks"] = s.checks;
  j["messages"] = s.messages;
  if (!s.final_layers.empty()) j["final_layers"] = s.final_layers;
  return j;
}

/// Skip-splay parameter k with n = 2^(2^(k-1)) - 1, or 0 if n has no such form.
inline int skip_k_for(std::uint64_t n) {
  for (int k = 2; k <= 5; ++k)
    if (n == (std::uint64_t{1} << (1 << (k - 1))) - 1) return k;
  return 0;
}

class Runner {
 public:
  Runner(RunConfig cfg, Constants constants) : cfg_(cfg), c_(constants) {
    if (cfg_.verify_every == 0) throw std::invalid_argument("verify interval must be at least 1");
    if (is_skip()) {
      if (cfg_.skip_k < 2 || cfg_.skip_k > 5) throw std::invalid_argument("skip-splay needs k in 2..5");
      skip_.emplace(cfg_.skip_k);
      for (Key x = 1; x <= skip_->n(); ++x) ub_.record_access(x);
    }
  }

  RunSummary run(const Trace& trace) {
    if (is_skip()) {
      for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace[i].kind != OpKind::search) {
          throw IncompatibleTrace("op " + std::to_string(i) + ": skip-splay supports searches only, got '" +
                                  std::string(1, op_letter(trace[i].kind)) + "'");
        }
        if (trace[i].key < 1 || trace[i].key > skip_->n()) {
          throw IncompatibleTrace("op " + std::to_string(i) + ": key " + std::to_string(trace[i].key) +
                                  " outside 1.." + std::to_string(skip_->n()));
        }
      }
    }
    RunSummary s;
    double cost_sum = 0;
    double amort_num = 0;
    double amort_den = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      CostRow row = step(i, trace[i]);
      ++s.ops;
      s.max_cost = std::max(s.max_cost, row.cost);
      cost_sum += static_cast<double>(row.cost);
      if (row.op == OpKind::search && row.w && row.layer > 0) {
        s.max_cost_over_lgw = std::max(s.max_cost_over_lgw, static_cast<double>(row.cost) / lg(static_cast<double>(*row.w)));
      }
      if (row.op != OpKind::search) {
        s.max_update_over_lgn = std::max(s.max_update_over_lgn, static_cast<double>(row.cost) / std::log2(static_cast<double>(size_for_bound_) + 2.0));
      }
      if (row.ub) {
        amort_num += static_cast<double>(row.cost);
        amort_den += *row.ub + lglg(static_cast<double>(universe())) + 1.0;
      }
      if (row.bound && static_cast<double>(row.cost) > *row.bound + 1e-9) {
        ++s.bound_violations;
        if (s.messages.size() < 20) {
          s.messages.push_back("op " + std::to_string(i) + " (" + op_letter(row.op) + " " + std::to_string(row.key) +
                               "): cost " + std::to_string(row.cost) + " exceeds bound " + std::to_string(*row.bound));
        }
      }
      if (cfg_.keep_rows) s.rows.push_back(row);
      if ((i + 1) % cfg_.verify_every == 0 || i + 1 == trace.size()) {
        if (!checkpoint(i, s)) break;
      }
    }
    s.mean_cost = s.ops ? cost_sum / static_cast<double>(s.ops) : 0;
    s.amortized_ratio = amort_den > 0 ? amort_num / amort_den : 0;
    s.violations += s.bound_violations;
    if (cfg_.structure == Structure::lws) s.final_layers = lws_.layer_orders_unmetered();
    if (cfg_.structure == Structure::ws_reference) s.final_layers = ref_.orders();
    return s;
  }

  [[nodiscard]] const LayeredTree& layered() const noexcept { return lws_; }
  [[nodiscard]] const ReferenceStructure& reference() const noexcept { return ref_; }

 private:
  [[nodiscard]] bool is_skip() const noexcept {
    return cfg_.structure == Structure::skip_splay || cfg_.structure == Structure::skip_splay_doubled;
  }

  [[nodiscard]] std::uint64_t universe() const {
    return is_skip() ? static_cast<std::uint64_t>(skip_->n()) : std::max<std::uint64_t>(size_for_bound_, 1);
  }

  CostRow step(std::size_t i, const TraceOp& op) {
    CostRow row;
    row.i = i;
    row.op = op.kind;
    row.key = op.key;
    const bool present = ub_.contains(op.key);
    if (present) {
      row.w = ub_.working_set_number(op.key);
      if (op.kind == OpKind::search) row.ub = ub_.unified_bound(op.key);
    }
    const std::size_t size_before = ub_.size();

    switch (cfg_.structure) {
      case Structure::lws: run_lws(i, op, row); break;
      case Structure::ws_reference: run_reference(op, row); break;
      case Structure::redblack_baseline: run_rb(op, row); break;
      case Structure::skip_splay:
      case Structure::skip_splay_doubled: run_skip(op, row); break;
    }

    switch (op.kind) {
      case OpKind::insert: ub_.record_access(op.key); break;
      case OpKind::erase: ub_.erase(op.key); break;
      case OpKind::search:
        if (present) ub_.record_access(op.key);
        break;
    }
    size_for_bound_ = std::max(size_before, ub_.size());
    row.bound = bound_for(row, present);
    if (!present && op.kind == OpKind::search) row.w.reset();
    return row;
  }

  std::optional<double> bound_for(const CostRow& row, bool present) const {
    const double lgn = std::log2(static_cast<double>(universe()) + 2.0);
    switch (cfg_.structure) {
      case Structure::lws:
        if (row.op == OpKind::search && present) return c_.c1 * lg(static_cast<double>(*row.w));
        return c_.c2 * lgn;
      case Structure::skip_splay:
        return c_.c3 * lgn;
      case Structure::skip_splay_doubled: {
        const double worst = 2 * c_.c3 * lgn;
        const double ws = c_.c3p * (lglg(static_cast<double>(universe())) + 1) * lg(static_cast<double>(*row.w)) + c_.c3pp;
        return std::min(worst, ws);
      }
      default:
        return std::nullopt;
    }
  }

  void run_lws(std::size_t i, const TraceOp& op, CostRow& row) {
    const std::uint64_t before = lws_.engine().visits();
    switch (op.kind) {
      case OpKind::search: {
        const int want = ref_.search(op.key);
        const bool hit = lws_.search(op.key);
        row.layer = lws_.last_layer_found();
        if (hit != (want != 0) || row.layer != want) {
          throw DivergenceError(i, want, "search for " + std::to_string(op.key) + " found layer " +
                                             std::to_string(row.layer) + ", reference has " + std::to_string(want));
        }
        break;
      }
      case OpKind::insert:
        ref_.insert(op.key);
        lws_.insert(op.key);
        break;
      case OpKind::erase:
        row.layer = ref_.level_of(op.key);
        ref_.erase(op.key);
        lws_.erase(op.key);
        break;
    }
    row.cost = lws_.engine().visits() - before;
  }

  void run_reference(const TraceOp& op, CostRow& row) {
    switch (op.kind) {
      case OpKind::search: row.layer = ref_.search(op.key); break;
      case OpKind::insert: ref_.insert(op.key); break;
      case OpKind::erase:
        row.layer = ref_.level_of(op.key);
        ref_.erase(op.key);
        break;
    }
  }

  void run_rb(const TraceOp& op, CostRow& row) {
    const std::uint64_t before = rb_.engine().visits();
    switch (op.kind) {
      case OpKind::search: row.layer = rb_.search(op.key) ? 1 : 0; break;
      case OpKind::insert: rb_.insert(op.key); break;
      case OpKind::erase: rb_.erase(op.key); break;
    }
    row.cost = rb_.engine().visits() - before;
  }

  void run_skip(const TraceOp& op, CostRow& row) {
    // Auxiliary trees searched: the key's band (heights up to 2^i) and every
    // band above it.
    const auto h = static_cast<unsigned>(SkipSplayTree::height_of(op.key));
    row.layer = cfg_.skip_k - static_cast<int>(std::bit_width(h - 1));
    row.cost = cfg_.structure == Structure::skip_splay_doubled ? skip_->access_doubled(op.key) : skip_->access(op.key);
  }

  bool checkpoint(std::size_t i, RunSummary& s) {
    VerifyReport rep;
    switch (cfg_.structure) {
      case Structure::lws: {
        rep = verify(lws_);
        auto have = lws_.layer_orders_unmetered();
        auto want = ref_.orders();
        if (have != want) {
          std::size_t j = 0;
          while (j < have.size() && j < want.size() && have[j] == want[j]) ++j;
          throw DivergenceError(i, static_cast<int>(j + 1), "layer contents or recency order differ from the reference");
        }
        break;
      }
      case Structure::redblack_baseline: rep = verify_bst(rb_.engine()); break;
      case Structure::skip_splay:
      case Structure::skip_splay_doubled: rep = skip_->verify(); break;
      case Structure::ws_reference: break;
    }
    s.checks += rep.checks;
    if (rep.ok()) return true;
    s.violations += rep.violations.size();
    s.messages.push_back("op " + std::to_string(i) + ": invariant check failed\n" + rep.to_string());
    return false;
  }

  RunConfig cfg_;
  Constants c_;
  LayeredTree lws_;
  ReferenceStructure ref_;
  RedBlackTree rb_;
  std::optional<SkipSplayTree> skip_;
  UnifiedBoundTracker ub_;
  std::size_t size_for_bound_ = 0;
};

}  // namespace lws
