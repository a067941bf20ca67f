#include "oracles.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

using bcfr::GameRules;
using bcfr::GameSpec;
using bcfr::History;
using bcfr::HistoryStep;
using bcfr::PlayerId;
using bcfr::TypeId;

namespace {

void enumerate_rec(const GameRules& rules, History& h, Enumeration& out)
{
   ++out.histories;
   if(rules.is_terminal(h)) {
      ++out.terminals;
      return;
   }
   const PlayerId p = rules.current_player(h);
   if(! p.is_chance()) {
      ++out.infoset_visits[p][rules.observation(h)];
   }
   for(const auto& a : rules.legal_actions(h)) {
      h.push_back(HistoryStep{p, a.id});
      enumerate_rec(rules, h, out);
      h.pop_back();
   }
}

double value_rec(const GameRules& rules, const Policy& policy, History& h, PlayerId player, TypeId type)
{
   if(rules.is_terminal(h)) {
      return rules.utility(h, player, type);
   }
   const PlayerId p = rules.current_player(h);
   const auto actions = rules.legal_actions(h);
   const auto probs = p.is_chance() ? rules.chance_probabilities(h) : policy(h, p);
   double v = 0.0;
   for(std::size_t k = 0; k < actions.size(); ++k) {
      if(probs[k] == 0.0) {
         continue;
      }
      h.push_back(HistoryStep{p, actions[k].id});
      v += probs[k] * value_rec(rules, policy, h, player, type);
      h.pop_back();
   }
   return v;
}

void cfv_rec(const GameRules& rules,
             const Policy& policy,
             History& h,
             double reach_others,
             const bcfr::InfoSetKey& key,
             TypeId type,
             std::vector< double >& out)
{
   if(rules.is_terminal(h)) {
      return;
   }
   const PlayerId p = rules.current_player(h);
   const auto actions = rules.legal_actions(h);
   if(p == key.player && rules.observation(h) == key.observation) {
      out.resize(actions.size(), 0.0);
      for(std::size_t k = 0; k < actions.size(); ++k) {
         h.push_back(HistoryStep{p, actions[k].id});
         out[k] += reach_others * value_rec(rules, policy, h, key.player, type);
         h.pop_back();
      }
      return;
   }
   const auto probs = p.is_chance() ? rules.chance_probabilities(h) : policy(h, p);
   for(std::size_t k = 0; k < actions.size(); ++k) {
      const double next = p == key.player ? reach_others : reach_others * probs[k];
      h.push_back(HistoryStep{p, actions[k].id});
      cfv_rec(rules, policy, h, next, key, type, out);
      h.pop_back();
   }
}

}  // namespace

Enumeration enumerate(const GameRules& rules)
{
   Enumeration out;
   History h;
   enumerate_rec(rules, h, out);
   return out;
}

double expected_value(const GameRules& rules, const Policy& policy, PlayerId player, TypeId type)
{
   History h;
   return value_rec(rules, policy, h, player, type);
}

Policy uniform_policy(const GameRules& rules)
{
   return [&rules](const History& h, PlayerId) {
      const auto n = rules.legal_actions(h).size();
      return std::vector< double >(n, 1.0 / static_cast< double >(n));
   };
}

Policy profile_policy(const GameSpec& spec, const bcfr::StrategyProfile& profile, TypeId type)
{
   return [&spec, &profile, type](const History& h, PlayerId p) {
      const auto idx = spec.infoset_index(bcfr::InfoSetKey{p, spec.rules().observation(h)});
      if(! idx) {
         throw std::logic_error("profile_policy: unknown infoset");
      }
      const auto probs = profile.at(type, *idx);
      return std::vector< double >(probs.begin(), probs.end());
   };
}

std::vector< double > counterfactual_action_values(const GameRules& rules,
                                                   const Policy& policy,
                                                   const bcfr::InfoSetKey& key,
                                                   TypeId type)
{
   std::vector< double > out;
   History h;
   cfv_rec(rules, policy, h, 1.0, key, type, out);
   return out;
}

// ---------------------------------------------------------------------------
// Pure-strategy enumeration.

namespace {

struct TerminalRow {
   double weight = 0.0;                            // π_{-i}(z) u(z)
   std::vector< std::pair< int, int > > choices;   // (infoset, action index) of the responder
};

void collect_rows(const GameSpec& spec,
                  const bcfr::StrategyProfile& profile,
                  TypeId type,
                  PlayerId player,
                  bcfr::NodeId node,
                  double reach,
                  std::vector< std::pair< int, int > >& path,
                  std::vector< TerminalRow >& rows)
{
   const auto& n = spec.node(node);
   if(n.kind == bcfr::NodeKind::terminal) {
      rows.push_back(TerminalRow{reach * spec.utility(n, player, type), path});
      return;
   }
   for(int k = 0; k < n.num_children; ++k) {
      const bcfr::NodeId c = spec.child(node, k);
      if(n.kind == bcfr::NodeKind::chance) {
         collect_rows(spec, profile, type, player, c, reach * spec.incoming_chance(c), path, rows);
      }
      else if(n.player == player) {
         path.emplace_back(n.infoset, k);
         collect_rows(spec, profile, type, player, c, reach, path, rows);
         path.pop_back();
      }
      else {
         const double pr = profile.at(type, n.infoset)[static_cast< std::size_t >(k)];
         if(pr > 0.0) {
            collect_rows(spec, profile, type, player, c, reach * pr, path, rows);
         }
      }
   }
}

}  // namespace

double brute_force_best_response(const GameSpec& spec,
                                 const bcfr::StrategyProfile& profile,
                                 std::span< const double > belief,
                                 PlayerId player)
{
   const auto infosets = spec.infosets_of(player);
   std::map< int, std::size_t > local;
   std::vector< int > radix;
   double count = 1.0;
   for(int idx : infosets) {
      local[idx] = radix.size();
      radix.push_back(static_cast< int >(spec.infoset(idx).actions.size()));
      count *= radix.back();
   }
   if(count > 4.0e6) {
      throw std::invalid_argument("brute_force_best_response: too many pure strategies");
   }
   double total = 0.0;
   for(int t = 0; t < spec.num_types(); ++t) {
      if(belief[static_cast< std::size_t >(t)] == 0.0) {
         continue;
      }
      std::vector< TerminalRow > rows;
      std::vector< std::pair< int, int > > path;
      collect_rows(spec, profile, TypeId{t}, player, spec.root(), 1.0, path, rows);
      std::vector< int > digits(radix.size(), 0);
      double best = -std::numeric_limits< double >::infinity();
      for(;;) {
         double v = 0.0;
         for(const auto& row : rows) {
            bool follows = true;
            for(const auto& [infoset, action] : row.choices) {
               if(digits[local[infoset]] != action) {
                  follows = false;
                  break;
               }
            }
            if(follows) {
               v += row.weight;
            }
         }
         best = std::max(best, v);
         std::size_t d = 0;
         while(d < digits.size() && ++digits[d] == radix[d]) {
            digits[d] = 0;
            ++d;
         }
         if(d == digits.size()) {
            break;
         }
      }
      total += belief[static_cast< std::size_t >(t)] * best;
   }
   return total;
}

// ---------------------------------------------------------------------------
// Sequence-form LP with a dense two-phase simplex (Bland's rule).

namespace {

/// max c·z subject to rows (a, b) with a·z = b, z >= 0.
struct DenseLp {
   std::vector< std::vector< double > > a;
   std::vector< double > b;
   std::vector< double > c;
};

std::vector< double > simplex(DenseLp lp)
{
   constexpr double eps = 1e-11;
   const std::size_t m = lp.a.size();
   const std::size_t n = lp.c.size();
   for(std::size_t i = 0; i < m; ++i) {
      if(lp.b[i] < 0.0) {
         lp.b[i] = -lp.b[i];
         for(double& v : lp.a[i]) {
            v = -v;
         }
      }
   }
   // Columns: n originals, m artificials, then rhs.
   const std::size_t width = n + m + 1;
   std::vector< std::vector< double > > t(m + 1, std::vector< double >(width, 0.0));
   std::vector< std::size_t > basis(m);
   for(std::size_t i = 0; i < m; ++i) {
      for(std::size_t j = 0; j < n; ++j) {
         t[i][j] = lp.a[i][j];
      }
      t[i][n + i] = 1.0;
      t[i][width - 1] = lp.b[i];
      basis[i] = n + i;
   }

   const auto pivot = [&](std::size_t r, std::size_t col) {
      const double pv = t[r][col];
      for(double& v : t[r]) {
         v /= pv;
      }
      for(std::size_t i = 0; i <= m; ++i) {
         if(i != r && t[i][col] != 0.0) {
            const double f = t[i][col];
            for(std::size_t j = 0; j < width; ++j) {
               t[i][j] -= f * t[r][j];
            }
         }
      }
      basis[r] = col;
   };

   const auto run = [&](std::size_t allowed) {
      for(;;) {
         std::size_t enter = width;
         for(std::size_t j = 0; j < allowed; ++j) {
            if(t[m][j] < -eps) {
               enter = j;
               break;
            }
         }
         if(enter == width) {
            return;
         }
         std::size_t leave = m;
         double best = std::numeric_limits< double >::infinity();
         for(std::size_t i = 0; i < m; ++i) {
            if(t[i][enter] > eps) {
               const double ratio = t[i][width - 1] / t[i][enter];
               if(ratio < best - eps || (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
                  best = ratio;
                  leave = i;
               }
            }
         }
         if(leave == m) {
            throw std::runtime_error("simplex: unbounded");
         }
         pivot(leave, enter);
      }
   };

   // Phase 1: minimise the artificial sum (objective row holds reduced costs of max -Σ art).
   for(std::size_t i = 0; i < m; ++i) {
      for(std::size_t j = 0; j < width; ++j) {
         t[m][j] -= t[i][j];
      }
      t[m][n + i] = 0.0;
   }
   run(n + m);
   if(t[m][width - 1] < -1e-8) {
      throw std::runtime_error("simplex: infeasible");
   }
   for(std::size_t i = 0; i < m; ++i) {
      if(basis[i] >= n) {
         for(std::size_t j = 0; j < n; ++j) {
            if(std::abs(t[i][j]) > eps) {
               pivot(i, j);
               break;
            }
         }
      }
   }
   // Phase 2.
   std::fill(t[m].begin(), t[m].end(), 0.0);
   for(std::size_t j = 0; j < n; ++j) {
      t[m][j] = -lp.c[j];
   }
   for(std::size_t i = 0; i < m; ++i) {
      if(basis[i] < n && t[m][basis[i]] != 0.0) {
         const double f = t[m][basis[i]];
         for(std::size_t j = 0; j < width; ++j) {
            t[m][j] -= f * t[i][j];
         }
      }
   }
   run(n);
   std::vector< double > z(n, 0.0);
   for(std::size_t i = 0; i < m; ++i) {
      if(basis[i] < n) {
         z[basis[i]] = t[i][width - 1];
      }
   }
   return z;
}

struct Sequences {
   // Sequence 0 is the empty sequence; (infoset, action) → id otherwise.
   std::map< std::pair< int, int >, int > id;
   std::map< int, int > parent;  // infoset → parent sequence id
   int count = 1;
};

void collect_sequences(const GameSpec& spec,
                       bcfr::NodeId node,
                       std::array< int, 2 > current,
                       std::array< Sequences, 2 >& seqs,
                       std::map< std::pair< int, int >, double >& payoff,
                       double chance,
                       TypeId type)
{
   const auto& n = spec.node(node);
   if(n.kind == bcfr::NodeKind::terminal) {
      payoff[{current[0], current[1]}] += chance * spec.utility(n, PlayerId{0}, type);
      return;
   }
   for(int k = 0; k < n.num_children; ++k) {
      const bcfr::NodeId c = spec.child(node, k);
      if(n.kind == bcfr::NodeKind::chance) {
         collect_sequences(spec, c, current, seqs, payoff, chance * spec.incoming_chance(c), type);
         continue;
      }
      auto& s = seqs[static_cast< std::size_t >(n.player.index)];
      s.parent.emplace(n.infoset, current[static_cast< std::size_t >(n.player.index)]);
      auto [it, inserted] = s.id.emplace(std::make_pair(n.infoset, k), s.count);
      if(inserted) {
         ++s.count;
      }
      auto next = current;
      next[static_cast< std::size_t >(n.player.index)] = it->second;
      collect_sequences(spec, c, next, seqs, payoff, chance, type);
   }
}

/// Realisation plan of `me` maximising its worst case; returns (value, plan).
std::pair< double, std::vector< double > > solve_side(int me,
                                                      const std::array< Sequences, 2 >& seqs,
                                                      const std::map< std::pair< int, int >, double >& payoff)
{
   const int opp = 1 - me;
   const auto& sm = seqs[static_cast< std::size_t >(me)];
   const auto& so = seqs[static_cast< std::size_t >(opp)];
   const int nx = sm.count;
   const int nq = static_cast< int >(so.parent.size()) + 1;  // opponent constraint rows
   // Variables: x (nx), q+ (nq), q- (nq), slack (so.count).
   const int ns = so.count;
   const int nvar = nx + 2 * nq + ns;
   DenseLp lp;
   lp.c.assign(static_cast< std::size_t >(nvar), 0.0);
   lp.c[static_cast< std::size_t >(nx)] = 1.0;  // f·q with f = e_0
   lp.c[static_cast< std::size_t >(nx + nq)] = -1.0;

   // E x = e.
   {
      std::vector< double > row(static_cast< std::size_t >(nvar), 0.0);
      row[0] = 1.0;
      lp.a.push_back(row);
      lp.b.push_back(1.0);
   }
   for(const auto& [infoset, parent] : sm.parent) {
      std::vector< double > row(static_cast< std::size_t >(nvar), 0.0);
      row[static_cast< std::size_t >(parent)] = -1.0;
      for(const auto& [key, id] : sm.id) {
         if(key.first == infoset) {
            row[static_cast< std::size_t >(id)] = 1.0;
         }
      }
      lp.a.push_back(row);
      lp.b.push_back(0.0);
   }
   // Opponent rows indexed: 0 → empty-sequence constraint, then infosets in order.
   std::map< int, int > qrow;
   {
      int r = 1;
      for(const auto& [infoset, parent] : so.parent) {
         qrow[infoset] = r++;
      }
   }
   // For each opponent sequence j: (F^T q)_j - (A_me^T x)_j + slack_j = 0.
   // F row 0: y_0 = 1; row I: -y_parent(I) + Σ y_{I,a} = 0.
   for(int j = 0; j < ns; ++j) {
      std::vector< double > row(static_cast< std::size_t >(nvar), 0.0);
      const auto add_q = [&](int r, double coef) {
         row[static_cast< std::size_t >(nx + r)] += coef;
         row[static_cast< std::size_t >(nx + nq + r)] -= coef;
      };
      if(j == 0) {
         add_q(0, 1.0);
      }
      for(const auto& [infoset, parent] : so.parent) {
         if(parent == j) {
            add_q(qrow[infoset], -1.0);
         }
      }
      for(const auto& [key, id] : so.id) {
         if(id == j) {
            add_q(qrow[key.first], 1.0);
         }
      }
      for(const auto& [pair, u] : payoff) {
         const int xs = me == 0 ? pair.first : pair.second;
         const int ys = me == 0 ? pair.second : pair.first;
         if(ys == j) {
            const double gain = me == 0 ? u : -u;
            row[static_cast< std::size_t >(xs)] -= gain;
         }
      }
      row[static_cast< std::size_t >(nx + 2 * nq + j)] = 1.0;
      lp.a.push_back(row);
      lp.b.push_back(0.0);
   }
   const auto z = simplex(lp);
   double value = 0.0;
   for(int v = 0; v < nvar; ++v) {
      value += lp.c[static_cast< std::size_t >(v)] * z[static_cast< std::size_t >(v)];
   }
   return {value, std::vector< double >(z.begin(), z.begin() + nx)};
}

}  // namespace

LpSolution solve_sequence_form(const GameSpec& spec, TypeId type)
{
   std::array< Sequences, 2 > seqs;
   std::map< std::pair< int, int >, double > payoff;
   collect_sequences(spec, spec.root(), {0, 0}, seqs, payoff, 1.0, type);

   LpSolution out;
   out.profile = bcfr::StrategyProfile(spec, 1);
   for(int me = 0; me < 2; ++me) {
      const auto [value, plan] = solve_side(me, seqs, payoff);
      if(me == 0) {
         out.value = value;
      }
      const auto& s = seqs[static_cast< std::size_t >(me)];
      for(int idx : spec.infosets_of(PlayerId{me})) {
         const auto& info = spec.infoset(idx);
         const double parent = plan[static_cast< std::size_t >(s.parent.at(idx))];
         std::vector< double > probs(info.actions.size(), 1.0 / static_cast< double >(info.actions.size()));
         if(parent > 1e-12) {
            double sum = 0.0;
            for(std::size_t k = 0; k < probs.size(); ++k) {
               probs[k] = std::max(0.0, plan[static_cast< std::size_t >(s.id.at({idx, static_cast< int >(k)}))]);
               sum += probs[k];
            }
            for(double& p : probs) {
               p /= sum;
            }
         }
         out.profile.set(TypeId{0}, idx, probs);
      }
   }
   return out;
}

}  // namespace oracle
