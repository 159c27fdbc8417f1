#pragma once

// Multisets of evaluation-parameter functions describing how a connecting map
// decomposes fibrewise into point evaluations.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ozcheck/plfun.hpp"

namespace ozcheck {

struct ConnectorEntry {
  PLFunc fn;
  BigInt multiplicity;
  /// Symbolic constancy: set when any factor of the composite was a constant
  /// function. A composite can be constant as a function without this flag.
  bool constant = false;
};

/// Multiset of (PL function, multiplicity) entries. Identical entries (same
/// function and same constancy flag) are merged.
class ConnectorSymbolic {
 public:
  void add(const PLFunc& fn, const BigInt& multiplicity, bool constant) {
    if (multiplicity <= 0) return;
    std::string key = (constant ? "c|" : "v|") + fn.key();
    auto [it, inserted] = index_.try_emplace(std::move(key), entries_.size());
    if (inserted)
      entries_.push_back({fn, multiplicity, constant});
    else
      entries_[it->second].multiplicity += multiplicity;
  }

  [[nodiscard]] const std::vector<ConnectorEntry>& entries() const { return entries_; }
  [[nodiscard]] std::size_t distinct() const { return entries_.size(); }

  /// Total number of entries counted with multiplicity.
  [[nodiscard]] BigInt entry_count() const {
    BigInt total = 0;
    for (const auto& e : entries_) total += e.multiplicity;
    return total;
  }

  [[nodiscard]] BigInt nonconstant_count() const {
    BigInt total = 0;
    for (const auto& e : entries_)
      if (!e.constant) total += e.multiplicity;
    return total;
  }

  [[nodiscard]] Rational nonconstant_fraction() const {
    return Rational(nonconstant_count(), entry_count());
  }

 private:
  std::vector<ConnectorEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

/// Default cap on the number of distinct entries any connector may hold.
inline constexpr std::size_t kConnectorBudget = std::size_t{1} << 20;

/// The evaluation-parameter sequence of one connecting step at level q:
/// constants i/q (1 <= i < q) with multiplicity q^3 each, h with multiplicity
/// q(q-1), and h_i(t) = 1 - i f(1-t)/q once for each 1 <= i <= q.
inline ConnectorSymbolic lambda_sequence(const BigInt& q, std::size_t budget = kConnectorBudget) {
  if (q < 2) throw DomainError("lambda_sequence requires q >= 2");
  if (q > BigInt(budget) / 2)
    throw ResourceError("lambda_sequence: level q = " + q.str() + " exceeds the entry budget");
  const unsigned qq = q.convert_to<unsigned>();
  const BigInt cube = q * q * q;
  ConnectorSymbolic out;
  for (unsigned i = 1; i < qq; ++i) out.add(PLFunc::constant(make_rational(i, qq)), cube, true);
  out.add(shapes::h(), q * (q - 1), false);
  for (unsigned i = 1; i <= qq; ++i) out.add(shapes::h_indexed(i, qq), 1, false);
  return out;
}

inline ConnectorSymbolic lambda_sequence(unsigned q) { return lambda_sequence(BigInt(q)); }

/// Multiset of composites F_1∘…∘F_steps with F_j from the level-j sequence
/// (q_j = q^(3^j)). Composites with a constant factor are folded to
/// constants and merged by value.
inline ConnectorSymbolic connector_symbolic(const BigInt& q, unsigned steps, std::size_t budget = kConnectorBudget) {
  if (steps == 0) throw DomainError("connector_symbolic needs steps >= 1");
  ConnectorSymbolic acc = lambda_sequence(q, budget);
  BigInt level = q;
  for (unsigned s = 1; s < steps; ++s) {
    if (level > BigInt(budget)) throw ResourceError("connector_symbolic: level exceeds budget");
    level = level * level * level;
    const ConnectorSymbolic inner = lambda_sequence(level, budget);
    if (BigInt(acc.distinct()) * BigInt(inner.distinct()) > BigInt(budget))
      throw ResourceError("connector_symbolic: more than " + std::to_string(budget) + " distinct composites");
    ConnectorSymbolic next;
    for (const auto& outer : acc.entries())
      for (const auto& in : inner.entries()) {
        const BigInt mult = outer.multiplicity * in.multiplicity;
        if (outer.constant) {
          next.add(outer.fn, mult, true);
        } else if (in.constant) {
          next.add(PLFunc::constant(outer.fn(in.fn(Rational(0)))), mult, true);
        } else {
          next.add(compose(outer.fn, in.fn), mult, false);
        }
      }
    acc = std::move(next);
  }
  return acc;
}

inline ConnectorSymbolic connector_symbolic(unsigned q, unsigned steps, std::size_t budget = kConnectorBudget) {
  return connector_symbolic(BigInt(q), steps, budget);
}

}  // namespace ozcheck
