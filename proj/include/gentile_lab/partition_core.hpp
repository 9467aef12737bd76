#pragma once

// Exact arbitrary-precision counting of restricted integer partitions.
//
// A partition of n is a multiset of positive parts summing to n. Parts may be
// restricted to s-th powers m^s, to at most N parts in total, and to at most M
// copies of each distinct part. Every count here is exact; the asymptotic
// formulas in asymptotics.hpp are checked against them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gentile_lab/errors.hpp"

namespace gentile_lab::partitions {

using BigInt = boost::multiprecision::cpp_int;

/// Default exact-counting feasibility limit on n; GENTILE_LAB_MAX_DP_N overrides it.
inline constexpr std::int64_t kDefaultMaxDpN = 5000;

/// Default largest n accepted by enumerate_partitions.
inline constexpr std::int64_t kDefaultEnumerationCap = 40;

struct PartitionConstraint {
    std::int64_t n = 0;
    std::optional<std::int64_t> max_parts;        // N; empty means unbounded
    std::optional<std::int64_t> max_multiplicity; // M; empty means unbounded
    int power = 1;                                // parts are m^power

    void validate() const
    {
        detail::require(n >= 0, "partition target n must be non-negative");
        detail::require(!max_parts || *max_parts >= 1, "max_parts must be >= 1");
        detail::require(!max_multiplicity || *max_multiplicity >= 1, "max_multiplicity must be >= 1");
        detail::require(power >= 1, "power s must be a positive integer");
    }
};

struct CountResult {
    BigInt exact;
    double log_value = -std::numeric_limits<double>::infinity();
};

/// Natural logarithm of a non-negative big integer without converting it to a double.
inline double log_big(const BigInt& value)
{
    if (value <= 0) {
        return -std::numeric_limits<double>::infinity();
    }
    const auto bits = static_cast<std::int64_t>(boost::multiprecision::msb(value));
    if (bits < 63) {
        return std::log(static_cast<double>(value.convert_to<std::uint64_t>()));
    }
    const auto shift = bits - 62;
    const auto top = static_cast<std::uint64_t>(value >> static_cast<unsigned>(shift));
    return std::log(static_cast<double>(top)) + static_cast<double>(shift) * std::numbers::ln2;
}

inline CountResult make_count_result(BigInt exact)
{
    CountResult result;
    result.log_value = log_big(exact);
    result.exact = std::move(exact);
    return result;
}

/// Feasibility limit for the dense DP tables, honouring GENTILE_LAB_MAX_DP_N.
inline std::int64_t max_dp_n()
{
    if (const char* env = std::getenv("GENTILE_LAB_MAX_DP_N")) {
        char* end = nullptr;
        const long long parsed = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && parsed > 0) {
            return parsed;
        }
    }
    return kDefaultMaxDpN;
}

namespace internal {

inline std::vector<std::int64_t> power_parts(std::int64_t n_max, int power)
{
    std::vector<std::int64_t> parts;
    for (std::int64_t m = 1;; ++m) {
        std::int64_t value = 1;
        bool overflow = false;
        for (int k = 0; k < power; ++k) {
            if (value > n_max / m + 1) {
                overflow = true;
                break;
            }
            value *= m;
        }
        if (overflow || value > n_max) {
            break;
        }
        parts.push_back(value);
    }
    return parts;
}

// Multiplies the generating function by 1/(1 - x^v), then by (1 - x^{(M+1)v}). max_mult 0 means unbounded.
inline void apply_part_1d(std::vector<BigInt>& table, std::int64_t v, std::int64_t max_mult)
{
    const auto n_max = static_cast<std::int64_t>(table.size()) - 1;
    for (std::int64_t i = v; i <= n_max; ++i) {
        table[i] += table[i - v];
    }
    if (max_mult > 0 && (max_mult + 1) <= n_max / v) {
        const std::int64_t stride = (max_mult + 1) * v;
        for (std::int64_t i = n_max; i >= stride; --i) {
            table[i] -= table[i - stride];
        }
    }
}

// Two-variable version: rows count parts used (truncated at K), columns the sum.
inline void apply_part_2d(std::vector<std::vector<BigInt>>& rows, std::int64_t v, std::int64_t max_mult)
{
    const auto k_max = static_cast<std::int64_t>(rows.size()) - 1;
    const auto n_max = static_cast<std::int64_t>(rows[0].size()) - 1;
    for (std::int64_t k = 1; k <= k_max; ++k) {
        for (std::int64_t i = v; i <= n_max; ++i) {
            rows[k][i] += rows[k - 1][i - v];
        }
    }
    if (max_mult > 0) {
        const std::int64_t copies = max_mult + 1;
        if (copies > k_max || copies > n_max / v) {
            return;
        }
        const std::int64_t stride = copies * v;
        for (std::int64_t k = k_max; k >= copies; --k) {
            for (std::int64_t i = n_max; i >= stride; --i) {
                rows[k][i] -= rows[k - copies][i - stride];
            }
        }
    }
}

// p(i, exactly k parts) = p(i-1, k-1) + p(i-k, k); summed over k <= N.
inline std::vector<BigInt> max_parts_table(std::int64_t n_max, std::int64_t max_parts)
{
    const std::int64_t k_max = std::min(max_parts, std::max<std::int64_t>(n_max, 1));
    std::vector<BigInt> previous(n_max + 1);
    std::vector<BigInt> current(n_max + 1);
    std::vector<BigInt> total(n_max + 1);
    previous[0] = 1; // exactly zero parts
    total[0] = 1;
    for (std::int64_t k = 1; k <= k_max; ++k) {
        std::fill(current.begin(), current.end(), BigInt(0));
        for (std::int64_t i = k; i <= n_max; ++i) {
            current[i] = previous[i - 1] + current[i - k];
            total[i] += current[i];
        }
        std::swap(previous, current);
    }
    return total;
}

inline std::vector<BigInt> compute_table(std::int64_t n_max, int power, std::optional<std::int64_t> max_parts,
                                         std::optional<std::int64_t> max_mult)
{
    // Restrictions that can never bind at this size are dropped; 0 stands for unbounded.
    const std::int64_t mult = max_mult.value_or(0) >= n_max ? 0 : max_mult.value_or(0);
    const std::int64_t k_max = max_parts.value_or(0) >= n_max ? 0 : max_parts.value_or(0);
    const auto parts = power_parts(n_max, power);

    if (k_max > 0 && power == 1 && mult == 0) {
        return max_parts_table(n_max, k_max);
    }
    if (k_max == 0) {
        std::vector<BigInt> table(n_max + 1);
        table[0] = 1;
        for (const auto v : parts) {
            apply_part_1d(table, v, mult);
        }
        return table;
    }
    std::vector<std::vector<BigInt>> rows(k_max + 1, std::vector<BigInt>(n_max + 1));
    rows[0][0] = 1;
    for (const auto v : parts) {
        apply_part_2d(rows, v, mult);
    }
    std::vector<BigInt> table(n_max + 1);
    for (std::int64_t i = 0; i <= n_max; ++i) {
        for (std::int64_t k = 0; k <= k_max; ++k) {
            table[i] += rows[k][i];
        }
    }
    return table;
}

// Bounded LRU cache of count tables keyed by restriction signature. Entries
// hold counts for every n up to the largest n requested so far.
class TableCache {
public:
    using Key = std::tuple<int, std::int64_t, std::int64_t>; // power, N (0 = none), M (0 = none)
    using Table = std::shared_ptr<const std::vector<BigInt>>;

    static constexpr std::size_t kMaxEntries = 64;

    static TableCache& instance()
    {
        static TableCache cache;
        return cache;
    }

    Table get(std::int64_t n_max, int power, std::optional<std::int64_t> max_parts,
              std::optional<std::int64_t> max_mult)
    {
        const Key key{power, max_parts.value_or(0), max_mult.value_or(0)};
        {
            std::lock_guard lock(mutex_);
            if (auto it = entries_.find(key); it != entries_.end() && size_of(it->second.table) > n_max) {
                touch(it);
                return it->second.table;
            }
        }
        // Computed outside the lock; concurrent misses on one key just duplicate work.
        auto table = std::make_shared<const std::vector<BigInt>>(compute_table(n_max, power, max_parts, max_mult));
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            order_.push_front(key);
            it = entries_.emplace(key, Entry{table, order_.begin()}).first;
        } else if (size_of(it->second.table) < size_of(table)) {
            it->second.table = table;
        }
        touch(it);
        while (entries_.size() > kMaxEntries) {
            entries_.erase(order_.back());
            order_.pop_back();
        }
        return it->second.table;
    }

    void clear()
    {
        std::lock_guard lock(mutex_);
        entries_.clear();
        order_.clear();
    }

    std::size_t size() const
    {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    struct Entry {
        Table table;
        std::list<Key>::iterator position;
    };

    static std::int64_t size_of(const Table& table) { return static_cast<std::int64_t>(table->size()); }

    void touch(std::map<Key, Entry>::iterator it)
    {
        order_.splice(order_.begin(), order_, it->second.position);
    }

    mutable std::mutex mutex_;
    std::map<Key, Entry> entries_;
    std::list<Key> order_;
};

inline void require_feasible(std::int64_t n)
{
    const auto limit = max_dp_n();
    detail::require<InfeasibleError>(n <= limit, "exact count for n = " + std::to_string(n) +
                                                     " exceeds the DP feasibility limit " +
                                                     std::to_string(limit) + " (set GENTILE_LAB_MAX_DP_N)");
}

} // namespace internal

/// Counts for every target 0..n_max under the restrictions of `signature` (its n is ignored).
inline std::vector<BigInt> count_table(const PartitionConstraint& signature, std::int64_t n_max)
{
    PartitionConstraint probe = signature;
    probe.n = n_max;
    probe.validate();
    internal::require_feasible(n_max);
    auto table = internal::TableCache::instance().get(n_max, signature.power, signature.max_parts,
                                                    signature.max_multiplicity);
    return {table->begin(), table->begin() + n_max + 1};
}

inline CountResult count(const PartitionConstraint& constraint)
{
    constraint.validate();
    internal::require_feasible(constraint.n);
    auto table = internal::TableCache::instance().get(constraint.n, constraint.power, constraint.max_parts,
                                                    constraint.max_multiplicity);
    return make_count_result((*table)[constraint.n]);
}

/// p(n), the number of unrestricted partitions.
inline CountResult count_unrestricted(std::int64_t n)
{
    return count({.n = n});
}

/// Partitions of n into at most N parts.
inline CountResult count_max_parts(std::int64_t n, std::int64_t max_parts)
{
    return count({.n = n, .max_parts = max_parts});
}

/// Partitions of n in which no part occurs more than M times.
inline CountResult count_max_multiplicity(std::int64_t n, std::int64_t max_multiplicity)
{
    return count({.n = n, .max_multiplicity = max_multiplicity});
}

/// Partitions of n into s-th powers; N and M restrictions are taken from `restrictions`.
inline CountResult count_power(std::int64_t n, int power, const PartitionConstraint& restrictions = {})
{
    PartitionConstraint constraint = restrictions;
    constraint.n = n;
    constraint.power = power;
    return count(constraint);
}

/// p(n) through Euler's pentagonal-number recurrence; independent of the DP tables.
inline BigInt count_unrestricted_pentagonal(std::int64_t n)
{
    detail::require(n >= 0, "partition target n must be non-negative");
    std::vector<BigInt> p(n + 1);
    p[0] = 1;
    for (std::int64_t i = 1; i <= n; ++i) {
        BigInt sum = 0;
        for (std::int64_t k = 1;; ++k) {
            const std::int64_t g1 = k * (3 * k - 1) / 2;
            if (g1 > i) {
                break;
            }
            const std::int64_t g2 = k * (3 * k + 1) / 2;
            const bool add = (k % 2) == 1;
            if (add) {
                sum += p[i - g1];
            } else {
                sum -= p[i - g1];
            }
            if (g2 <= i) {
                if (add) {
                    sum += p[i - g2];
                } else {
                    sum -= p[i - g2];
                }
            }
        }
        p[i] = std::move(sum);
    }
    return p[n];
}

/// Partitions of n whose largest part is at most `largest` (the conjugate of count_max_parts).
inline BigInt count_largest_part_at_most(std::int64_t n, std::int64_t largest)
{
    detail::require(n >= 0 && largest >= 1, "need n >= 0 and largest >= 1");
    std::vector<BigInt> table(n + 1);
    table[0] = 1;
    for (std::int64_t v = 1; v <= std::min(largest, n); ++v) {
        for (std::int64_t i = v; i <= n; ++i) {
            table[i] += table[i - v];
        }
    }
    return table[n];
}

/// Partitions of n with no part divisible by `divisor` (Glaisher's side of the bijection).
inline BigInt count_parts_not_divisible_by(std::int64_t n, std::int64_t divisor)
{
    detail::require(n >= 0 && divisor >= 2, "need n >= 0 and divisor >= 2");
    std::vector<BigInt> table(n + 1);
    table[0] = 1;
    for (std::int64_t v = 1; v <= n; ++v) {
        if (v % divisor == 0) {
            continue;
        }
        for (std::int64_t i = v; i <= n; ++i) {
            table[i] += table[i - v];
        }
    }
    return table[n];
}

using Partition = std::vector<std::int64_t>; // parts in non-increasing order

/// Every partition satisfying `constraint`, parts descending, in reverse lexicographic order.
inline std::vector<Partition> enumerate_partitions(const PartitionConstraint& constraint,
                                                   std::int64_t cap = kDefaultEnumerationCap)
{
    constraint.validate();
    detail::require<CapExceededError>(constraint.n <= cap, "enumeration of n = " + std::to_string(constraint.n) +
                                                               " exceeds the cap " + std::to_string(cap));
    const auto parts = internal::power_parts(constraint.n, constraint.power);
    const std::int64_t max_parts = constraint.max_parts.value_or(std::numeric_limits<std::int64_t>::max());
    const std::int64_t max_mult = constraint.max_multiplicity.value_or(std::numeric_limits<std::int64_t>::max());

    std::vector<Partition> out;
    Partition current;
    // index: largest part value still allowed is parts[index].
    auto recurse = [&](auto&& self, std::int64_t remaining, std::int64_t index) -> void {
        if (remaining == 0) {
            out.push_back(current);
            return;
        }
        for (std::int64_t i = index; i >= 0; --i) {
            const auto v = parts[i];
            if (v > remaining) {
                continue;
            }
            std::int64_t copies = 0;
            std::int64_t left = remaining;
            while (left >= v && copies < max_mult && static_cast<std::int64_t>(current.size()) < max_parts) {
                current.push_back(v);
                left -= v;
                ++copies;
            }
            // Back off one copy at a time so larger multiplicities come first.
            for (; copies > 0; --copies) {
                self(self, left, i - 1);
                current.pop_back();
                left += v;
            }
        }
    };
    recurse(recurse, constraint.n, static_cast<std::int64_t>(parts.size()) - 1);
    return out;
}

} // namespace gentile_lab::partitions
