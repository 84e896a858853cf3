// Ranked evaluation of a formula over every row of a normalised table.
#pragma once

#include "lukq/dataset.hpp"
#include "lukq/formula.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lukq {

struct RankedEntry {
    std::int64_t id;
    Degree degree;
    std::string display;
};

/// Entries by degree descending, ties by ascending row id.
struct RankedResult {
    std::vector<RankedEntry> entries;
};

struct QueryOptions {
    std::optional<std::size_t> limit;  // keep the first `limit` entries
    bool only_positive = false;        // drop degree-0 rows
};

/// Throws UnboundVariable naming the first (alphabetical) variable of `f`
/// the table does not bind.
inline void check_bound(const Formula& f, const NormalizedTable& table) {
    for (const auto& v : free_vars(f))
        if (!table.binds(v)) throw UnboundVariable(v);
}

inline RankedResult evaluate_query(const Formula& f, const NormalizedTable& table, const QueryOptions& options = {}) {
    if (options.limit && *options.limit == 0) throw std::invalid_argument("limit must be positive");
    check_bound(f, table);
    RankedResult result;
    result.entries.reserve(table.size());
    for (const auto& row : table.rows()) {
        Degree d = eval(f, row.world);
        if (options.only_positive && d.is_zero()) continue;
        result.entries.push_back({row.id, std::move(d), row.display});
    }
    auto order = [](const RankedEntry& a, const RankedEntry& b) {
        if (a.degree != b.degree) return a.degree > b.degree;
        return a.id < b.id;
    };
    std::size_t keep = std::min(result.entries.size(), options.limit.value_or(result.entries.size()));
    std::partial_sort(result.entries.begin(), result.entries.begin() + static_cast<std::ptrdiff_t>(keep),
                      result.entries.end(), order);
    result.entries.resize(keep);
    return result;
}

/// Ids of the entries evaluating to exactly 1, in ranking order.
inline std::vector<std::int64_t> answer_set(const RankedResult& result) {
    std::vector<std::int64_t> ids;
    for (const auto& e : result.entries) {
        if (!e.degree.is_one()) break;  // sorted: the degree-1 entries form a prefix
        ids.push_back(e.id);
    }
    return ids;
}

}  // namespace lukq
