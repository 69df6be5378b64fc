#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace weasl::data {

// Column-oriented instance storage. y, g: 0/1, or -1 when absent.
// group_id: non-negative, or -1 when absent.
struct Dataset {
    std::size_t dim = 0;
    std::vector<double> features;  // row-major, size() x dim
    std::vector<std::int8_t> y;
    std::vector<std::int8_t> g;
    std::vector<std::int64_t> group_id;

    Dataset() = default;
    explicit Dataset(std::size_t d) : dim(d) {}

    std::size_t size() const { return y.size(); }
    bool empty() const { return y.empty(); }

    std::span<const double> x(std::size_t i) const { return {features.data() + i * dim, dim}; }

    // Validates invariants: finite features of length dim, labels in {-1,0,1},
    // group label implies group id.
    void append(std::span<const double> x, int y_value, std::int64_t gid, int g_value);

    void reserve(std::size_t n);

    bool has_any_y() const;
    bool has_any_g() const;
    bool has_any_group_id() const;
    bool has_all_y() const;
    bool has_all_g() const;
};

struct Group {
    std::int64_t id = -1;
    std::int8_t label = 0;
    std::vector<std::size_t> members;
};

// Groups sorted by id. Built from instance fields; construction validates
// that grouped instances carry a group label and that labels agree within
// each group.
struct GroupTable {
    std::vector<Group> groups;

    std::size_t size() const { return groups.size(); }
};

// Contiguous view of a GroupTable for the aggregation kernels:
// group b owns member_index[offsets[b] .. offsets[b+1]).
struct FlatGroups {
    std::vector<std::size_t> member_index;
    std::vector<std::size_t> offsets;
    std::vector<double> labels;

    std::size_t size() const { return labels.size(); }
};

GroupTable build_group_table(const Dataset& ds);
FlatGroups flatten(const GroupTable& gt);

// New dataset holding the listed instances, in the listed order.
Dataset subset(const Dataset& ds, std::span<const std::size_t> indices);

// Deterministic shuffled partition. Fractions must be positive and sum to 1
// within 1e-9; sizes round to nearest with the remainder in the last part.
// When any instance carries a group id, whole groups stay together and
// part sizes are met to within one group.
std::vector<Dataset> split(const Dataset& ds, std::span<const double> fractions,
                           std::uint64_t seed);

// CSV with a mandatory header. Feature columns f0..f{d-1}; optional y,
// group_id, g columns in any order. Empty cell = absent label. Lines before
// the header starting with '#' are skipped.
struct LoadedCsv {
    Dataset dataset;
    std::optional<GroupTable> groups;
};

LoadedCsv load_csv(const std::string& path);

// Emits only the columns that are populated somewhere in the dataset.
// Features print with enough digits to round-trip exactly.
void save_csv(const Dataset& ds, const std::string& path);

// Plain key=value sidecar files (metadata, provenance, config).
// '#' lines and blank lines are ignored on read; order is preserved on write.
using KvPairs = std::vector<std::pair<std::string, std::string>>;
void save_kv(const KvPairs& kv, const std::string& path);
KvPairs load_kv(const std::string& path);
std::optional<std::string> kv_get(const KvPairs& kv, const std::string& key);

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace weasl::data
