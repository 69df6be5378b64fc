#include "weasl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "weasl/error.hpp"
#include "weasl/rng.hpp"

namespace weasl::data {

void Dataset::append(std::span<const double> x, int y_value, std::int64_t gid, int g_value) {
    if (x.size() != dim) throw ConfigError("instance feature length does not match dataset dim");
    for (double v : x) {
        if (!std::isfinite(v)) throw ConfigError("non-finite feature value");
    }
    if (y_value < -1 || y_value > 1) throw ConfigError("y must be 0, 1, or -1 (absent)");
    if (g_value < -1 || g_value > 1) throw ConfigError("g must be 0, 1, or -1 (absent)");
    if (gid < -1) throw ConfigError("group_id must be non-negative or -1 (absent)");
    if (g_value != -1 && gid == -1) throw ConfigError("group label requires a group id");
    features.insert(features.end(), x.begin(), x.end());
    y.push_back(static_cast<std::int8_t>(y_value));
    g.push_back(static_cast<std::int8_t>(g_value));
    group_id.push_back(gid);
}

void Dataset::reserve(std::size_t n) {
    features.reserve(n * dim);
    y.reserve(n);
    g.reserve(n);
    group_id.reserve(n);
}

bool Dataset::has_any_y() const {
    return std::any_of(y.begin(), y.end(), [](std::int8_t v) { return v != -1; });
}
bool Dataset::has_any_g() const {
    return std::any_of(g.begin(), g.end(), [](std::int8_t v) { return v != -1; });
}
bool Dataset::has_any_group_id() const {
    return std::any_of(group_id.begin(), group_id.end(), [](std::int64_t v) { return v != -1; });
}
bool Dataset::has_all_y() const {
    return !empty() && std::all_of(y.begin(), y.end(), [](std::int8_t v) { return v != -1; });
}
bool Dataset::has_all_g() const {
    return !empty() && std::all_of(g.begin(), g.end(), [](std::int8_t v) { return v != -1; });
}

GroupTable build_group_table(const Dataset& ds) {
    std::map<std::int64_t, std::size_t> by_id;
    GroupTable gt;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::int64_t gid = ds.group_id[i];
        if (gid == -1) continue;
        if (ds.g[i] == -1) {
            throw ConsistencyError("instance " + std::to_string(i) + " has group id " +
                                   std::to_string(gid) + " but no group label");
        }
        auto [it, inserted] = by_id.try_emplace(gid, gt.groups.size());
        if (inserted) {
            gt.groups.push_back(Group{gid, ds.g[i], {}});
        } else if (gt.groups[it->second].label != ds.g[i]) {
            throw ConsistencyError("conflicting labels within group " + std::to_string(gid));
        }
        gt.groups[it->second].members.push_back(i);
    }
    std::sort(gt.groups.begin(), gt.groups.end(),
              [](const Group& a, const Group& b) { return a.id < b.id; });
    return gt;
}

FlatGroups flatten(const GroupTable& gt) {
    FlatGroups flat;
    flat.offsets.reserve(gt.groups.size() + 1);
    flat.labels.reserve(gt.groups.size());
    flat.offsets.push_back(0);
    std::size_t total = 0;
    for (const Group& grp : gt.groups) total += grp.members.size();
    flat.member_index.reserve(total);
    for (const Group& grp : gt.groups) {
        flat.member_index.insert(flat.member_index.end(), grp.members.begin(), grp.members.end());
        flat.offsets.push_back(flat.member_index.size());
        flat.labels.push_back(static_cast<double>(grp.label));
    }
    return flat;
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices) {
    Dataset out(ds.dim);
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= ds.size()) throw ConfigError("subset index out of range");
        out.features.insert(out.features.end(), ds.features.begin() + i * ds.dim,
                            ds.features.begin() + (i + 1) * ds.dim);
        out.y.push_back(ds.y[i]);
        out.g.push_back(ds.g[i]);
        out.group_id.push_back(ds.group_id[i]);
    }
    return out;
}

std::vector<Dataset> split(const Dataset& ds, std::span<const double> fractions,
                           std::uint64_t seed) {
    if (ds.empty()) throw ConfigError("cannot split an empty dataset");
    if (fractions.empty()) throw ConfigError("no split fractions given");
    double sum = 0.0;
    for (double f : fractions) {
        if (f <= 0.0) throw ConfigError("split fractions must be positive");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");

    // Units: whole groups when group ids exist, single instances otherwise.
    std::vector<std::vector<std::size_t>> units;
    if (ds.has_any_group_id()) {
        std::map<std::int64_t, std::size_t> by_id;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const std::int64_t gid = ds.group_id[i];
            if (gid == -1) {
                units.push_back({i});
                continue;
            }
            auto [it, inserted] = by_id.try_emplace(gid, units.size());
            if (inserted) units.emplace_back();
            units[it->second].push_back(i);
        }
    } else {
        units.resize(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) units[i] = {i};
    }

    std::vector<std::size_t> order(units.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng::Stream stream(rng::derive(seed, 0x51u));
    rng::shuffle(std::span<std::size_t>(order), stream);

    const std::size_t n = ds.size();
    const std::size_t parts = fractions.size();
    std::vector<std::size_t> target(parts);
    std::size_t assigned = 0;
    for (std::size_t p = 0; p + 1 < parts; ++p) {
        target[p] = static_cast<std::size_t>(std::llround(fractions[p] * static_cast<double>(n)));
        assigned += target[p];
    }
    target[parts - 1] = n > assigned ? n - assigned : 0;

    std::vector<std::vector<std::size_t>> picks(parts);
    std::size_t part = 0;
    std::size_t count = 0;
    for (std::size_t u : order) {
        while (part + 1 < parts && count >= target[part]) {
            part += 1;
            count = 0;
        }
        for (std::size_t i : units[u]) picks[part].push_back(i);
        count += units[u].size();
    }

    std::vector<Dataset> out;
    out.reserve(parts);
    for (const auto& idx : picks) out.push_back(subset(ds, idx));
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

double parse_feature(const std::string& cell, std::size_t line_no) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric feature value '" +
                         cell + "'");
    }
    if (!std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": non-finite feature value");
    }
    return v;
}

int parse_label(const std::string& cell, const char* name, std::size_t line_no) {
    if (cell.empty()) return -1;
    if (cell == "0") return 0;
    if (cell == "1") return 1;
    throw ParseError("line " + std::to_string(line_no) + ": " + name + " must be 0 or 1, got '" +
                     cell + "'");
}

std::int64_t parse_group_id(const std::string& cell, std::size_t line_no) {
    if (cell.empty()) return -1;
    std::int64_t v = 0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || v < 0) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": group_id must be a non-negative integer, got '" + cell + "'");
    }
    return v;
}

}  // namespace

LoadedCsv load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");

    std::string line;
    std::size_t line_no = 0;

    // Header (preceding '#' lines allowed).
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        line_no += 1;
        if (!line.empty() && line[0] == '#') continue;
        header = split_line(line);
        break;
    }
    if (header.empty()) throw ParseError("'" + path + "': missing header row");

    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::size_t y_col = kUnset;
    std::size_t gid_col = kUnset;
    std::size_t g_col = kUnset;
    std::vector<std::size_t> feature_cols;  // feature index -> column index
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (name == "y" || name == "group_id" || name == "g") {
            std::size_t& slot = name == "y" ? y_col : name == "group_id" ? gid_col : g_col;
            if (slot != kUnset) throw ParseError("'" + path + "': duplicate column '" + name + "'");
            slot = c;
            continue;
        }
        if (name.size() >= 2 && name[0] == 'f') {
            std::size_t idx = 0;
            const char* begin = name.data() + 1;
            const char* end = name.data() + name.size();
            auto [ptr, ec] = std::from_chars(begin, end, idx);
            if (ec == std::errc{} && ptr == end) {
                if (idx >= feature_cols.size()) feature_cols.resize(idx + 1, kUnset);
                if (feature_cols[idx] != kUnset) {
                    throw ParseError("'" + path + "': duplicate column '" + name + "'");
                }
                feature_cols[idx] = c;
                continue;
            }
        }
        throw ParseError("'" + path + "': unknown column '" + name + "'");
    }
    if (feature_cols.empty()) throw ParseError("'" + path + "': no feature columns (f0..)");
    for (std::size_t i = 0; i < feature_cols.size(); ++i) {
        if (feature_cols[i] == kUnset) {
            throw ParseError("'" + path + "': feature columns not contiguous, missing f" +
                             std::to_string(i));
        }
    }

    LoadedCsv result;
    result.dataset.dim = feature_cols.size();
    std::vector<double> row(feature_cols.size());
    while (std::getline(in, line)) {
        line_no += 1;
        if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        }
        for (std::size_t i = 0; i < feature_cols.size(); ++i) {
            const std::string& cell = cells[feature_cols[i]];
            if (cell.empty()) {
                throw ParseError("line " + std::to_string(line_no) + ": missing feature f" +
                                 std::to_string(i));
            }
            row[i] = parse_feature(cell, line_no);
        }
        const int yv = y_col == kUnset ? -1 : parse_label(cells[y_col], "y", line_no);
        const int gv = g_col == kUnset ? -1 : parse_label(cells[g_col], "g", line_no);
        const std::int64_t gid = gid_col == kUnset ? -1 : parse_group_id(cells[gid_col], line_no);
        if (gv != -1 && gid == -1) {
            throw ParseError("line " + std::to_string(line_no) + ": g given without group_id");
        }
        result.dataset.append(row, yv, gid, gv);
    }

    if (result.dataset.has_any_g() || result.dataset.has_any_group_id()) {
        result.groups = build_group_table(result.dataset);
    }
    return result;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    const bool with_y = ds.has_any_y();
    const bool with_gid = ds.has_any_group_id();
    const bool with_g = ds.has_any_g();

    for (std::size_t i = 0; i < ds.dim; ++i) {
        if (i) out << ',';
        out << 'f' << i;
    }
    if (with_y) out << ",y";
    if (with_gid) out << ",group_id";
    if (with_g) out << ",g";
    out << '\n';

    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto x = ds.x(i);
        for (std::size_t d = 0; d < ds.dim; ++d) {
            if (d) out << ',';
            out << format_double(x[d]);
        }
        if (with_y) {
            out << ',';
            if (ds.y[i] != -1) out << static_cast<int>(ds.y[i]);
        }
        if (with_gid) {
            out << ',';
            if (ds.group_id[i] != -1) out << ds.group_id[i];
        }
        if (with_g) {
            out << ',';
            if (ds.g[i] != -1) out << static_cast<int>(ds.g[i]);
        }
        out << '\n';
    }
    if (!out) throw Error("failed while writing '" + path + "'");
}

void save_kv(const KvPairs& kv, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    for (const auto& [key, value] : kv) out << key << '=' << value << '\n';
    if (!out) throw Error("failed while writing '" + path + "'");
}

KvPairs load_kv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    KvPairs kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no += 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("'" + path + "' line " + std::to_string(line_no) +
                             ": expected key=value");
        }
        kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return kv;
}

std::optional<std::string> kv_get(const KvPairs& kv, const std::string& key) {
    for (const auto& [k, v] : kv) {
        if (k == key) return v;
    }
    return std::nullopt;
}

}  // namespace weasl::data
