#include "sfd/oa.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sfd/errors.hpp"

namespace sfd {

long long OrthogonalArray::lambda_index() const {
    long long st = 1;
    for (int i = 0; i < t; ++i) st *= s;
    return n() / st;
}

OrthogonalArray parse_oa(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            return true;
        }
        return false;
    };

    if (!next_line()) throw ParseError("missing OA header `n d s t`", 1);
    int n = 0, d = 0, s = 0, t = 0;
    {
        std::istringstream header(line);
        std::string extra;
        if (!(header >> n >> d >> s >> t) || (header >> extra))
            throw ParseError("OA header must be `n d s t`", lineno);
    }
    if (n < 1 || d < 1 || s < 1 || t < 1 || t > d)
        throw ParseError("OA header values out of range", lineno);

    OrthogonalArray oa;
    oa.rows.resize(n, d);
    oa.s = s;
    oa.t = t;
    for (int i = 0; i < n; ++i) {
        if (!next_line()) throw ParseError("expected " + std::to_string(n) + " rows", lineno + 1);
        std::istringstream row(line);
        for (int j = 0; j < d; ++j) {
            int v = 0;
            if (!(row >> v)) throw ParseError("row needs " + std::to_string(d) + " entries", lineno);
            if (v < 1 || v > s)
                throw ParseError("entry " + std::to_string(v) + " outside 1.." + std::to_string(s),
                                 lineno);
            oa.rows(i, j) = v;
        }
        std::string extra;
        if (row >> extra) throw ParseError("row has more than " + std::to_string(d) + " entries", lineno);
    }
    if (next_line()) throw ParseError("unexpected extra row", lineno);
    return oa;
}

OrthogonalArray parse_oa(const std::string& text) {
    std::istringstream in(text);
    return parse_oa(in);
}

OrthogonalArray parse_oa_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open OA file: " + path);
    return parse_oa(in);
}

namespace {

// Visits size-k column subsets in lexicographic order.
template <typename Fn>
bool all_subsets(int d, int k, Fn&& fn) {
    std::vector<int> subset(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
    while (true) {
        if (!fn(subset)) return false;
        int i = k - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] == d - k + i) --i;
        if (i < 0) return true;
        ++subset[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace

bool verify_strength(const OrthogonalArray& oa, int t) {
    if (t < 1 || t > oa.d()) throw std::invalid_argument("verify_strength: t outside 1..d");
    const int n = oa.n();
    const int s = oa.s;
    long long cells = 1;
    for (int i = 0; i < t; ++i) {
        cells *= s;
        if (cells > n) return false;  // lambda would not be a positive integer
    }
    if (n % cells != 0) return false;
    const long long lambda = n / cells;

    std::vector<long long> counts(static_cast<std::size_t>(cells));
    return all_subsets(oa.d(), t, [&](const std::vector<int>& subset) {
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < n; ++i) {
            long long key = 0;
            for (const int col : subset) key = key * s + (oa.rows(i, col) - 1);
            ++counts[static_cast<std::size_t>(key)];
        }
        for (const long long c : counts)
            if (c != lambda) return false;
        return true;
    });
}

LatinHypercube oa_based_lhd(const OrthogonalArray& oa, RngSeed seed) {
    if (!verify_strength(oa, oa.t))
        throw std::invalid_argument("oa_based_lhd: array fails its declared strength");
    const int n = oa.n();
    const int d = oa.d();
    const int s = oa.s;
    const int per_level = n / s;

    Rng rng(seed);
    LatinHypercube lh;
    lh.levels.resize(n, d);
    lh.jitter.resize(n, d);
    std::vector<std::vector<int>> positions(static_cast<std::size_t>(s));
    for (int j = 0; j < d; ++j) {
        for (auto& p : positions) p.clear();
        for (int i = 0; i < n; ++i)
            positions[static_cast<std::size_t>(oa.rows(i, j) - 1)].push_back(i);
        for (int m = 1; m <= s; ++m) {
            // The rows holding level m receive (m-1)n/s+1, ..., mn/s in random order.
            std::vector<int> block = rng.permutation(per_level);
            const auto& pos = positions[static_cast<std::size_t>(m - 1)];
            for (int r = 0; r < per_level; ++r)
                lh.levels(pos[static_cast<std::size_t>(r)], j) =
                    (m - 1) * per_level + block[static_cast<std::size_t>(r)];
        }
    }
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < n; ++i) lh.jitter(i, j) = rng.uniform_open01();
    return lh;
}

int CellCounts::at(const std::vector<int>& cell) const {
    if (static_cast<int>(cell.size()) != t) throw std::invalid_argument("CellCounts::at: bad cell");
    long long key = 0;
    for (int k = t - 1; k >= 0; --k) {
        const int c = cell[static_cast<std::size_t>(k)];
        if (c < 0 || c >= s) throw std::invalid_argument("CellCounts::at: cell index outside 0..s-1");
        key = key * s + c;
    }
    return counts[static_cast<std::size_t>(key)];
}

CellCounts projection_cell_counts(const Design& design, const std::vector<int>& columns, int s) {
    if (s < 1) throw std::invalid_argument("projection_cell_counts: s must be >= 1");
    for (const int col : columns)
        if (col < 0 || col >= design.d())
            throw std::invalid_argument("projection_cell_counts: column index out of range");

    CellCounts cc;
    cc.s = s;
    cc.t = static_cast<int>(columns.size());
    long long cells = 1;
    for (int k = 0; k < cc.t; ++k) cells *= s;
    cc.counts.assign(static_cast<std::size_t>(cells), 0);

    for (int i = 0; i < design.n(); ++i) {
        long long key = 0;
        for (int k = cc.t - 1; k >= 0; --k) {
            const double x = design.points(i, columns[static_cast<std::size_t>(k)]);
            int bin = static_cast<int>(std::floor(x * s));
            bin = std::clamp(bin, 0, s - 1);
            key = key * s + bin;
        }
        ++cc.counts[static_cast<std::size_t>(key)];
    }
    return cc;
}

namespace {

// Best published lower bounds on the maximum number of mutually orthogonal
// Latin hypercube columns, keyed by run size.
const std::map<int, std::pair<int, const char*>>& bound_table() {
    static const std::map<int, std::pair<int, const char*>> table = {
        // n <= 24: algorithmic bounds of Lin (2008), except n = 16 where the
        // rotation construction of Steinberg & Lin (2006) reaches 12.
        {4, {2, "Lin 2008"}},
        {5, {2, "Lin 2008"}},
        {7, {3, "Lin 2008"}},
        {8, {4, "Lin 2008"}},
        {9, {5, "Lin 2008"}},
        {11, {7, "Lin 2008"}},
        {12, {6, "Lin 2008"}},
        {13, {6, "Lin 2008"}},
        {15, {6, "Lin 2008"}},
        {16, {12, "Steinberg & Lin 2006"}},
        {17, {6, "Lin 2008"}},
        {19, {6, "Lin 2008"}},
        {20, {6, "Lin 2008"}},
        {21, {6, "Lin 2008"}},
        {23, {6, "Lin 2008"}},
        {24, {6, "Lin 2008"}},
        // 24 < n <= 512.
        {25, {12, "Lin, Mukerjee & Tang 2009"}},
        {27, {12, "Sun & Tang 2017"}},
        {32, {24, "Sun & Tang 2017"}},
        {33, {16, "Sun, Liu & Lin 2009"}},
        {48, {12, "Lin et al. 2010"}},
        {49, {24, "Lin, Mukerjee & Tang 2009"}},
        {64, {48, "Sun & Tang 2017"}},
        {65, {32, "Sun, Liu & Lin 2009"}},
        {80, {12, "Lin et al. 2010"}},
        {81, {50, "Lin, Mukerjee & Tang 2009"}},
        {96, {24, "Lin et al. 2010"}},
        {97, {24, "Lin et al. 2010"}},
        {112, {12, "Lin et al. 2010"}},
        {113, {12, "Lin et al. 2010"}},
        {121, {84, "Lin, Mukerjee & Tang 2009"}},
        {125, {58, "Sun & Tang 2017"}},
        {128, {96, "Sun & Tang 2017"}},
        {129, {64, "Sun, Liu & Lin 2009"}},
        {144, {24, "Lin et al. 2010"}},
        {145, {12, "Lin et al. 2010"}},
        {160, {24, "Lin et al. 2010"}},
        {161, {24, "Lin et al. 2010"}},
        {169, {84, "Lin, Mukerjee & Tang 2009"}},
        {176, {12, "Lin et al. 2010"}},
        {177, {12, "Lin et al. 2010"}},
        {192, {48, "Lin et al. 2010"}},
        {193, {48, "Lin et al. 2010"}},
        {208, {12, "Lin et al. 2010"}},
        {209, {12, "Lin et al. 2010"}},
        {224, {24, "Lin et al. 2010"}},
        {225, {24, "Lin et al. 2010"}},
        {240, {12, "Lin et al. 2010"}},
        {241, {12, "Lin et al. 2010"}},
        {243, {80, "Sun & Tang 2017"}},
        {256, {248, "Steinberg & Lin 2006"}},
        {343, {168, "Sun & Tang 2017"}},
        {512, {496, "Sun & Tang 2017"}},
    };
    return table;
}

// Lower bounds by run-size residue (Lin, Mukerjee & Tang 2010): k >= 6 for
// n = 16m + j with m >= 1 and j not in {2,6,10,14}; k >= 7 for n = 16m + 11;
// k >= 12 for n in {16m, 16m+1} with m >= 2; k >= 24 for {32m, 32m+1},
// m >= 2; k >= 48 for {64m, 64m+1}, m >= 2.
int residue_rule_bound(int n) {
    int best = 0;
    if (n % 64 <= 1 && n / 64 >= 2) best = std::max(best, 48);
    if (n % 32 <= 1 && n / 32 >= 2) best = std::max(best, 24);
    if (n % 16 <= 1 && n / 16 >= 2) best = std::max(best, 12);
    if (n % 16 == 11) best = std::max(best, 7);
    if (n >= 16 && n % 4 != 2) best = std::max(best, 6);
    return best;
}

}  // namespace

OlhBound olh_factor_bound(int n) {
    if (n < 3) throw std::invalid_argument("olh_factor_bound: n must be >= 3");
    OlhBound bound;
    bound.n = n;

    const auto& table = bound_table();
    if (const auto it = table.find(n); it != table.end()) {
        bound.k_lower_bound = it->second.first;
        bound.source = it->second.second;
        bound.tabulated = true;
        return bound;
    }

    // More than one orthogonal column exists iff n != 3 and n != 4m + 2.
    if (n == 3 || n % 4 == 2) {
        bound.k_lower_bound = 1;
        bound.source = "existence rule: k* = 1 when n = 3 or n = 4m + 2";
        return bound;
    }
    if (const int rule = residue_rule_bound(n); rule > 0) {
        bound.k_lower_bound = rule;
        bound.source = "run-size residue rule (Lin, Mukerjee & Tang 2010)";
        return bound;
    }
    bound.k_lower_bound = 2;
    bound.source = "existence rule: k* >= 2 when n >= 4 and n != 4m + 2";
    return bound;
}

std::string olh_bound_to_json(const OlhBound& bound) {
    std::ostringstream out;
    out << "{\"n\":" << bound.n << ",\"k_lower_bound\":" << bound.k_lower_bound << ",\"source\":\""
        << bound.source << "\",\"tabulated\":" << (bound.tabulated ? "true" : "false") << "}";
    return out.str();
}

}  // namespace sfd
