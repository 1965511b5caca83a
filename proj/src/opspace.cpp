#include "opdyn/opspace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "opdyn/errors.hpp"
#include "opdyn/numfmt.hpp"

namespace opdyn {

FiniteMatrix::FiniteMatrix(std::initializer_list<MatrixEntry> entries) {
    for (const auto& e : entries) add(e.row, e.col, e.value);
}

FiniteMatrix FiniteMatrix::unit(Index row, Index col, double value) {
    FiniteMatrix a;
    a.set(row, col, value);
    return a;
}

FiniteMatrix FiniteMatrix::projection(std::int64_t m) {
    if (m < 0) throw std::invalid_argument("projection radius must be nonnegative");
    return diagonal(-m, m, 1.0);
}

FiniteMatrix FiniteMatrix::diagonal(Index lo, Index hi, double c) {
    FiniteMatrix a;
    for (Index j = lo; j <= hi; ++j) a.set(j, j, c);
    return a;
}

double FiniteMatrix::at(Index row, Index col) const {
    auto it = entries_.find({row, col});
    return it == entries_.end() ? 0.0 : it->second;
}

void FiniteMatrix::set(Index row, Index col, double value) {
    if (!std::isfinite(value)) throw WindowError("non-finite matrix entry");
    if (std::abs(value) < kDropBelow) {
        entries_.erase({row, col});
    } else {
        entries_[{row, col}] = value;
    }
}

void FiniteMatrix::add(Index row, Index col, double value) {
    auto it = entries_.find({row, col});
    set(row, col, (it == entries_.end() ? 0.0 : it->second) + value);
}

std::optional<FiniteMatrix::Support> FiniteMatrix::support() const {
    if (entries_.empty()) return std::nullopt;
    Support s{entries_.begin()->first.first, entries_.rbegin()->first.first, entries_.begin()->first.second,
              entries_.begin()->first.second};
    for (const auto& [key, v] : entries_) {
        s.col_min = std::min(s.col_min, key.second);
        s.col_max = std::max(s.col_max, key.second);
    }
    return s;
}

bool FiniteMatrix::is_monomial() const {
    std::map<Index, int> rows;
    std::map<Index, int> cols;
    for (const auto& [key, v] : entries_) {
        if (++rows[key.first] > 1 || ++cols[key.second] > 1) return false;
    }
    return true;
}

double FiniteMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& [key, v] : entries_) m = std::max(m, std::abs(v));
    return m;
}

FiniteMatrix FiniteMatrix::transpose() const {
    FiniteMatrix t;
    for (const auto& [key, v] : entries_) t.entries_.emplace(Key{key.second, key.first}, v);
    return t;
}

FiniteMatrix& FiniteMatrix::operator+=(const FiniteMatrix& other) {
    for (const auto& [key, v] : other.entries_) add(key.first, key.second, v);
    return *this;
}

FiniteMatrix& FiniteMatrix::operator-=(const FiniteMatrix& other) {
    for (const auto& [key, v] : other.entries_) add(key.first, key.second, -v);
    return *this;
}

FiniteMatrix& FiniteMatrix::operator*=(double c) {
    FiniteMatrix scaled;
    for (const auto& [key, v] : entries_) scaled.set(key.first, key.second, c * v);
    *this = std::move(scaled);
    return *this;
}

FiniteMatrix compose(const FiniteMatrix& a, const FiniteMatrix& b) {
    FiniteMatrix out;
    const auto& be = b.entries();
    for (const auto& [ka, va] : a.entries()) {
        const Index k = ka.second;
        for (auto it = be.lower_bound({k, std::numeric_limits<Index>::min()}); it != be.end() && it->first.first == k;
             ++it) {
            out.add(ka.first, it->first.second, va * it->second);
        }
    }
    return out;
}

namespace {

// Row-major dense restriction of a matrix to its occupied rows and columns,
// scaled so that the largest magnitude is 1.
struct DenseBlock {
    std::vector<Index> row_ids;
    std::vector<Index> col_ids;
    std::vector<double> data;
    double scale = 1.0;

    std::size_t rows() const { return row_ids.size(); }
    std::size_t cols() const { return col_ids.size(); }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }
};

template <class Range>
DenseBlock make_block(const Range& entries) {
    DenseBlock b;
    b.scale = 0.0;
    for (const auto* e : entries) {
        b.row_ids.push_back(e->first.first);
        b.col_ids.push_back(e->first.second);
        b.scale = std::max(b.scale, std::abs(e->second));
    }
    auto uniq = [](std::vector<Index>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(b.row_ids);
    uniq(b.col_ids);
    b.data.assign(b.rows() * b.cols(), 0.0);
    for (const auto* e : entries) {
        const auto i = static_cast<std::size_t>(
            std::lower_bound(b.row_ids.begin(), b.row_ids.end(), e->first.first) - b.row_ids.begin());
        const auto j = static_cast<std::size_t>(
            std::lower_bound(b.col_ids.begin(), b.col_ids.end(), e->first.second) - b.col_ids.begin());
        b(i, j) = e->second / b.scale;
    }
    return b;
}

using EntryPtr = const FiniteMatrix::Storage::value_type*;

// Connected blocks of the bipartite row/column incidence graph.
std::vector<std::vector<EntryPtr>> components(const FiniteMatrix& a) {
    std::unordered_map<Index, std::size_t> row_node;
    std::unordered_map<Index, std::size_t> col_node;
    std::vector<std::size_t> parent;
    auto node = [&](std::unordered_map<Index, std::size_t>& table, Index key) {
        auto [it, inserted] = table.emplace(key, parent.size());
        if (inserted) parent.push_back(parent.size());
        return it->second;
    };
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& [key, v] : a.entries()) {
        const auto r = find(node(row_node, key.first));
        const auto c = find(node(col_node, key.second));
        if (r != c) parent[std::max(r, c)] = std::min(r, c);
    }
    std::map<std::size_t, std::vector<EntryPtr>> groups;
    for (const auto& entry : a.entries()) {
        groups[find(row_node.at(entry.first.first))].push_back(&entry);
    }
    std::vector<std::vector<EntryPtr>> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t support_hash(const DenseBlock& b) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (Index r : b.row_ids) {
        h ^= static_cast<std::uint64_t>(r);
        splitmix64(h);
    }
    for (Index c : b.col_ids) {
        h ^= static_cast<std::uint64_t>(c) * 0x9e3779b97f4a7c15ULL;
        splitmix64(h);
    }
    return h;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

// Largest singular value of a scaled dense block.
double power_iteration(const DenseBlock& b, const NormOptions& opts) {
    const std::size_t r = b.rows();
    const std::size_t c = b.cols();
    const bool gram_on_cols = c <= r;
    const std::size_t n = gram_on_cols ? c : r;

    std::vector<double> x(n);
    std::uint64_t state = support_hash(b);
    for (auto& xi : x) xi = 1.0 + static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    double nx = std::sqrt(dot(x, x));
    for (auto& xi : x) xi /= nx;

    std::vector<double> mid(gram_on_cols ? r : c);
    std::vector<double> y(n);
    auto gram = [&](const std::vector<double>& in, std::vector<double>& out) {
        std::fill(mid.begin(), mid.end(), 0.0);
        std::fill(out.begin(), out.end(), 0.0);
        if (gram_on_cols) {
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j) mid[i] += b(i, j) * in[j];
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j) out[j] += b(i, j) * mid[i];
        } else {
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j) mid[j] += b(i, j) * in[i];
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j) out[i] += b(i, j) * mid[j];
        }
    };

    for (std::int64_t it = 0; it < opts.max_iter; ++it) {
        gram(x, y);
        const double lambda = dot(x, y);
        const double ny = std::sqrt(dot(y, y));
        if (ny == 0.0) return 0.0;
        double res2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) res2 += (y[i] - lambda * x[i]) * (y[i] - lambda * x[i]);
        if (std::sqrt(res2) <= opts.tol * lambda) return std::sqrt(lambda) * b.scale;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    }
    throw ConvergenceError("power iteration did not converge within " + std::to_string(opts.max_iter) +
                           " iterations on a " + std::to_string(r) + "x" + std::to_string(c) + " block");
}

// Singular values of a scaled dense block by one-sided (Hestenes) Jacobi.
std::vector<double> jacobi_singular_values(const DenseBlock& b, const NormOptions& opts) {
    // Work on columns of the taller orientation so there are min(r, c) of them.
    const bool transpose = b.cols() > b.rows();
    const std::size_t len = transpose ? b.cols() : b.rows();
    const std::size_t ncol = transpose ? b.rows() : b.cols();
    std::vector<std::vector<double>> col(ncol, std::vector<double>(len));
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            if (transpose) {
                col[i][j] = b(i, j);
            } else {
                col[j][i] = b(i, j);
            }
        }

    constexpr double eps = 1e-15;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < ncol; ++p) {
            for (std::size_t q = p + 1; q < ncol; ++q) {
                const double alpha = dot(col[p], col[p]);
                const double beta = dot(col[q], col[q]);
                const double gamma = dot(col[p], col[q]);
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t i = 0; i < len; ++i) {
                    const double ap = col[p][i];
                    const double aq = col[q][i];
                    col[p][i] = cs * ap - sn * aq;
                    col[q][i] = sn * ap + cs * aq;
                }
            }
        }
        if (!rotated) {
            std::vector<double> sv;
            sv.reserve(ncol);
            for (const auto& v : col) sv.push_back(std::sqrt(dot(v, v)) * b.scale);
            return sv;
        }
    }
    throw ConvergenceError("one-sided Jacobi did not converge within " + std::to_string(opts.max_sweeps) +
                           " sweeps");
}

void check_tol(const NormOptions& opts) {
    if (!(opts.tol > 0.0 && opts.tol <= 1e-2)) {
        throw std::invalid_argument("norm tolerance must lie in (0, 1e-2]");
    }
}

std::vector<std::vector<EntryPtr>> blocks_of(const FiniteMatrix& a, const NormOptions& opts) {
    if (opts.split_components) return components(a);
    std::vector<EntryPtr> all;
    for (const auto& e : a.entries()) all.push_back(&e);
    return {std::move(all)};
}

void check_cap(Index index, const Limits& limits) {
    if (index > limits.window_cap || -index > limits.window_cap) {
        throw WindowError("transported index " + std::to_string(index) + " exceeds window cap " +
                          std::to_string(limits.window_cap));
    }
}

}  // namespace

double op_norm(const FiniteMatrix& a, const NormOptions& opts) {
    check_tol(opts);
    if (a.empty()) return 0.0;
    double best = 0.0;
    for (const auto& block : blocks_of(a, opts)) {
        if (block.size() == 1) {
            best = std::max(best, std::abs(block.front()->second));
            continue;
        }
        best = std::max(best, power_iteration(make_block(block), opts));
    }
    return best;
}

double trace_norm(const FiniteMatrix& a, const NormOptions& opts) {
    check_tol(opts);
    if (a.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& block : blocks_of(a, opts)) {
        if (block.size() == 1) {
            sum += std::abs(block.front()->second);
            continue;
        }
        for (double s : jacobi_singular_values(make_block(block), opts)) sum += s;
    }
    return sum;
}

double frobenius_norm(const FiniteMatrix& a) {
    const double s = a.max_abs();
    if (s == 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& [key, v] : a.entries()) acc += (v / s) * (v / s);
    return std::sqrt(acc) * s;
}

FiniteMatrix truncate_left(const FiniteMatrix& a, std::int64_t m) {
    FiniteMatrix out;
    for (const auto& [key, v] : a.entries())
        if (key.first >= -m && key.first <= m) out.set(key.first, key.second, v);
    return out;
}

FiniteMatrix truncate_right(const FiniteMatrix& a, std::int64_t m) {
    FiniteMatrix out;
    for (const auto& [key, v] : a.entries())
        if (key.second >= -m && key.second <= m) out.set(key.first, key.second, v);
    return out;
}

FiniteMatrix left_multiply(const ShiftProduct& product, const FiniteMatrix& a, const Limits& limits) {
    FiniteMatrix out;
    std::map<Index, std::pair<Index, double>> row_map;
    for (const auto& [key, v] : a.entries()) {
        auto it = row_map.find(key.first);
        if (it == row_map.end()) {
            const Index target = product_target(product, key.first);
            check_cap(target, limits);
            it = row_map.emplace(key.first, std::pair{target, product_coefficient(product, key.first, limits)}).first;
        }
        out.add(it->second.first, key.second, it->second.second * v);
    }
    return out;
}

FiniteMatrix right_multiply(const FiniteMatrix& a, const ShiftProduct& product, const Limits& limits) {
    // e_i e_j^* W^p = e_i ((W^p)^* e_j)^*, and (W^p)^* e_j = c e_{j'} where W^p e_{j'} = c e_j.
    FiniteMatrix cur = a;
    for (const auto& factor : product) {
        const Index offset = factor.shift.step() * factor.power;
        FiniteMatrix next;
        std::map<Index, std::pair<Index, double>> col_map;
        for (const auto& [key, v] : cur.entries()) {
            auto it = col_map.find(key.second);
            if (it == col_map.end()) {
                const Index source = key.second - offset;
                check_cap(source, limits);
                const double c = factor.shift.power_coefficient(factor.power, source, limits.horizon);
                it = col_map.emplace(key.second, std::pair{source, c}).first;
            }
            next.add(key.first, it->second.first, it->second.second * v);
        }
        cur = std::move(next);
    }
    return cur;
}

FiniteMatrix left_multiply(const PermutationUnitary& u, std::int64_t p, const FiniteMatrix& a,
                           const Limits& limits) {
    if (p > limits.horizon || -p > limits.horizon) {
        throw HorizonError("unitary power " + std::to_string(p) + " exceeds horizon");
    }
    FiniteMatrix out;
    for (const auto& [key, v] : a.entries()) {
        const Index target = u.apply_power(p, key.first);
        check_cap(target, limits);
        out.add(target, key.second, v);
    }
    return out;
}

FiniteMatrix right_multiply(const FiniteMatrix& a, const PermutationUnitary& u, std::int64_t p,
                            const Limits& limits) {
    if (p > limits.horizon || -p > limits.horizon) {
        throw HorizonError("unitary power " + std::to_string(p) + " exceeds horizon");
    }
    // e_i e_j^* U^p = e_i (U^{-p} e_j)^*
    FiniteMatrix out;
    for (const auto& [key, v] : a.entries()) {
        const Index target = u.apply_power(-p, key.second);
        check_cap(target, limits);
        out.add(key.first, target, v);
    }
    return out;
}

std::string to_finmat(const FiniteMatrix& a) {
    std::string out = "finmat v1\n";
    for (const auto& [key, v] : a.entries()) {
        out += std::to_string(key.first);
        out += ' ';
        out += std::to_string(key.second);
        out += ' ';
        out += format_shortest(v);
        out += '\n';
    }
    return out;
}

FiniteMatrix parse_finmat(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "finmat v1") {
        throw SchemaError("missing 'finmat v1' header");
    }
    FiniteMatrix a;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string rs, cs, vs, extra;
        if (!(fields >> rs >> cs >> vs) || (fields >> extra)) {
            throw SchemaError("finmat line " + std::to_string(lineno) + ": expected 'row col value'");
        }
        Index r = 0;
        Index c = 0;
        auto parse_index = [&](const std::string& s, Index& out) {
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec != std::errc{} || ptr != s.data() + s.size()) {
                throw SchemaError("finmat line " + std::to_string(lineno) + ": bad index '" + s + "'");
            }
        };
        parse_index(rs, r);
        parse_index(cs, c);
        if (a.entries().count({r, c}) != 0) {
            throw SchemaError("finmat line " + std::to_string(lineno) + ": duplicate entry");
        }
        a.set(r, c, parse_double(vs));
    }
    return a;
}

void write_finmat(const std::filesystem::path& path, const FiniteMatrix& a) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_finmat(a);
}

FiniteMatrix read_finmat(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read matrix file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_finmat(buf.str());
}

}  // namespace opdyn
