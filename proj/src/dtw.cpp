#include "edgenilm/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edgenilm/error.hpp"
#include "edgenilm/events.hpp"

namespace edgenilm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw DomainError("DTW needs two non-empty sequences");
}

inline double local_cost(double a, double b, LocalCost cost) {
    const double d = a - b;
    return cost == LocalCost::absolute ? std::abs(d) : d * d;
}

// Band test against the diagonal rescaled to the table's aspect ratio.
struct Band {
    bool active = false;
    double width = 0.0;
    double slope = 0.0;

    Band(std::size_t n, std::size_t m, const std::optional<std::size_t>& w) {
        if (!w) return;
        active = true;
        width = static_cast<double>(*w);
        slope = n > 1 ? static_cast<double>(m - 1) / static_cast<double>(n - 1) : 0.0;
    }
    bool inside(std::size_t i, std::size_t j) const {
        return !active || std::abs(static_cast<double>(j) - slope * static_cast<double>(i)) <= width + 1e-9;
    }
};

}  // namespace

void DtwTable::write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (j) os << ',';
            os << at(i, j);
        }
        os << '\n';
    }
}

DtwTable dtw_table(std::span<const double> x, std::span<const double> y,
                   const DtwOptions& options) {
    check_inputs(x, y);
    const std::size_t n = x.size(), m = y.size();
    const Band band(n, m, options.band);
    DtwTable t;
    t.rows = n;
    t.cols = m;
    t.cells.assign(n * m, kInf);
    auto D = [&](std::size_t i, std::size_t j) -> double& { return t.cells[i * m + j]; };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!band.inside(i, j)) continue;
            const double d = local_cost(x[i], y[j], options.cost);
            if (i == 0 && j == 0) {
                D(i, j) = d;
            } else if (i == 0) {
                D(i, j) = d + D(i, j - 1);
            } else if (j == 0) {
                D(i, j) = d + D(i - 1, j);
            } else {
                D(i, j) = d + std::min({D(i - 1, j), D(i, j - 1), D(i - 1, j - 1)});
            }
        }
    }
    return t;
}

DtwResult dtw_distance(std::span<const double> x, std::span<const double> y,
                       const DtwOptions& options) {
    const DtwTable t = dtw_table(x, y, options);
    DtwResult r;
    r.distance = t.at(t.rows - 1, t.cols - 1);
    if (!std::isfinite(r.distance)) throw DomainError("DTW band too narrow to reach the end cell");

    std::size_t i = t.rows - 1, j = t.cols - 1;
    r.path.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = t.at(i - 1, j - 1);
            const double vert = t.at(i - 1, j);
            const double horiz = t.at(i, j - 1);
            if (diag <= vert && diag <= horiz) {
                --i;
                --j;
            } else if (vert <= horiz) {
                --i;
            } else {
                --j;
            }
        }
        r.path.emplace_back(i, j);
    }
    std::reverse(r.path.begin(), r.path.end());
    return r;
}

double dtw_cost(std::span<const double> x, std::span<const double> y, const DtwOptions& options) {
    check_inputs(x, y);
    const std::size_t n = x.size(), m = y.size();
    const Band band(n, m, options.band);
    std::vector<double> prev(m, kInf), curr(m, kInf);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!band.inside(i, j)) {
                curr[j] = kInf;
                continue;
            }
            const double d = local_cost(x[i], y[j], options.cost);
            if (i == 0 && j == 0) {
                curr[j] = d;
            } else if (i == 0) {
                curr[j] = d + curr[j - 1];
            } else if (j == 0) {
                curr[j] = d + prev[j];
            } else {
                curr[j] = d + std::min({prev[j], curr[j - 1], prev[j - 1]});
            }
        }
        std::swap(prev, curr);
    }
    const double dist = prev[m - 1];
    if (!std::isfinite(dist)) throw DomainError("DTW band too narrow to reach the end cell");
    return dist;
}

std::size_t dtw_table_bytes(std::size_t n, std::size_t m) { return n * m * sizeof(double); }
std::size_t dtw_rolling_bytes(std::size_t m) { return 2 * m * sizeof(double); }

DtwSignature dtw_signature(const CycleSet& cs, const DtwOptions& options) {
    DtwSignature sig{};
    std::size_t k = 0;
    for (std::size_t post = 0; post < 3; ++post) {
        for (std::size_t pre = 0; pre < 3; ++pre) {
            sig[k++] = dtw_cost(cs.post(post), cs.pre(pre), options);
        }
    }
    return sig;
}

}  // namespace edgenilm
