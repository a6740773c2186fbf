#include "netcap/grids.hpp"

#include "netcap/errors.hpp"

namespace netcap {

static void compositions(std::size_t remaining, std::size_t slots, std::size_t denom,
                         std::vector<std::size_t>& cur,
                         std::vector<std::vector<double>>& out) {
    if (slots == 1) {
        cur.push_back(remaining);
        std::vector<double> p(cur.size());
        for (std::size_t i = 0; i < cur.size(); ++i)
            p[i] = static_cast<double>(cur[i]) / static_cast<double>(denom);
        out.push_back(std::move(p));
        cur.pop_back();
        return;
    }
    for (std::size_t k = 0; k <= remaining; ++k) {
        cur.push_back(k);
        compositions(remaining - k, slots - 1, denom, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<double>> simplex_grid(std::size_t dims, std::size_t points_per_dim) {
    if (dims == 0) throw ParseError("simplex_grid: zero dimensions");
    if (points_per_dim < 2) throw ParseError("simplex_grid: need at least 2 points per dimension");
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> cur;
    compositions(points_per_dim - 1, dims, points_per_dim - 1, cur, out);
    return out;
}

std::vector<double> unit_grid(std::size_t points) {
    if (points < 2) throw ParseError("unit_grid: need at least 2 points");
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    return out;
}

}  // namespace netcap
