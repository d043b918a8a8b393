#include "chaincalc/space.hpp"

#include "chaincalc/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace chaincalc {

double PointCloudSpace::total_mass() const {
    return std::accumulate(mass.begin(), mass.end(), 0.0);
}

double PointCloudSpace::diameter() const {
    double m = 0.0;
    for (double v : dist) m = std::max(m, v);
    return m;
}

double PointCloudSpace::min_positive_distance() const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = d(i, j);
            if (v > 0.0) m = std::min(m, v);
        }
    return std::isfinite(m) ? m : 0.0;
}

int PointCloudSpace::resolve(const std::string& token) const {
    if (!labels.empty())
        for (int i = 0; i < n; ++i)
            if (labels[i] == token) return i;
    try {
        size_t pos = 0;
        int idx = std::stoi(token, &pos);
        if (pos == token.size() && idx >= 0 && idx < n) return idx;
    } catch (...) {
    }
    fail("UnknownPoint", "no point with id or index '" + token + "'");
}

std::string PointCloudSpace::label_of(int i) const {
    if (!labels.empty() && i >= 0 && i < static_cast<int>(labels.size())) return labels[i];
    return std::to_string(i);
}

void validate_space(const PointCloudSpace& space) {
    const int n = space.n;
    if (n <= 0) fail("EmptySpace", "space has no points");
    if (space.dist.size() != static_cast<size_t>(n) * n)
        fail("BadDistanceMatrix", "distance matrix is not n x n");
    if (space.mass.size() != static_cast<size_t>(n))
        fail("BadMassVector", "mass vector length mismatch");

    for (int i = 0; i < n; ++i) {
        if (space.d(i, i) != 0.0)
            fail("NonZeroDiagonal", "dist(" + std::to_string(i) + "," + std::to_string(i) +
                                        ") = " + std::to_string(space.d(i, i)));
        for (int j = i + 1; j < n; ++j) {
            double a = space.d(i, j), b = space.d(j, i);
            if (a != b)
                fail("NonSymmetricDistance",
                     "dist(" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                         std::to_string(a) + " but transposed entry is " + std::to_string(b));
            if (!(a > 0.0) || !std::isfinite(a))
                fail("DegenerateDistance",
                     "dist(" + std::to_string(i) + "," + std::to_string(j) +
                         ") must be positive and finite, got " + std::to_string(a));
        }
    }

    // triangle inequality; report the worst offending triple. Exhaustive scan
    // up to 300 points, a fixed-seed random sample of 10^6 triples beyond.
    double worst = 0.0;
    int triple[3] = {-1, -1, -1};
    auto check_triple = [&](int i, int j, int k) {
        double lhs = space.d(i, k);
        double slack = lhs - space.d(i, j) - space.d(j, k);
        double tol = 1e-12 + 1e-9 * lhs;
        if (slack > tol && slack > worst) {
            worst = slack;
            triple[0] = i;
            triple[1] = j;
            triple[2] = k;
        }
    };
    if (n <= 300) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    if (i == j || j == k || i == k) continue;
                    check_triple(i, j, k);
                }
    } else {
        std::mt19937_64 rng(0x5eedULL);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int t = 0; t < 1000000; ++t) {
            int i = pick(rng), j = pick(rng), k = pick(rng);
            if (i == j || j == k || i == k) continue;
            check_triple(i, j, k);
        }
    }
    if (triple[0] >= 0) {
        std::ostringstream os;
        os << "triangle inequality violated by " << worst << " on triple (" << triple[0]
           << "," << triple[1] << "," << triple[2] << ")";
        fail("TriangleViolation", os.str());
    }

    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (space.mass[i] < 0.0)
            fail("NegativeMass",
                 "mass(" + std::to_string(i) + ") = " + std::to_string(space.mass[i]));
        total += space.mass[i];
    }
    if (!(total > 0.0)) fail("ZeroTotalMass", "total mass must be positive");
}

EpsilonGraph build_epsilon_graph(const PointCloudSpace& space, double eps) {
    if (!(eps > 0.0)) fail("NonPositiveEps", "eps must be positive");
    EpsilonGraph g;
    g.eps = eps;
    g.adjacency.resize(space.n);
    for (int i = 0; i < space.n; ++i)
        for (int j = 0; j < space.n; ++j) {
            if (i == j) continue;
            double d = space.d(i, j);
            if (d > 0.0 && d <= eps) g.adjacency[i].push_back({j, d});
        }
    return g;
}

ComponentPartition chain_components(const PointCloudSpace& space, double eps) {
    if (!(eps > 0.0)) fail("NonPositiveEps", "eps must be positive");
    const int n = space.n;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (space.d(i, j) <= eps) {
                int ra = find(i), rb = find(j);
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }

    ComponentPartition part;
    part.eps = eps;
    part.component_of.assign(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (part.component_of[r] < 0) {
            part.component_of[r] = next++;
            part.components.emplace_back();
        }
        part.component_of[i] = part.component_of[r];
        part.components[part.component_of[i]].push_back(i);
    }
    return part;
}

PointCloudSpace snowflake(const PointCloudSpace& space, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        fail("AlphaOutOfRange", "alpha must lie in (0,1), got " + std::to_string(alpha));
    PointCloudSpace out = space;
    for (double& v : out.dist) v = std::pow(v, alpha);
    // the embedding no longer matches the metric; drop it
    out.coords.clear();
    return out;
}

double open_ball_mass(const PointCloudSpace& space, int center, double r) {
    double m = 0.0;
    for (int z = 0; z < space.n; ++z)
        if (space.d(center, z) < r) m += space.mass[z];
    return m;
}

double closed_ball_mass(const PointCloudSpace& space, int center, double r) {
    double m = 0.0;
    for (int z = 0; z < space.n; ++z)
        if (space.d(center, z) <= r) m += space.mass[z];
    return m;
}

std::vector<int> open_ball_members(const PointCloudSpace& space, int center, double r) {
    std::vector<int> out;
    for (int z = 0; z < space.n; ++z)
        if (space.d(center, z) < r) out.push_back(z);
    return out;
}

DoublingReport doubling_constant(const PointCloudSpace& space,
                                 const std::vector<double>& radii) {
    if (radii.empty()) fail("EmptyRadiusGrid", "need at least one radius");
    for (double r : radii)
        if (!(r > 0.0)) fail("EmptyRadiusGrid", "radii must be positive");
    DoublingReport rep;
    for (int x = 0; x < space.n; ++x)
        for (double r : radii) {
            double inner = open_ball_mass(space, x, r);
            if (inner <= 0.0) {
                ++rep.skipped;
                continue;
            }
            double ratio = open_ball_mass(space, x, 2.0 * r) / inner;
            if (ratio > rep.constant) {
                rep.constant = ratio;
                rep.witness_center = x;
                rep.witness_radius = r;
            }
        }
    return rep;
}

std::vector<double> distance_scales(const PointCloudSpace& space) {
    std::set<double> scales;
    for (int i = 0; i < space.n; ++i)
        for (int j = i + 1; j < space.n; ++j)
            if (space.d(i, j) > 0.0) scales.insert(space.d(i, j));
    return {scales.begin(), scales.end()};
}

// --- generators -----------------------------------------------------------

PointCloudSpace generate_grid(int dim, int side_count, double spacing) {
    if (dim < 1 || dim > 3 || side_count < 2 || !(spacing > 0.0))
        fail("BadDescriptor", "grid needs dim in 1..3, side_count >= 2, spacing > 0");
    int n = 1;
    for (int k = 0; k < dim; ++k) n *= side_count;
    PointCloudSpace s;
    s.n = n;
    s.coords.resize(n);
    s.labels.resize(n);
    double mass = std::pow(spacing, dim);
    s.mass.assign(n, mass);
    for (int i = 0; i < n; ++i) {
        std::vector<double> c(dim);
        int rem = i;
        for (int k = 0; k < dim; ++k) {
            c[k] = spacing * (rem % side_count);
            rem /= side_count;
        }
        s.coords[i] = c;
        s.labels[i] = "p" + std::to_string(i);
    }
    // Distances via integer index deltas so that axis-aligned neighbors are
    // exactly `spacing` apart (coordinate subtraction would drift in the last
    // ulp and break closed-threshold adjacency at eps = spacing).
    auto axes = [&](int i) {
        std::array<long long, 3> a{0, 0, 0};
        int rem = i;
        for (int k = 0; k < dim; ++k) {
            a[k] = rem % side_count;
            rem /= side_count;
        }
        return a;
    };
    s.dist.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        auto ai = axes(i);
        for (int j = 0; j < n; ++j) {
            auto aj = axes(j);
            long long acc = 0;
            for (int k = 0; k < dim; ++k) {
                long long d = ai[k] - aj[k];
                acc += d * d;
            }
            s.d_mut(i, j) = spacing * std::sqrt(static_cast<double>(acc));
        }
    }
    return s;
}

PointCloudSpace generate_two_sequence(int n_min, int n_max) {
    if (n_min < 1 || n_max < n_min)
        fail("BadDescriptor", "two_sequence needs 1 <= n_min <= n_max");
    PointCloudSpace s;
    s.n = 2 * (n_max - n_min + 1);
    s.coords.resize(s.n);
    s.labels.resize(s.n);
    s.mass.resize(s.n);
    int idx = 0;
    for (int n = n_min; n <= n_max; ++n) {
        double nn = n;
        double m = 1.0 / (nn * nn * nn);
        s.coords[idx] = {nn};
        s.labels[idx] = "x" + std::to_string(n);
        s.mass[idx] = m;
        ++idx;
        s.coords[idx] = {nn + 1.0 / nn};
        s.labels[idx] = "y" + std::to_string(n);
        s.mass[idx] = m;
        ++idx;
    }
    // Pairwise distances assembled from the exact collinear layout so that
    // d(x_n, y_n) is exactly fl(1/n): coordinate subtraction would land a few
    // ulps off and break the closed threshold at eps = 1/n.
    s.dist.assign(static_cast<size_t>(s.n) * s.n, 0.0);
    auto decode = [&](int id) { return std::pair<int, bool>{n_min + id / 2, id % 2 == 1}; };
    for (int i = 0; i < s.n; ++i) {
        auto [ni, yi] = decode(i);
        for (int j = i + 1; j < s.n; ++j) {
            auto [nj, yj] = decode(j);
            double d;
            if (ni == nj) {
                d = 1.0 / ni; // x_n to y_n
            } else {
                // j is the farther group (nj > ni by construction order)
                double base = static_cast<double>(nj - ni);
                double shift = (yj ? 1.0 / nj : 0.0) - (yi ? 1.0 / ni : 0.0);
                d = base + shift;
            }
            s.d_mut(i, j) = d;
            s.d_mut(j, i) = d;
        }
    }
    return s;
}

PointCloudSpace generate_punctured_grid(int dim, int side_count, double spacing,
                                        const std::vector<int>& punctures) {
    PointCloudSpace s = generate_grid(dim, side_count, spacing);
    for (int id : punctures) {
        if (id < 0 || id >= s.n)
            fail("BadDescriptor", "puncture id out of range: " + std::to_string(id));
        s.mass[id] = 0.0;
    }
    return s;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

PointCloudSpace generate_space(const std::string& descriptor) {
    auto colon = descriptor.find(':');
    std::string kind = descriptor.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : descriptor.substr(colon + 1);
    try {
        if (kind == "grid") {
            auto parts = split(args, ',');
            if (parts.size() != 3) fail("BadDescriptor", "grid:dim,side,spacing");
            return generate_grid(std::stoi(parts[0]), std::stoi(parts[1]),
                                 std::stod(parts[2]));
        }
        if (kind == "two_sequence") {
            auto parts = split(args, ',');
            if (parts.size() != 2) fail("BadDescriptor", "two_sequence:nmin,nmax");
            return generate_two_sequence(std::stoi(parts[0]), std::stoi(parts[1]));
        }
        if (kind == "punctured_grid") {
            auto parts = split(args, ',');
            if (parts.size() != 4)
                fail("BadDescriptor", "punctured_grid:dim,side,spacing,id1;id2;...");
            std::vector<int> punct;
            for (const auto& tok : split(parts[3], ';'))
                if (!tok.empty()) punct.push_back(std::stoi(tok));
            return generate_punctured_grid(std::stoi(parts[0]), std::stoi(parts[1]),
                                           std::stod(parts[2]), punct);
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail("BadDescriptor", "could not parse generator arguments in '" + descriptor + "'");
    }
    fail("BadDescriptor", "unknown generator kind '" + kind + "'");
}

} // namespace chaincalc
